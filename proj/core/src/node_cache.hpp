#pragma once

#include <cstdint>
#include <cstring>
#include <unordered_map>
#include <vector>

namespace sfp::detail {

// Memoizes a per-beta vector (dictionary columns, interpolated sample
// values) keyed on the bit pattern of the 1-D abscissa. Quadrature nodes
// repeat across ascent iterations, so scheme nodes always hit; transient
// bisection probes stop being inserted once the cap is reached.
class BetaVecCache {
 public:
  explicit BetaVecCache(std::size_t cap = 1 << 17) : cap_(cap) {}

  template <class Fill>
  const std::vector<double>& get(double beta, Fill&& fill) {
    std::uint64_t key;
    std::memcpy(&key, &beta, sizeof(key));
    auto it = map_.find(key);
    if (it != map_.end()) return it->second;
    std::vector<double> v = fill(beta);
    if (map_.size() >= cap_) {
      scratch_ = std::move(v);
      return scratch_;
    }
    return map_.emplace(key, std::move(v)).first->second;
  }

 private:
  std::size_t cap_;
  std::unordered_map<std::uint64_t, std::vector<double>> map_;
  std::vector<double> scratch_;
};

}  // namespace sfp::detail
