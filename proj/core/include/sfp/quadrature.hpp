#pragma once

#include <cstdint>
#include <functional>

#include "sfp/domain.hpp"

namespace sfp {

enum class QuadRule { Midpoint, Gauss5 };

/// Composite quadrature over a uniform cell partition of the domain.
/// Weights sum to the domain measure (exact on constants); delta is the
/// Richardson-style error estimate against the half-resolution scheme for
/// the probe integrand supplied at build time.
struct QuadratureScheme {
  Domain domain;
  int cells_per_dim = 1;
  QuadRule rule = QuadRule::Gauss5;
  std::vector<Point> nodes;
  std::vector<double> weights;
  double delta = 0.0;

  /// Same rule at half the cell count (>= 1); used for live delta estimates.
  QuadratureScheme half() const;
};

QuadratureScheme build_composite(
    const Domain& domain, int cells_per_dim, QuadRule rule,
    const std::function<double(const Point&)>& probe = nullptr);

double integrate(const QuadratureScheme& scheme,
                 const std::function<double(const Point&)>& f);
ComplexVec integrate_vec(const QuadratureScheme& scheme, int p,
                         const std::function<ComplexVec(const Point&)>& f);

/// Reproducible uniform sampler on the domain: identical (seed, call_index)
/// pairs yield identical draws.
struct McSampler {
  Domain domain;
  int batch_size = 1;
  std::uint64_t seed = 0;
};

std::vector<Point> mc_nodes(const McSampler& sampler, std::uint64_t call_index);

/// Deterministic seed derivation for independent realizations.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sfp
