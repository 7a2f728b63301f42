#include "sfp/scalar_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sfp {

double saturate(double x, double r) {
  if (!std::isfinite(r)) return x;
  if (x > r) return r;
  if (x < -r) return -r;
  return x;
}

ScalarResult solve_quadratic_linear(double c, const PointwiseSet& set) {
  double x = set.clip(-0.5 * c);
  return {x, x * x + c * x};
}

ScalarResult solve_quadratic_linear(const ComplexVec& mu, const ComplexVec& h,
                                    const PointwiseSet& set) {
  return solve_quadratic_linear(inner(mu, h), set);
}

namespace {

// Quadratic t^2 + l*t + c minimized over [lo, hi] (hi may be +inf).
ScalarResult min_quadratic_on(double l, double c, double lo, double hi) {
  double t = -0.5 * l;
  if (t < lo) t = lo;
  if (t > hi) t = hi;
  return {t, t * t + l * t + c};
}

}  // namespace

ScalarResult solve_saturated_cosine(const std::vector<double>& mu,
                                    const std::vector<double>& h, double r) {
  if (mu.size() != h.size()) {
    throw std::invalid_argument("solve_saturated_cosine: mu/h size mismatch");
  }
  // Coordinates with h_i = 0 contribute mu_i * rho[0] = 0 for every x.
  std::vector<int> idx;
  idx.reserve(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    if (h[i] != 0.0) idx.push_back(static_cast<int>(i));
  }
  if (idx.empty()) return {0.0, 0.0};

  if (!std::isfinite(r)) {
    double c = 0.0;
    for (int i : idx) c += mu[i] * h[i];
    return solve_quadratic_linear(c, PointwiseSet::all_reals());
  }
  if (!(r > 0.0)) throw std::invalid_argument("solve_saturated_cosine: r must be positive");

  // Sorted by decreasing |h|: coordinate k saturates once |x| >= r/|h_(k)|,
  // so on |x| in [b_k, b_{k+1}) exactly the first k coordinates saturate.
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return std::abs(h[a]) > std::abs(h[b]); });
  const int K = static_cast<int>(idx.size());

  // prefix[k] = sum_{j<k} mu_j * sign(h_j), suffix[k] = sum_{j>=k} mu_j * h_j.
  std::vector<double> prefix(K + 1, 0.0), suffix(K + 1, 0.0);
  for (int k = 0; k < K; ++k) {
    int i = idx[k];
    prefix[k + 1] = prefix[k] + mu[i] * (h[i] > 0.0 ? 1.0 : -1.0);
  }
  for (int k = K - 1; k >= 0; --k) {
    int i = idx[k];
    suffix[k] = suffix[k + 1] + mu[i] * h[i];
  }

  const double inf = std::numeric_limits<double>::infinity();
  ScalarResult best{0.0, inf};
  for (int sgn = 0; sgn < 2; ++sgn) {
    const double s = sgn == 0 ? 1.0 : -1.0;
    for (int k = 0; k <= K; ++k) {
      double lo = k == 0 ? 0.0 : r / std::abs(h[idx[k - 1]]);
      double hi = k == K ? inf : r / std::abs(h[idx[k]]);
      // objective(s*t) = t^2 + s*suffix[k]*t + s*r*prefix[k]
      ScalarResult piece = min_quadratic_on(s * suffix[k], s * r * prefix[k], lo, hi);
      if (piece.value < best.value) best = {s * piece.x_star, piece.value};
    }
  }
  return best;
}

ScalarResult solve_generic(const std::function<double(double)>& objective,
                           const PointwiseSet& set, double search_radius,
                           int grid_points, double refine_tol) {
  if (grid_points < 3) throw std::invalid_argument("solve_generic: grid_points < 3");
  double lo = set.bounded() ? -set.bound() : -search_radius;
  double hi = set.bounded() ? set.bound() : search_radius;

  auto eval = [&](double x) {
    double v = objective(x);
    if (!std::isfinite(v)) {
      throw std::domain_error("solve_generic: non-finite objective at x=" + std::to_string(x));
    }
    return v;
  };

  ScalarResult best{0.0, eval(0.0)};  // 0 is admissible for every PointwiseSet
  int best_i = -1;
  std::vector<double> xs(grid_points), vs(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid_points - 1);
    vs[i] = eval(xs[i]);
    if (vs[i] < best.value) {
      best = {xs[i], vs[i]};
      best_i = i;
    }
  }

  // Golden-section refinement inside the winning bracket.
  double a = best_i <= 0 ? lo : xs[best_i - 1];
  double b = (best_i < 0 || best_i >= grid_points - 1) ? hi : xs[best_i + 1];
  if (best_i < 0) {
    // x = 0 won the scan; bracket it against its grid neighbours.
    auto it = std::upper_bound(xs.begin(), xs.end(), 0.0);
    if (it != xs.begin() && it != xs.end()) {
      a = *(it - 1);
      b = *it;
    } else {
      return best;
    }
  }
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > refine_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = eval(d);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = eval(xm);
  if (fc < best.value) best = {c, fc};
  if (fd < best.value) best = {d, fd};
  if (fm < best.value) best = {xm, fm};
  return best;
}

}  // namespace sfp
