#pragma once

#include <functional>

#include "sfp/domain.hpp"

namespace sfp {

/// Minimizes x^2 + Re[mu^H h] * x over the pointwise set (linear dictionary,
/// quadratic shrinkage). Unconstrained minimizer clipped to [-Gamma, Gamma]
/// for magnitude-bounded sets.
ScalarResult solve_quadratic_linear(const ComplexVec& mu, const ComplexVec& h,
                                    const PointwiseSet& set);

/// Same closed form on plain real data: x^2 + c*x over the set.
ScalarResult solve_quadratic_linear(double c, const PointwiseSet& set);

/// Minimizes x^2 + sum_i mu_i * rho[x * h_i] over x in R, where rho is the
/// hard saturation at level r. Enumerates the saturation breakpoints of
/// |x| (sorted by decreasing |h_i|) on both sign branches and solves one
/// clipped quadratic per piece, including the all-saturated outer region.
ScalarResult solve_saturated_cosine(const std::vector<double>& mu,
                                    const std::vector<double>& h, double r);

/// Generic scalar global minimizer: coarse uniform scan over [-R, R]
/// (or [-Gamma, Gamma] for bounded sets) followed by golden-section
/// refinement of the winning bracket. Throws std::domain_error on a
/// non-finite objective value.
ScalarResult solve_generic(const std::function<double(double)>& objective,
                           const PointwiseSet& set, double search_radius,
                           int grid_points, double refine_tol);

/// Hard saturation rho: identity on [-r, r], clipped to +/- r outside.
double saturate(double x, double r);

}  // namespace sfp
