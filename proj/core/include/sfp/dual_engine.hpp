#pragma once

#include <limits>
#include <optional>

#include "sfp/domain.hpp"
#include "sfp/quadrature.hpp"

namespace sfp {

struct Interval {
  double lo = 0.0, hi = 0.0;
  double measure() const { return hi - lo; }
};

double total_measure(const std::vector<Interval>& intervals);
std::vector<Interval> merge_intervals(std::vector<Interval> intervals);

struct EvalOptions {
  /// Estimate the integration error by half-resolution comparison of the
  /// actual dual integrand.
  bool estimate_delta = true;
  /// Locate support boundaries by bisection on the margin between adjacent
  /// nodes of opposite sign. When off, support intervals stay empty and
  /// support_measure falls back to the node-mass estimate.
  bool refine_support = true;
  /// Bisection tolerance as a fraction of the domain side length.
  double boundary_tol = 1e-6;
};

/// One evaluation of the dual function d(mu, nu) = d_X(mu) + d_z(mu, nu).
/// Nodes are classified by the margin gamma_o - gamma_0 + lambda; ties
/// (margin exactly zero) classify as not in support.
struct DualEvaluation {
  double value = -std::numeric_limits<double>::infinity();
  double dx_value = 0.0;
  double dz_value = 0.0;
  ComplexVec dz_minimizer;
  std::vector<double> dz_slack;
  std::vector<Interval> support;
  double support_measure = 0.0;
  double delta_est = 0.0;
  /// False when the d_z subproblem is unbounded below (outside the dual
  /// domain); all other fields are then meaningless.
  bool in_domain = false;

  // Per-node cache reused by supergradients and primal recovery.
  std::vector<double> node_x;
  std::vector<double> node_margin;
  std::vector<std::uint8_t> node_in_support;
  double node_mass_support = 0.0;
};

DualEvaluation eval_dual(const SfpProblem& problem, const DualPoint& point,
                         const QuadratureScheme& scheme, const EvalOptions& opts = {});

/// Closed-form d_z block for the quadratic constraint g(z) = |y - z|^2 - eps:
/// z = y + mu/(2 nu). nu = 0 with mu != 0 is unbounded below.
DzResult dz_quadratic(const ComplexVec& y, double epsilon, const ComplexVec& mu,
                      double nu);

struct Supergradient {
  ComplexVec p_mu;
  std::vector<double> p_nu;
};

/// p_mu = int F[X_d(mu,b), b] db - z_d over the scheme (node-masked, so a
/// midpoint scheme reproduces the Monte Carlo estimator exactly);
/// p_nu_i = g_i at the d_z block minimizer.
Supergradient supergradients(const SfpProblem& problem, const DualPoint& point,
                             const DualEvaluation& eval, const QuadratureScheme& scheme);

enum class StepSchedule { Constant, InvSqrt };

struct AscendOptions {
  int steps = 1000;
  double eta0 = 0.1;
  StepSchedule schedule = StepSchedule::InvSqrt;
  /// Defaults to mu = 0, nu_i = 1.
  std::optional<DualPoint> init;
  /// Per-block step scaling for badly conditioned nu dynamics; 1 keeps the
  /// plain ascent update.
  double nu_step_scale = 1.0;
  /// Halve eta and retry when a step lands outside the dual domain.
  int backtrack_max = 30;
  /// Early stop when |p_mu| + |p_nu| stays below this for stall_window
  /// consecutive steps; 0 disables.
  double stall_tol = 0.0;
  int stall_window = 10;
  /// Re-estimate delta every k-th iteration (>= 1).
  int delta_every = 1;
};

struct SolveReport {
  std::vector<double> dual_trace;    // d_t; index 0 is the initial point
  std::vector<double> eta_trace;     // step used to reach iterate t
  std::vector<double> support_trace; // node-mass support measure at t
  std::vector<int> accepted_iterations;
  int best_t = 0;
  double final_gap_estimate = std::numeric_limits<double>::quiet_NaN();
  double delta_used = 0.0;
  int wall_iterations = 0;
  bool backtrack_exhausted = false;
};

/// Projected supergradient ascent on the dual; returns the iterate with the
/// best recorded dual value.
std::pair<DualPoint, SolveReport> ascend(const SfpProblem& problem,
                                         const QuadratureScheme& scheme,
                                         const AscendOptions& opts);

/// Sparse function recovered from a dual point: the pointwise minimizer
/// inside the refined support, zero outside.
struct PrimalSolution {
  std::function<double(const Point&)> evaluator;
  std::vector<Interval> support;
  double objective_value = 0.0;  // int F0[X*] + lambda * l0
  ComplexVec measurements;       // z*
  double l0 = 0.0;
  std::vector<std::pair<double, double>> grid;  // (beta, X*(beta)) export samples
  DualPoint dual;                // the dual point the solution was extracted at
};

struct RecoverOptions {
  int output_grid = 512;
  /// Nodes with |margin| <= tie_tol form degenerate regions where the
  /// thresholding dichotomy does not decide membership; they are resolved
  /// by measurement matching (fractional inclusion against z*). 0 disables.
  double tie_tol = 0.0;
};

PrimalSolution recover_primal(const SfpProblem& problem, const DualPoint& point,
                              const DualEvaluation& eval, const QuadratureScheme& scheme,
                              const RecoverOptions& opts = {});

/// Appendix-style approximate ascent: the retained primal is replaced only
/// when the dual improves on the last accepted value by more than twice the
/// live integration error estimate.
std::pair<PrimalSolution, SolveReport> solve_approximate(const SfpProblem& problem,
                                                         const QuadratureScheme& scheme,
                                                         const AscendOptions& opts,
                                                         const RecoverOptions& ropts = {});

/// Stochastic ascent: p_mu is replaced by the unbiased uniform-sampling
/// estimate on fresh nodes each step; improving iterates (judged on the
/// reporting scheme) are retained and the returned solution is their
/// pointwise average. Throws when no iterate was retained.
std::pair<PrimalSolution, SolveReport> solve_stochastic(const SfpProblem& problem,
                                                        const McSampler& sampler,
                                                        const AscendOptions& opts,
                                                        const QuadratureScheme& quad_for_reporting,
                                                        const RecoverOptions& ropts = {});

/// The L1 companion of a magnitude-bounded problem with F0 == 0: objective
/// |x| integrand, lambda = 0, same dictionary and constraints.
SfpProblem l1_companion(const SfpProblem& problem);

/// d_1(mu, nu) of the companion L1 problem.
double eval_dual_l1(const SfpProblem& problem, const DualPoint& point,
                    const QuadratureScheme& scheme);

/// |d_0(mu,nu) - (1/Gamma) d_1(Gamma mu, Gamma nu)|. Probes the saturation
/// hypothesis (x != 0 implies |x| = Gamma) at the scheme nodes first and
/// throws naming the offending (mu, beta) when it fails.
double check_l0_l1_scaling(const SfpProblem& problem, const DualPoint& point,
                           const QuadratureScheme& scheme);

/// Quantitative perturbation constant
///   c = (F0_bar + lambda m(Omega)) / (alpha eps_slater)
///       * max(|sum_i g_i(-alpha 1)|, |sum_i g_i(alpha 1)|).
double error_bound_constant(const SfpProblem& problem, double alpha, double eps_slater,
                            double F0_bar);

/// Integrates f_in over the support intervals and f_out over the complement
/// with boundary-split Gauss panels (independent of the node-masked path).
double integrate_piecewise(const Domain& domain, const std::vector<Interval>& support,
                           const std::function<double(double)>& f_in,
                           const std::function<double(double)>& f_out,
                           int panels_per_unit = 2048);

}  // namespace sfp
