#pragma once

#include <string>

#include "sfp/data_io.hpp"
#include "sfp/fda.hpp"
#include "sfp/spectral.hpp"

namespace sfp::desk {

/// Small deterministic instances used by the property suites and the CLI.
struct LseDesk {
  SinusoidScene scene;
  std::vector<double> y;
  LseOptions opts;
  AscendOptions ascent;
  int cells = 512;
};

LseDesk linear_lse_desk();
LseDesk saturated_lse_desk();

struct RfdaDesk {
  std::vector<FunctionalSample> samples;
  RfdaOptions opts;
  AscendOptions ascent;
  int cells = 256;
};

RfdaDesk rfda_desk();

/// The two-coordinate piecewise-constant dictionary instance: h(b) =
/// (1, 0) on [0, 1/2], (0, 1) on (1/2, 1], P = {|x| <= Gamma}, L0 objective
/// (lambda = 1, F0 = 0). With equality_dz the measurement constraint is
/// enforced exactly (z = y) and nu is eliminated from the ascent; otherwise
/// the quadratic d_z block with the given epsilon is used.
SfpProblem example1_problem(double gamma, double y1, double y2, bool equality_dz,
                            double epsilon = 0.0);

struct Example1Solution {
  double p0_star = 0.0;
  double p1_star = 0.0;
  double residual = 0.0;       // |P0 - P1/Gamma|
  PrimalSolution x0;           // recovered L0 solution
  PrimalSolution x1;           // recovered L1 representative
  SolveReport report0, report1;
};

/// Solves both duals of the instance by supergradient ascent and recovers
/// the primal functions (degenerate regions resolved by measurement
/// matching).
Example1Solution solve_example1(double gamma, double y1, double y2, int steps = 60000,
                                double eta0 = 0.5, int cells = 512);

// ---- property suites -------------------------------------------------

struct DualityCheck {
  std::string name;
  double gap = 0.0;
  double delta = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Final duality gap <= 2 delta + 1e-3 on the three desk instances.
std::vector<DualityCheck> run_duality_suite();

struct ScalingCheck {
  double p0_star = 0.0;
  double p1_star = 0.0;
  double max_residual = 0.0;
  double residual_threshold = 0.0;
  bool pass_values = false;
  bool pass_residuals = false;
  bool pass() const { return pass_values && pass_residuals; }
};

/// Example 1 optima (= 0.5 within 1e-3 for Gamma=1, y=(0.3,-0.2)) and the
/// scaling identity residual on random dual points.
ScalingCheck run_scaling_suite(std::uint64_t seed = 1, int n_points = 100);

struct McCheck {
  int components_total = 0;
  int components_ok = 0;
  double worst_ratio = 0.0;  // |mean - quad| / (4 SE), max over components
  bool pass = false;
};

/// Mean of `reps` stochastic supergradients vs the quadrature supergradient
/// at 5 fixed dual points of the linear desk instance, within 4 standard
/// errors componentwise.
McCheck run_mc_suite(std::uint64_t seed = 1, int reps = 1000, int batch = 8);

struct PerturbationCheck {
  std::vector<double> deltas;
  std::vector<double> errors;
  double slope = 0.0;
  double c = 0.0;
  bool pass_slope = false;
  bool pass_bound = false;
  bool pass() const { return pass_slope && pass_bound; }
};

/// solve_approximate at resolutions giving delta near {1e-2, 1e-3, 1e-4};
/// log-log regression slope of |P* - P_delta*| vs delta in [0.7, 1.3] and
/// each error <= 1.1 c delta.
PerturbationCheck run_perturbation_suite();

}  // namespace sfp::desk
