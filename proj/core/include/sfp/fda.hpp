#pragma once

#include <cstdint>

#include "sfp/dual_engine.hpp"

namespace sfp {

/// Piecewise-linear functional sample on normalized time [0, 1] with a
/// binary label. Evaluation outside [0, 1] is an error.
struct FunctionalSample {
  std::vector<double> knots;   // strictly increasing, first 0, last 1
  std::vector<double> values;
  int label = 0;  // in {0, 1}

  double eval(double tau) const;
};

/// Builds a sample from raw (possibly unnormalized) knots; rescales time to
/// span [0, 1].
FunctionalSample make_sample(std::vector<double> knots, std::vector<double> values, int label);

struct RfdaOptions {
  double lambda = 10.0;
  double saturation = 4.0;  // r; inf = plain logistic model
  double eps_tilde = 46.0;  // bound on the summed logistic loss
};

/// Robust functional logistic regression SFP on Omega = [0, 1]:
/// F0 = w^2, F_i(w, tau) = rho[Z_i(tau) w], summed logistic loss <= eps_tilde.
/// The intercept's b^2 cost is absorbed into the d_z block closed form.
SfpProblem build_rfda(const std::vector<FunctionalSample>& samples, const RfdaOptions& opts);

struct DzLogisticResult {
  ComplexVec z;  // the measurement block minimizer (intercept removed)
  double b = 0.0;
  double value = 0.0;
  std::vector<double> slack;
  bool unbounded = false;
};

/// Closed-form d_z block for the logistic constraint. With s_i = 1 - 2 y_i,
/// each coordinate needs mu_i s_i in (0, nu); otherwise the block is
/// unbounded below and the ascent must backtrack.
DzLogisticResult dz_logistic(const std::vector<int>& labels, const std::vector<double>& mu,
                             double nu, double eps_tilde);

/// Trained classifier. The stored intercept follows the prediction-model
/// convention score = sigma(int rho[Z W] - b).
struct RobustClassifier {
  std::function<double(double)> weight;  // W(tau), zero outside support
  double b = 0.0;
  double saturation = 4.0;
  std::vector<Interval> support;
  double lambda = 0.0;
};

struct RfdaModel {
  RobustClassifier classifier;
  PrimalSolution solution;
  SolveReport report;
  double intercept_cost = 0.0;  // b^2 term of the primal objective
  double primal_value = 0.0;    // int W^2 + b^2 + lambda * l0
  double gap = 0.0;             // |primal_value - best dual value|
};

RfdaModel train_rfda(const std::vector<FunctionalSample>& samples, const RfdaOptions& opts,
                     const QuadratureScheme& scheme, const AscendOptions& ascent);

/// P[y = 1] = 1 / (1 + exp(-int rho[Z(t) W(t)] dt + b)).
double predict_proba(const RobustClassifier& clf, const FunctionalSample& sample);

/// Adds +-magnitude to ceil(fraction * #knots) uniformly chosen knots of
/// each series, reproducibly per seed.
std::vector<FunctionalSample> corrupt_impulsive(const std::vector<FunctionalSample>& samples,
                                                double fraction, double magnitude,
                                                std::uint64_t seed);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<std::pair<double, double>> roc;  // (fpr, tpr)
  double auc = 0.0;
  bool roc_defined = false;
};

EvalReport evaluate(const RobustClassifier& clf, const std::vector<FunctionalSample>& samples);

/// Dataset-free two-class functional generator: opposite-sign smooth bumps
/// plus Gaussian noise.
std::vector<FunctionalSample> make_synthetic_fda(int n, int n_knots, double noise_sd,
                                                 std::uint64_t seed);

}  // namespace sfp
