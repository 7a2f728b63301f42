#pragma once

#include <string>

#include "sfp/dual_engine.hpp"
#include "sfp/fda.hpp"
#include "sfp/spectral.hpp"

namespace sfp {

/// Flat key = value run configuration with [sections]. Every field has a
/// default; unknown keys are rejected naming the offending key.
struct RunConfig {
  // [problem]
  std::string kind = "lse";  // lse | rfda
  double lambda = 1.0;
  double epsilon = 1.0;
  double B = 1.0;
  double r = std::numeric_limits<double>::infinity();
  double gamma = 1.0;

  // [solver]
  int steps = 5000;
  double eta0 = 0.5;
  std::string schedule = "inv-sqrt";  // constant | inv-sqrt
  int cells = 512;
  std::string rule = "gauss5";  // midpoint | gauss5
  std::uint64_t seed = 1;
  int N = 8;  // stochastic mini-batch
  double nu_step_scale = 1.0;
  int delta_every = 1;
  std::string method = "approximate";  // approximate | stochastic

  // [scene] synthetic line-spectral scene
  int K = 2;
  double noise_var = 0.0;
  double min_spacing = 0.0;
  double amp_lo = 0.5;
  double amp_hi = 3.0;
  double t_lo = -30.0;
  double t_hi = 30.0;

  // [fda]
  std::string train_path;
  std::string test_path;
  double eps_tilde = 46.0;
  double corrupt_fraction = 0.1;
  double corrupt_magnitude = 20.0;
  int synthetic_n = 40;
  int synthetic_knots = 96;
  double synthetic_noise = 0.5;

  // [io]
  std::string input;
  std::string output_dir = "out";
  int grid_points = 512;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
/// Applies one "section.key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);
void write_config(const RunConfig& cfg, const std::string& path);

StepSchedule schedule_from(const std::string& name);
QuadRule rule_from(const std::string& name);

/// Two numeric columns (times, values); header row optional; errors carry
/// the line number.
std::pair<std::vector<double>, std::vector<double>> load_samples_csv(const std::string& path);
void write_samples_csv(const std::string& path, const std::vector<double>& t,
                       const std::vector<double>& y);

/// UCR archive layout: first column label in {-1,1} or {0,1} (-1 maps to 0),
/// remaining columns equally spaced values on [0, 1].
std::vector<FunctionalSample> load_ucr_tsv(const std::string& path);

/// Uniform grid of (beta, X*(beta)) rows plus a comment footer with the
/// support intervals and (P, l0).
void write_solution_csv(const PrimalSolution& sol, int grid_points, const std::string& path);

void write_trace_csv(const SolveReport& report, const std::string& path);

void write_components_csv(const std::vector<ComponentEstimate>& components,
                          const SinusoidScene* truth, const std::string& path);

void write_classifier_csv(const RobustClassifier& clf, int grid_points,
                          const std::string& path);

}  // namespace sfp
