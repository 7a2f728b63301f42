#pragma once

#include <cstdint>

#include "sfp/dual_engine.hpp"

namespace sfp {

/// Scene description for the saturated-sinusoid sampling model
/// y_i = sum_k rho[a_k cos(2 pi f_k t_i)] + n_i.
struct SinusoidScene {
  std::vector<double> freqs;  // in [0, 1/2]
  std::vector<double> amps;
  std::vector<double> times;
  double noise_var = 0.0;
  double saturation = std::numeric_limits<double>::infinity();

  int components() const { return static_cast<int>(freqs.size()); }
};

/// Random scene with pairwise frequency spacing >= min_spacing and
/// amplitudes uniform in [amp_lo, amp_hi].
SinusoidScene make_random_scene(int K, std::vector<double> times, double min_spacing,
                                double amp_lo, double amp_hi, double noise_var,
                                double saturation, std::uint64_t seed);

/// Samples of the scene with i.i.d. Gaussian noise.
std::vector<double> synthesize(const SinusoidScene& scene, std::uint64_t seed);

struct LseOptions {
  double B = 1.0;
  double lambda = 1.0;
  double epsilon = 1.0;
  double saturation = std::numeric_limits<double>::infinity();  // r; inf = linear
};

/// Line spectral estimation SFP on Omega = [0, 1/2]:
/// F0 = x^2, F_i(x, phi) = B rho[x cos(2 pi phi t_i)], g(z) = |y - z|^2 - eps.
/// The pointwise solver and d_z block use the closed forms.
SfpProblem build_lse(const std::vector<double>& y, const std::vector<double>& times,
                     const LseOptions& opts);

struct ComponentEstimate {
  double f_hat = 0.0;
  double a_hat = 0.0;
  Interval bump;
  double mass = 0.0;  // int over the bump of X*
};

struct ExtractOptions {
  /// f_hat from the |X*|-weighted centroid (default) or the bump midpoint.
  bool weighted_centroid = true;
  /// Bumps with |a_hat| below this fraction of the largest are dropped.
  double debris_rel_tol = 1e-3;
};

/// One component per maximal connected support interval, a_hat = B * mass,
/// sorted by |a_hat| descending.
std::vector<ComponentEstimate> extract_components(const PrimalSolution& sol, double B,
                                                  const ExtractOptions& opts = {});

struct MseResult {
  double mse = 0.0;
  int components_used = 0;
  bool short_count = false;  // fewer than K components were available
};

/// Resynthesizes the top-K components through the saturated model and
/// returns the sum of squared sample errors.
MseResult reconstruction_mse(const std::vector<double>& y,
                             const std::vector<ComponentEstimate>& components,
                             const std::vector<double>& times, double saturation, int K);

}  // namespace sfp
