#include "sfp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "node_cache.hpp"
#include "sfp/scalar_min.hpp"

namespace sfp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> cosine_column(const std::vector<double>& times, double phi) {
  std::vector<double> h(times.size());
  for (size_t i = 0; i < times.size(); ++i) h[i] = std::cos(kTwoPi * phi * times[i]);
  return h;
}

}  // namespace

SinusoidScene make_random_scene(int K, std::vector<double> times, double min_spacing,
                                double amp_lo, double amp_hi, double noise_var,
                                double saturation, std::uint64_t seed) {
  if (K < 0) throw std::invalid_argument("make_random_scene: K < 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uf(0.0, 0.5);
  std::uniform_real_distribution<double> ua(amp_lo, amp_hi);

  SinusoidScene scene;
  scene.times = std::move(times);
  scene.noise_var = noise_var;
  scene.saturation = saturation;
  int guard = 0;
  while (static_cast<int>(scene.freqs.size()) < K) {
    if (++guard > 100000) {
      throw std::runtime_error("make_random_scene: cannot satisfy the minimum spacing");
    }
    double f = uf(rng);
    bool ok = true;
    for (double g : scene.freqs) {
      if (std::abs(f - g) < min_spacing) {
        ok = false;
        break;
      }
    }
    if (ok) scene.freqs.push_back(f);
  }
  for (int k = 0; k < K; ++k) scene.amps.push_back(ua(rng));
  return scene;
}

std::vector<double> synthesize(const SinusoidScene& scene, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(scene.noise_var));
  std::vector<double> y(scene.times.size(), 0.0);
  for (size_t i = 0; i < y.size(); ++i) {
    for (int k = 0; k < scene.components(); ++k) {
      y[i] += saturate(scene.amps[k] * std::cos(kTwoPi * scene.freqs[k] * scene.times[i]),
                       scene.saturation);
    }
    if (scene.noise_var > 0.0) y[i] += noise(rng);
  }
  return y;
}

SfpProblem build_lse(const std::vector<double>& y, const std::vector<double>& times,
                     const LseOptions& opts) {
  if (y.size() != times.size()) throw std::invalid_argument("build_lse: y/times size mismatch");
  if (!(opts.B > 0.0)) throw std::invalid_argument("build_lse: B must be positive");
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("build_lse: epsilon must be positive");

  const int p = static_cast<int>(y.size());
  const double B = opts.B;
  const double r = opts.saturation;
  const bool linear = !std::isfinite(r);
  auto ts = std::make_shared<std::vector<double>>(times);
  auto cache = std::make_shared<detail::BetaVecCache>();
  ComplexVec yc = ComplexVec::real(y);

  SfpProblem prob{Domain::interval(0.0, 0.5)};
  prob.lambda = opts.lambda;
  prob.p = p;
  prob.m = 1;
  prob.f0 = [](double x, const Point&) { return x * x; };

  auto column = [ts, cache](double phi) -> const std::vector<double>& {
    return cache->get(phi, [ts](double ph) { return cosine_column(*ts, ph); });
  };

  prob.F = [column, p, B, r](double x, const Point& beta) {
    const std::vector<double>& h = column(beta[0]);
    ComplexVec out = ComplexVec::zeros(p);
    for (int i = 0; i < p; ++i) out.re[i] = B * saturate(x * h[i], r);
    return out;
  };
  prob.g = {[yc, eps = opts.epsilon](const ComplexVec& z) {
    return norm_sq(sub(yc, z)) - eps;
  }};

  if (linear) {
    prob.h_eval = [column, p, B](const Point& beta) {
      const std::vector<double>& h = column(beta[0]);
      ComplexVec out = ComplexVec::zeros(p);
      for (int i = 0; i < p; ++i) out.re[i] = B * h[i];
      return out;
    };
    prob.pointwise_minimizer = [column, p, B](const ComplexVec& mu, const Point& beta) {
      const std::vector<double>& h = column(beta[0]);
      double c = 0.0;
      for (int i = 0; i < p; ++i) c += mu.re[i] * B * h[i];
      return solve_quadratic_linear(c, PointwiseSet::all_reals());
    };
  } else {
    prob.pointwise_minimizer = [column, p, B, r](const ComplexVec& mu, const Point& beta) {
      const std::vector<double>& h = column(beta[0]);
      std::vector<double> mu_scaled(p);
      for (int i = 0; i < p; ++i) mu_scaled[i] = B * mu.re[i];
      return solve_saturated_cosine(mu_scaled, h, r);
    };
  }

  prob.dz_solver = [yc, eps = opts.epsilon](const ComplexVec& mu, const std::vector<double>& nu) {
    return dz_quadratic(yc, eps, mu, nu[0]);
  };
  return prob;
}

std::vector<ComponentEstimate> extract_components(const PrimalSolution& sol, double B,
                                                  const ExtractOptions& opts) {
  std::vector<ComponentEstimate> out;
  for (const auto& iv : sol.support) {
    if (!(iv.measure() > 0.0)) continue;
    int panels = std::clamp(static_cast<int>(std::ceil(iv.measure() * 8192)), 8, 2048);
    double h = iv.measure() / panels;
    double mass = 0.0, absmass = 0.0, centroid_num = 0.0;
    // Midpoint panels are enough here; bump profiles are smooth inside.
    for (int c = 0; c < panels; ++c) {
      double phi = iv.lo + (c + 0.5) * h;
      double x = sol.evaluator({phi});
      mass += h * x;
      absmass += h * std::abs(x);
      centroid_num += h * std::abs(x) * phi;
    }
    ComponentEstimate est;
    est.bump = iv;
    est.mass = mass;
    est.a_hat = B * mass;
    if (opts.weighted_centroid && absmass > 0.0) {
      est.f_hat = centroid_num / absmass;
    } else {
      est.f_hat = 0.5 * (iv.lo + iv.hi);
    }
    out.push_back(est);
  }
  double amax = 0.0;
  for (const auto& e : out) amax = std::max(amax, std::abs(e.a_hat));
  std::erase_if(out, [&](const ComponentEstimate& e) {
    return std::abs(e.a_hat) < opts.debris_rel_tol * amax;
  });
  std::sort(out.begin(), out.end(), [](const ComponentEstimate& a, const ComponentEstimate& b) {
    return std::abs(a.a_hat) > std::abs(b.a_hat);
  });
  return out;
}

MseResult reconstruction_mse(const std::vector<double>& y,
                             const std::vector<ComponentEstimate>& components,
                             const std::vector<double>& times, double saturation, int K) {
  MseResult res;
  res.components_used = std::min<int>(K, static_cast<int>(components.size()));
  res.short_count = res.components_used < K;
  std::vector<double> yhat(y.size(), 0.0);
  for (int k = 0; k < res.components_used; ++k) {
    for (size_t i = 0; i < y.size(); ++i) {
      yhat[i] += saturate(components[k].a_hat * std::cos(kTwoPi * components[k].f_hat * times[i]),
                          saturation);
    }
  }
  for (size_t i = 0; i < y.size(); ++i) {
    double e = y[i] - yhat[i];
    res.mse += e * e;
  }
  return res;
}

}  // namespace sfp
