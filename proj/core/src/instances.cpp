#include "sfp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sfp::desk {

namespace {

std::vector<double> desk_times() { return {-4, -3, -2, -1, 0, 1, 2, 3}; }

}  // namespace

LseDesk linear_lse_desk() {
  LseDesk d;
  d.scene.times = desk_times();
  d.scene.freqs = {0.2};
  d.scene.amps = {1.5};
  d.scene.noise_var = 0.0;
  d.scene.saturation = std::numeric_limits<double>::infinity();
  d.y = synthesize(d.scene, 0);
  d.opts.B = 1.0;
  d.opts.lambda = 100.0;
  d.opts.epsilon = 0.5;
  d.opts.saturation = d.scene.saturation;
  d.ascent.steps = 40000;
  d.ascent.eta0 = 1.0;
  d.ascent.schedule = StepSchedule::InvSqrt;
  d.ascent.delta_every = 16;
  d.cells = 512;
  return d;
}

LseDesk saturated_lse_desk() {
  LseDesk d;
  d.scene.times = desk_times();
  d.scene.freqs = {0.2};
  d.scene.amps = {2.0};
  d.scene.noise_var = 0.0;
  d.scene.saturation = 1.0;
  d.y = synthesize(d.scene, 0);
  d.opts.B = 20.0;
  d.opts.lambda = 20.0;
  d.opts.epsilon = 0.5;
  d.opts.saturation = 1.0;
  d.ascent.steps = 40000;
  d.ascent.eta0 = 0.5;
  d.ascent.schedule = StepSchedule::InvSqrt;
  d.ascent.delta_every = 16;
  d.cells = 512;
  return d;
}

RfdaDesk rfda_desk() {
  RfdaDesk d;
  d.samples = make_synthetic_fda(10, 24, 0.5, 7);
  d.opts.lambda = 0.5;
  d.opts.saturation = 4.0;
  d.opts.eps_tilde = 4.0;
  d.ascent.steps = 20000;
  d.ascent.eta0 = 0.2;
  d.ascent.schedule = StepSchedule::InvSqrt;
  d.ascent.delta_every = 16;
  d.cells = 128;
  return d;
}

SfpProblem example1_problem(double gamma, double y1, double y2, bool equality_dz,
                            double epsilon) {
  ComplexVec y = ComplexVec::real({y1, y2});
  SfpProblem prob{Domain::interval(0.0, 1.0)};
  prob.lambda = 1.0;
  prob.p = 2;
  prob.m = 1;
  prob.pointwise_set = PointwiseSet::magnitude_bound(gamma);
  prob.f0 = [](double, const Point&) { return 0.0; };

  auto h_of = [](double beta) {
    return beta <= 0.5 ? std::pair<double, double>{1.0, 0.0}
                       : std::pair<double, double>{0.0, 1.0};
  };
  prob.F = [h_of](double x, const Point& beta) {
    auto [h1, h2] = h_of(beta[0]);
    return ComplexVec::real({x * h1, x * h2});
  };
  prob.h_eval = [h_of](const Point& beta) {
    auto [h1, h2] = h_of(beta[0]);
    return ComplexVec::real({h1, h2});
  };
  prob.pointwise_minimizer = [h_of, gamma](const ComplexVec& mu, const Point& beta) {
    auto [h1, h2] = h_of(beta[0]);
    double c = mu.re[0] * h1 + mu.re[1] * h2;
    if (c == 0.0) return ScalarResult{0.0, 0.0};
    return ScalarResult{c > 0.0 ? -gamma : gamma, -gamma * std::abs(c)};
  };
  prob.g = {[y, epsilon](const ComplexVec& z) { return norm_sq(sub(y, z)) - epsilon; }};
  if (equality_dz) {
    // Exact measurement constraint: z = y, nu eliminated (its supergradient
    // is identically zero, so the ascent moves in mu only).
    prob.dz_solver = [y](const ComplexVec& mu, const std::vector<double>&) {
      DzResult r;
      r.z = y;
      r.value = -inner(mu, y);
      r.slack = {0.0};
      return r;
    };
  } else {
    prob.dz_solver = [y, epsilon](const ComplexVec& mu, const std::vector<double>& nu) {
      return dz_quadratic(y, epsilon, mu, nu[0]);
    };
  }
  return prob;
}

Example1Solution solve_example1(double gamma, double y1, double y2, int steps, double eta0,
                                int cells) {
  SfpProblem p0 = example1_problem(gamma, y1, y2, /*equality_dz=*/true);
  QuadratureScheme scheme = build_composite(p0.domain, cells, QuadRule::Gauss5);

  AscendOptions opts;
  opts.steps = steps;
  opts.eta0 = eta0;
  opts.schedule = StepSchedule::InvSqrt;
  opts.delta_every = 16;

  RecoverOptions ropts;
  ropts.tie_tol = 0.05;

  Example1Solution out;
  auto [pt0, rep0] = ascend(p0, scheme, opts);
  DualEvaluation ev0 = eval_dual(p0, pt0, scheme);
  out.x0 = recover_primal(p0, pt0, ev0, scheme, ropts);
  out.p0_star = *std::max_element(rep0.dual_trace.begin(), rep0.dual_trace.end());
  out.report0 = std::move(rep0);

  SfpProblem p1 = l1_companion(p0);
  auto [pt1, rep1] = ascend(p1, scheme, opts);
  DualEvaluation ev1 = eval_dual(p1, pt1, scheme);
  out.x1 = recover_primal(p1, pt1, ev1, scheme, ropts);
  out.p1_star = *std::max_element(rep1.dual_trace.begin(), rep1.dual_trace.end());
  out.report1 = std::move(rep1);

  out.residual = std::abs(out.p0_star - out.p1_star / gamma);
  return out;
}

std::vector<DualityCheck> run_duality_suite() {
  std::vector<DualityCheck> out;

  auto run_lse = [&](const char* name, const LseDesk& d) {
    SfpProblem prob = build_lse(d.y, d.scene.times, d.opts);
    QuadratureScheme scheme = build_composite(prob.domain, d.cells, QuadRule::Gauss5);
    auto [sol, rep] = solve_approximate(prob, scheme, d.ascent);
    DualityCheck c;
    c.name = name;
    c.gap = rep.final_gap_estimate;
    c.delta = rep.delta_used;
    c.threshold = 2.0 * c.delta + 1e-3;
    c.pass = c.gap <= c.threshold && c.delta <= 1e-4;
    out.push_back(c);
  };
  run_lse("linear-lse-desk", linear_lse_desk());
  run_lse("saturated-lse-desk", saturated_lse_desk());

  RfdaDesk d = rfda_desk();
  SfpProblem prob = build_rfda(d.samples, d.opts);
  QuadratureScheme scheme = build_composite(prob.domain, d.cells, QuadRule::Gauss5);
  RfdaModel model = train_rfda(d.samples, d.opts, scheme, d.ascent);
  DualityCheck c;
  c.name = "synthetic-rfda-desk";
  c.gap = model.gap;
  c.delta = model.report.delta_used;
  c.threshold = 2.0 * c.delta + 1e-3;
  c.pass = c.gap <= c.threshold && c.delta <= 1e-4;
  out.push_back(c);
  return out;
}

ScalingCheck run_scaling_suite(std::uint64_t seed, int n_points) {
  ScalingCheck out;
  Example1Solution ex = solve_example1(1.0, 0.3, -0.2);
  out.p0_star = ex.p0_star;
  out.p1_star = ex.p1_star;
  out.pass_values = std::abs(out.p0_star - 0.5) <= 1e-3 && std::abs(out.p1_star - 0.5) <= 1e-3;

  // Identity residual at random finite dual points, quadratic d_z block.
  SfpProblem prob = example1_problem(1.0, 0.3, -0.2, /*equality_dz=*/false, 0.0);
  // Odd cell count keeps the dictionary jump strictly inside a cell, so the
  // live delta estimate reflects a genuine integration error.
  QuadratureScheme scheme = build_composite(prob.domain, 511, QuadRule::Gauss5);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> um(-3.0, 3.0);
  std::uniform_real_distribution<double> un(0.2, 4.0);
  EvalOptions eo;
  eo.refine_support = false;
  out.pass_residuals = true;
  for (int k = 0; k < n_points; ++k) {
    DualPoint pt(ComplexVec::real({um(rng), um(rng)}), {un(rng)});
    double residual = check_l0_l1_scaling(prob, pt, scheme);
    DualEvaluation ev = eval_dual(prob, pt, scheme, eo);
    double thr = 2.0 * std::max(ev.delta_est, 5e-11);
    out.max_residual = std::max(out.max_residual, residual);
    out.residual_threshold = std::max(out.residual_threshold, thr);
    if (residual > thr) out.pass_residuals = false;
  }
  return out;
}

McCheck run_mc_suite(std::uint64_t seed, int reps, int batch) {
  LseDesk d = linear_lse_desk();
  SfpProblem prob = build_lse(d.y, d.scene.times, d.opts);
  QuadratureScheme scheme = build_composite(prob.domain, 2048, QuadRule::Gauss5);
  const double vol = prob.domain.measure();

  McCheck out;
  out.pass = true;
  const double scales[5] = {0.0, 2.0, 4.0, 8.0, 16.0};
  for (double c : scales) {
    std::vector<double> mu(prob.p);
    for (int i = 0; i < prob.p; ++i) mu[i] = -c * d.y[i];
    DualPoint pt(ComplexVec::real(mu), {1.0 + c});
    EvalOptions eo;
    eo.estimate_delta = false;
    DualEvaluation ev = eval_dual(prob, pt, scheme, eo);
    Supergradient quad = supergradients(prob, pt, ev, scheme);

    McSampler sampler{prob.domain, batch, seed};
    std::vector<double> mean(prob.p, 0.0), m2(prob.p, 0.0);
    for (int rep = 1; rep <= reps; ++rep) {
      std::vector<double> est(prob.p, 0.0);
      for (const Point& b : mc_nodes(sampler, static_cast<std::uint64_t>(rep) + 7919 * c)) {
        ScalarResult sr = prob.pointwise_minimizer(pt.mu, b);
        double margin = sr.value - gamma_zero(prob, pt.mu, b) + prob.lambda;
        ComplexVec F = prob.F(margin < 0.0 ? sr.x_star : 0.0, b);
        for (int i = 0; i < prob.p; ++i) est[i] += vol / batch * F.re[i];
      }
      for (int i = 0; i < prob.p; ++i) est[i] -= ev.dz_minimizer.re[i];
      // Welford accumulation
      for (int i = 0; i < prob.p; ++i) {
        double delta = est[i] - mean[i];
        mean[i] += delta / rep;
        m2[i] += delta * (est[i] - mean[i]);
      }
    }
    for (int i = 0; i < prob.p; ++i) {
      double se = std::sqrt(m2[i] / (reps - 1)) / std::sqrt(static_cast<double>(reps));
      double diff = std::abs(mean[i] - quad.p_mu.re[i]);
      double bound = 4.0 * se + 1e-12;
      out.components_total++;
      if (diff <= bound) {
        out.components_ok++;
      } else {
        out.pass = false;
      }
      if (bound > 0.0) out.worst_ratio = std::max(out.worst_ratio, diff / bound);
    }
  }
  return out;
}

PerturbationCheck run_perturbation_suite() {
  PerturbationCheck out;
  LseDesk d = linear_lse_desk();
  SfpProblem prob = build_lse(d.y, d.scene.times, d.opts);

  // Reference optimum at high resolution.
  QuadratureScheme fine = build_composite(prob.domain, 1024, QuadRule::Gauss5);
  AscendOptions ref_opts = d.ascent;
  ref_opts.steps = 60000;
  auto [ref_sol, ref_rep] = solve_approximate(prob, fine, ref_opts);
  const double p_star = ref_sol.objective_value;

  // Strictly feasible bump representation of the (noiseless) scene for the
  // constant c: X = a/w on [f - w/2, f + w/2].
  const double a = d.scene.amps[0], f = d.scene.freqs[0], w = 0.02;
  auto xdag = [&](double phi) { return (phi >= f - 0.5 * w && phi <= f + 0.5 * w) ? a / w : 0.0; };
  ComplexVec zdag = integrate_vec(fine, prob.p, [&](const Point& b) {
    return prob.F(xdag(b[0]), b);
  });
  double slack = -prob.g[0](zdag);
  double eps_slater = 0.5 * slack;
  double F0_bar = (a / w) * (a / w) * w;
  out.c = error_bound_constant(prob, 1.0, eps_slater, F0_bar);

  // Pick midpoint resolutions whose measured delta lands near the targets.
  auto [ref_pt, ref_rep2] = ascend(prob, fine, ref_opts);
  (void)ref_rep2;
  const double targets[3] = {1e-2, 1e-3, 1e-4};
  EvalOptions eo;
  eo.refine_support = false;
  std::vector<int> chosen;
  for (double target : targets) {
    int best_cells = 2;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int cells = 2; cells <= 4096; cells *= 2) {
      QuadratureScheme s = build_composite(prob.domain, cells, QuadRule::Midpoint);
      DualEvaluation ev = eval_dual(prob, ref_pt, s, eo);
      if (ev.delta_est <= 0.0) continue;
      double dist = std::abs(std::log10(ev.delta_est) - std::log10(target));
      if (dist < best_dist) {
        best_dist = dist;
        best_cells = cells;
      }
    }
    chosen.push_back(best_cells);
  }

  for (int cells : chosen) {
    QuadratureScheme coarse = build_composite(prob.domain, cells, QuadRule::Midpoint);
    AscendOptions copts = d.ascent;
    copts.steps = 60000;
    copts.delta_every = 4;
    auto [sol, rep] = solve_approximate(prob, coarse, copts);
    // Re-measure the returned solution's true value at high precision.
    auto f_in = [&](double b) { return prob.f0(sol.evaluator({b}), {b}); };
    auto f_out = [&](double b) { return prob.f0(0.0, {b}); };
    double p_delta =
        integrate_piecewise(prob.domain, sol.support, f_in, f_out) + prob.lambda * sol.l0;
    out.deltas.push_back(rep.delta_used);
    out.errors.push_back(std::abs(p_star - p_delta));
  }

  // Log-log regression slope.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(out.deltas.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log10(out.deltas[i]);
    double y = std::log10(std::max(out.errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.pass_slope = out.slope >= 0.7 && out.slope <= 1.3;
  out.pass_bound = true;
  for (int i = 0; i < n; ++i) {
    if (out.errors[i] > 1.1 * out.c * out.deltas[i]) out.pass_bound = false;
  }
  return out;
}

}  // namespace sfp::desk
