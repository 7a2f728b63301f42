#include "sfp/dual_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sfp/scalar_min.hpp"

namespace sfp {

double total_measure(const std::vector<Interval>& intervals) {
  double m = 0.0;
  for (const auto& iv : intervals) m += iv.measure();
  return m;
}

std::vector<Interval> merge_intervals(std::vector<Interval> intervals) {
  if (intervals.empty()) return intervals;
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  out.push_back(intervals.front());
  for (size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, intervals[i].hi);
    } else {
      out.push_back(intervals[i]);
    }
  }
  return out;
}

namespace {

double margin_at(const SfpProblem& problem, const ComplexVec& mu, const Point& beta,
                 double* x_star = nullptr) {
  ScalarResult sr = problem.pointwise_minimizer(mu, beta);
  if (x_star) *x_star = sr.x_star;
  return sr.value - gamma_zero(problem, mu, beta) + problem.lambda;
}

// Boundary of {margin < 0} between positions a and b of opposite class.
double bisect_margin(const SfpProblem& problem, const ComplexVec& mu, double a, double b,
                     bool a_in_support, double tol, double shift = 0.0) {
  while (b - a > tol) {
    double mid = 0.5 * (a + b);
    bool mid_in = margin_at(problem, mu, {mid}) + shift < 0.0;
    if (mid_in == a_in_support) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

std::vector<Interval> refine_support_1d(const SfpProblem& problem, const ComplexVec& mu,
                                        const QuadratureScheme& scheme,
                                        const std::vector<double>& margins, double tol) {
  const double lo = problem.domain.lower(0);
  const double hi = problem.domain.upper(0);
  const size_t n = scheme.nodes.size();
  std::vector<Interval> out;
  bool open = margins[0] < 0.0;
  double start = lo;
  for (size_t j = 0; j + 1 < n; ++j) {
    bool cur_in = margins[j] < 0.0;
    bool nxt_in = margins[j + 1] < 0.0;
    if (cur_in == nxt_in) continue;
    double b = bisect_margin(problem, mu, scheme.nodes[j][0], scheme.nodes[j + 1][0],
                             cur_in, tol);
    if (open) {
      out.push_back({start, b});
      open = false;
    } else {
      start = b;
      open = true;
    }
  }
  if (open) out.push_back({start, hi});
  return out;
}

std::vector<double> default_slack(const SfpProblem& problem, const DzResult& dz) {
  if (!dz.slack.empty()) return dz.slack;
  std::vector<double> s(problem.m);
  for (int i = 0; i < problem.m; ++i) s[i] = problem.g[i](dz.z);
  return s;
}

double dx_on_scheme(const SfpProblem& problem, const ComplexVec& mu,
                    const QuadratureScheme& scheme) {
  double dx = 0.0;
  for (size_t j = 0; j < scheme.nodes.size(); ++j) {
    ScalarResult sr = problem.pointwise_minimizer(mu, scheme.nodes[j]);
    double g0 = gamma_zero(problem, mu, scheme.nodes[j]);
    double m = sr.value - g0 + problem.lambda;
    dx += scheme.weights[j] * (m < 0.0 ? problem.lambda + sr.value : g0);
  }
  return dx;
}

}  // namespace

DualEvaluation eval_dual(const SfpProblem& problem, const DualPoint& point,
                         const QuadratureScheme& scheme, const EvalOptions& opts) {
  for (double v : point.nu) {
    if (v < 0.0) throw std::invalid_argument("eval_dual: nu must be nonnegative");
  }
  DualEvaluation ev;
  DzResult dz = problem.dz_solver(point.mu, point.nu);
  if (dz.unbounded) return ev;  // outside the dual domain
  ev.in_domain = true;
  ev.dz_value = dz.value;
  ev.dz_minimizer = dz.z;
  ev.dz_slack = default_slack(problem, dz);

  const size_t n = scheme.nodes.size();
  ev.node_x.resize(n);
  ev.node_margin.resize(n);
  ev.node_in_support.resize(n);
  double dx = 0.0, mass = 0.0;
  for (size_t j = 0; j < n; ++j) {
    ScalarResult sr = problem.pointwise_minimizer(point.mu, scheme.nodes[j]);
    double g0 = gamma_zero(problem, point.mu, scheme.nodes[j]);
    double m = sr.value - g0 + problem.lambda;
    bool in = m < 0.0;
    dx += scheme.weights[j] * (in ? problem.lambda + sr.value : g0);
    if (in) mass += scheme.weights[j];
    ev.node_x[j] = sr.x_star;
    ev.node_margin[j] = m;
    ev.node_in_support[j] = in ? 1 : 0;
  }
  ev.dx_value = dx;
  ev.node_mass_support = mass;
  ev.value = dz.value + dx;

  if (opts.estimate_delta) {
    ev.delta_est = std::abs(dx - dx_on_scheme(problem, point.mu, scheme.half()));
  }

  if (problem.domain.dim() == 1 && opts.refine_support && n > 0) {
    double tol = opts.boundary_tol * problem.domain.side(0);
    ev.support = refine_support_1d(problem, point.mu, scheme, ev.node_margin, tol);
    ev.support_measure = total_measure(ev.support);
  } else {
    ev.support_measure = mass;
  }
  return ev;
}

DzResult dz_quadratic(const ComplexVec& y, double epsilon, const ComplexVec& mu,
                      double nu) {
  const int p = y.size();
  if (nu < 0.0) throw std::invalid_argument("dz_quadratic: nu must be nonnegative");
  if (nu == 0.0) {
    if (norm_sq(mu) > 0.0) return DzResult::unbounded_below(p);
    DzResult r;
    r.z = y;
    r.value = 0.0;
    r.slack = {-epsilon};
    return r;
  }
  DzResult r;
  r.z = axpy(y, 0.5 / nu, mu);
  r.value = -norm_sq(mu) / (4.0 * nu) - nu * epsilon - inner(mu, y);
  r.slack = {norm_sq(mu) / (4.0 * nu * nu) - epsilon};
  return r;
}

Supergradient supergradients(const SfpProblem& problem, const DualPoint& point,
                             const DualEvaluation& eval, const QuadratureScheme& scheme) {
  if (!eval.in_domain) throw std::logic_error("supergradients: eval is outside the dual domain");
  if (eval.node_x.size() != scheme.nodes.size()) {
    throw std::invalid_argument("supergradients: eval/scheme node count mismatch");
  }
  (void)point;
  Supergradient sg;
  sg.p_mu = ComplexVec::zeros(problem.p);
  for (size_t j = 0; j < scheme.nodes.size(); ++j) {
    double x = eval.node_in_support[j] ? eval.node_x[j] : 0.0;
    ComplexVec Fx = problem.F(x, scheme.nodes[j]);
    for (int i = 0; i < problem.p; ++i) {
      sg.p_mu.re[i] += scheme.weights[j] * Fx.re[i];
      sg.p_mu.im[i] += scheme.weights[j] * Fx.im[i];
    }
  }
  sg.p_mu = sub(sg.p_mu, eval.dz_minimizer);
  sg.p_nu = eval.dz_slack;
  return sg;
}

namespace {

double step_size(const AscendOptions& opts, int t) {
  switch (opts.schedule) {
    case StepSchedule::Constant:
      return opts.eta0;
    case StepSchedule::InvSqrt:
      return opts.eta0 / std::sqrt(static_cast<double>(t));
  }
  return opts.eta0;
}

DualPoint default_init(const SfpProblem& problem) {
  return DualPoint(ComplexVec::zeros(problem.p), std::vector<double>(problem.m, 1.0));
}

DualPoint stepped(const DualPoint& cur, const Supergradient& sg, double eta,
                  double nu_scale) {
  DualPoint next;
  next.mu = axpy(cur.mu, eta, sg.p_mu);
  next.nu = cur.nu;
  for (size_t i = 0; i < next.nu.size(); ++i) {
    next.nu[i] = std::max(0.0, next.nu[i] + eta * nu_scale * sg.p_nu[i]);
  }
  return next;
}

struct IterInfo {
  int t;
  const DualPoint& point;
  const DualEvaluation& eval;
  double eta;
  double delta;
};

std::pair<DualPoint, SolveReport> run_ascent(
    const SfpProblem& problem, const QuadratureScheme& scheme, const AscendOptions& opts,
    const std::function<void(const IterInfo&)>& on_iterate) {
  if (opts.steps < 0) throw std::invalid_argument("ascend: steps must be >= 0");
  if (!(opts.eta0 > 0.0)) throw std::invalid_argument("ascend: eta0 must be positive");

  DualPoint cur = opts.init ? *opts.init : default_init(problem);
  EvalOptions eo;
  eo.refine_support = false;
  eo.estimate_delta = opts.delta_every > 0;
  DualEvaluation ev = eval_dual(problem, cur, scheme, eo);
  if (!ev.in_domain) {
    throw std::runtime_error("ascend: initial point lies outside the dual domain");
  }
  double delta_cur = ev.delta_est;

  SolveReport report;
  report.dual_trace.push_back(ev.value);
  report.eta_trace.push_back(0.0);
  report.support_trace.push_back(ev.node_mass_support);
  report.delta_used = delta_cur;

  DualPoint best = cur;
  double best_v = ev.value;
  report.best_t = 0;
  if (on_iterate) on_iterate({0, cur, ev, 0.0, delta_cur});

  int stall = 0;
  for (int t = 1; t <= opts.steps; ++t) {
    Supergradient sg = supergradients(problem, cur, ev, scheme);
    if (opts.stall_tol > 0.0) {
      double pn = 0.0;
      for (double v : sg.p_nu) pn += std::abs(v);
      if (norm(sg.p_mu) + pn <= opts.stall_tol) {
        if (++stall >= opts.stall_window) break;
      } else {
        stall = 0;
      }
    }

    double eta = step_size(opts, t);
    bool want_delta = opts.delta_every > 0 && (t % opts.delta_every == 0);
    EvalOptions step_eo;
    step_eo.refine_support = false;
    step_eo.estimate_delta = want_delta;

    DualPoint cand;
    DualEvaluation cev;
    bool ok = false;
    for (int attempt = 0; attempt <= opts.backtrack_max; ++attempt) {
      cand = stepped(cur, sg, eta, opts.nu_step_scale);
      cev = eval_dual(problem, cand, scheme, step_eo);
      if (cev.in_domain) {
        ok = true;
        break;
      }
      eta *= 0.5;
    }
    if (!ok) {
      report.backtrack_exhausted = true;
      break;
    }

    cur = std::move(cand);
    ev = std::move(cev);
    if (want_delta) delta_cur = ev.delta_est;
    report.delta_used = std::max(report.delta_used, delta_cur);
    report.dual_trace.push_back(ev.value);
    report.eta_trace.push_back(eta);
    report.support_trace.push_back(ev.node_mass_support);
    report.wall_iterations = t;
    if (ev.value > best_v) {
      best_v = ev.value;
      best = cur;
      report.best_t = t;
    }
    if (on_iterate) on_iterate({t, cur, ev, eta, delta_cur});
  }
  return {best, report};
}

}  // namespace

std::pair<DualPoint, SolveReport> ascend(const SfpProblem& problem,
                                         const QuadratureScheme& scheme,
                                         const AscendOptions& opts) {
  return run_ascent(problem, scheme, opts, nullptr);
}

namespace {

// Composite Gauss-5 on [a, b]; independent of the node-masked scheme path.
double panel_integrate(double a, double b, const std::function<double(double)>& f,
                       int panels) {
  static const double n2 = 0.5384693101056830910363144207;
  static const double n4 = 0.9061798459386639927976268782;
  static const double xs[5] = {-n4, -n2, 0.0, n2, n4};
  static const double ws[5] = {0.2369268850561890875142640407,
                               0.4786286704993664680412915149,
                               0.5688888888888888888888888889,
                               0.4786286704993664680412915149,
                               0.2369268850561890875142640407};
  double h = (b - a) / panels;
  double s = 0.0;
  for (int c = 0; c < panels; ++c) {
    double mid = a + (c + 0.5) * h;
    for (int k = 0; k < 5; ++k) s += 0.5 * h * ws[k] * f(mid + 0.5 * h * xs[k]);
  }
  return s;
}

ComplexVec panel_integrate_vec(double a, double b, int p,
                               const std::function<ComplexVec(double)>& f, int panels) {
  static const double n2 = 0.5384693101056830910363144207;
  static const double n4 = 0.9061798459386639927976268782;
  static const double xs[5] = {-n4, -n2, 0.0, n2, n4};
  static const double ws[5] = {0.2369268850561890875142640407,
                               0.4786286704993664680412915149,
                               0.5688888888888888888888888889,
                               0.4786286704993664680412915149,
                               0.2369268850561890875142640407};
  ComplexVec acc = ComplexVec::zeros(p);
  double h = (b - a) / panels;
  for (int c = 0; c < panels; ++c) {
    double mid = a + (c + 0.5) * h;
    for (int k = 0; k < 5; ++k) {
      ComplexVec v = f(mid + 0.5 * h * xs[k]);
      for (int i = 0; i < p; ++i) {
        acc.re[i] += 0.5 * h * ws[k] * v.re[i];
        acc.im[i] += 0.5 * h * ws[k] * v.im[i];
      }
    }
  }
  return acc;
}

int panels_for(double len, double side, int per_unit) {
  int n = static_cast<int>(std::ceil(len * per_unit / std::max(side, 1e-300)));
  return std::clamp(n, 2, 4096);
}

// min_{0 <= a <= 1} |sum_r a_r c_r - rhs|^2 by projected gradient; tiny R.
std::vector<double> bounded_lsq01(const std::vector<std::vector<double>>& cols,
                                  const std::vector<double>& rhs) {
  const size_t R = cols.size();
  std::vector<double> alpha(R, 0.5);
  if (R == 0) return alpha;
  double L = 0.0;
  for (const auto& c : cols) {
    double n2 = 0.0;
    for (double v : c) n2 += v * v;
    L += n2;
  }
  if (L <= 0.0) return alpha;
  const size_t dim = rhs.size();
  std::vector<double> resid(dim);
  for (int it = 0; it < 4000; ++it) {
    for (size_t k = 0; k < dim; ++k) {
      double s = -rhs[k];
      for (size_t r = 0; r < R; ++r) s += alpha[r] * cols[r][k];
      resid[k] = s;
    }
    double move = 0.0;
    for (size_t r = 0; r < R; ++r) {
      double gr = 0.0;
      for (size_t k = 0; k < dim; ++k) gr += cols[r][k] * resid[k];
      double next = std::clamp(alpha[r] - gr / L, 0.0, 1.0);
      move += std::abs(next - alpha[r]);
      alpha[r] = next;
    }
    if (move < 1e-14) break;
  }
  return alpha;
}

std::vector<double> stack_realimag(const ComplexVec& v) {
  std::vector<double> out;
  out.reserve(2 * v.size());
  out.insert(out.end(), v.re.begin(), v.re.end());
  out.insert(out.end(), v.im.begin(), v.im.end());
  return out;
}

// Nonzero-branch candidate used to resolve degenerate regions. For linear
// magnitude-bounded dictionaries this is the saturated point +-Gamma.
double nonzero_candidate(const SfpProblem& problem, const ComplexVec& mu, double beta,
                         double x_star) {
  if (std::abs(x_star) > 1e-12) return x_star;
  if (problem.h_eval && problem.pointwise_set.bounded()) {
    double c = inner(mu, problem.h_eval({beta}));
    double G = problem.pointwise_set.bound();
    return c > 0.0 ? -G : G;
  }
  return x_star;
}

struct TiedRegion {
  Interval region;
  ComplexVec contribution;  // int_region (F[x_nz] - F(0))
};

// Splits a degenerate run wherever the integrand F[x_nz(b), b] jumps
// (dictionary discontinuities, sign flips); localizes the jump by interval
// subdivision.
std::vector<Interval> split_at_integrand_jumps(const SfpProblem& problem,
                                               const ComplexVec& mu, Interval run,
                                               double tol) {
  auto probe = [&](double b) {
    double xs = 0.0;
    margin_at(problem, mu, {b}, &xs);
    ComplexVec F1 = problem.F(nonzero_candidate(problem, mu, b, xs), {b});
    return F1;
  };
  auto differs = [&](const ComplexVec& a, const ComplexVec& b) {
    double d = norm_sq(sub(a, b));
    double s = std::max(norm_sq(a), norm_sq(b));
    return d > 0.25 * s && s > 0.0;
  };

  std::vector<double> cuts;
  std::vector<std::pair<Interval, ComplexVec>> work{{run, probe(run.lo)}};
  // Each work item carries the integrand at its left end; recurse while the
  // right end disagrees.
  int guard = 0;
  while (!work.empty() && ++guard < 256) {
    auto [iv, leftF] = work.back();
    work.pop_back();
    ComplexVec rightF = probe(iv.hi);
    if (!differs(leftF, rightF)) continue;
    if (iv.measure() <= tol) {
      cuts.push_back(0.5 * (iv.lo + iv.hi));
      continue;
    }
    double mid = 0.5 * (iv.lo + iv.hi);
    work.push_back({{iv.lo, mid}, leftF});
    work.push_back({{mid, iv.hi}, probe(mid)});
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> out;
  double start = run.lo;
  for (double c : cuts) {
    out.push_back({start, c});
    start = c;
  }
  out.push_back({start, run.hi});
  return out;
}

}  // namespace

double integrate_piecewise(const Domain& domain, const std::vector<Interval>& support,
                           const std::function<double(double)>& f_in,
                           const std::function<double(double)>& f_out,
                           int panels_per_unit) {
  if (domain.dim() != 1) throw std::logic_error("integrate_piecewise: 1-D domains only");
  double side = domain.side(0);
  double total = 0.0;
  double cursor = domain.lower(0);
  auto sorted = merge_intervals(support);
  for (const auto& iv : sorted) {
    if (iv.lo > cursor) {
      total += panel_integrate(cursor, iv.lo, f_out, panels_for(iv.lo - cursor, side, panels_per_unit));
    }
    if (iv.hi > iv.lo) {
      total += panel_integrate(iv.lo, iv.hi, f_in, panels_for(iv.measure(), side, panels_per_unit));
    }
    cursor = std::max(cursor, iv.hi);
  }
  if (cursor < domain.upper(0)) {
    total += panel_integrate(cursor, domain.upper(0), f_out,
                             panels_for(domain.upper(0) - cursor, side, panels_per_unit));
  }
  return total;
}

PrimalSolution recover_primal(const SfpProblem& problem, const DualPoint& point,
                              const DualEvaluation& eval, const QuadratureScheme& scheme,
                              const RecoverOptions& opts) {
  if (!eval.in_domain) throw std::logic_error("recover_primal: eval outside the dual domain");
  if (problem.domain.dim() != 1) throw std::logic_error("recover_primal: 1-D domains only");

  const ComplexVec mu = point.mu;
  const double side = problem.domain.side(0);
  const double btol = 1e-6 * side;

  std::vector<Interval> support = eval.support;
  std::vector<std::pair<Interval, double>> tie_included;  // (region, alpha)

  if (opts.tie_tol > 0.0) {
    // Three-way node classification: strict support, tied, off.
    const auto& margins = eval.node_margin;
    const size_t n = scheme.nodes.size();
    auto cls = [&](double m) { return m < -opts.tie_tol ? 0 : (m <= opts.tie_tol ? 1 : 2); };
    std::vector<Interval> strict, tied;
    size_t j = 0;
    double start = problem.domain.lower(0);
    int cur = cls(margins[0]);
    auto boundary_between = [&](size_t a, int ca, int cb) {
      // Refine on the threshold separating the two classes.
      double shift = (std::min(ca, cb) == 0) ? opts.tie_tol : -opts.tie_tol;
      bool left_below = cls(margins[a]) == std::min(ca, cb);
      return bisect_margin(problem, mu, scheme.nodes[a][0], scheme.nodes[a + 1][0],
                           left_below, btol, shift);
    };
    for (j = 0; j + 1 < n; ++j) {
      int nxt = cls(margins[j + 1]);
      if (nxt == cur) continue;
      double b = boundary_between(j, cur, nxt);
      Interval seg{start, b};
      if (cur == 0) strict.push_back(seg);
      if (cur == 1) tied.push_back(seg);
      start = b;
      cur = nxt;
    }
    Interval last{start, problem.domain.upper(0)};
    if (cur == 0) strict.push_back(last);
    if (cur == 1) tied.push_back(last);

    if (!tied.empty()) {
      // Split degenerate runs at dictionary jumps, then choose the included
      // fraction of each region so the measurements match z*.
      std::vector<TiedRegion> regions;
      for (const auto& run : tied) {
        for (const auto& piece : split_at_integrand_jumps(problem, mu, run, btol)) {
          if (piece.measure() <= btol) continue;
          auto f_nz = [&](double b) {
            double xs = 0.0;
            margin_at(problem, mu, {b}, &xs);
            double x = nonzero_candidate(problem, mu, b, xs);
            return sub(problem.F(x, {b}), problem.F(0.0, {b}));
          };
          TiedRegion tr;
          tr.region = piece;
          tr.contribution = panel_integrate_vec(piece.lo, piece.hi, problem.p, f_nz,
                                                panels_for(piece.measure(), side, 2048));
          regions.push_back(std::move(tr));
        }
      }
      // base = int F with only the strict support active.
      auto f_strict = [&](double b) {
        for (const auto& iv : strict) {
          if (b >= iv.lo && b <= iv.hi) {
            double xs = 0.0;
            margin_at(problem, mu, {b}, &xs);
            return problem.F(xs, {b});
          }
        }
        return problem.F(0.0, {b});
      };
      ComplexVec base = panel_integrate_vec(problem.domain.lower(0), problem.domain.upper(0),
                                            problem.p, f_strict, panels_for(side, side, 2048));
      std::vector<std::vector<double>> cols;
      for (const auto& r : regions) cols.push_back(stack_realimag(r.contribution));
      std::vector<double> rhs = stack_realimag(sub(eval.dz_minimizer, base));
      std::vector<double> alpha = bounded_lsq01(cols, rhs);

      support = strict;
      for (size_t r = 0; r < regions.size(); ++r) {
        if (alpha[r] * regions[r].region.measure() <= btol) continue;
        Interval inc{regions[r].region.lo,
                     regions[r].region.lo + alpha[r] * regions[r].region.measure()};
        support.push_back(inc);
        tie_included.push_back({regions[r].region, alpha[r]});
      }
      support = merge_intervals(support);
    }
  }

  PrimalSolution sol;
  sol.support = support;
  sol.l0 = total_measure(support);
  sol.measurements = eval.dz_minimizer;
  sol.dual = point;

  auto support_copy = support;
  auto tie_copy = tie_included;
  SfpProblem const* prob = &problem;
  double tie_tol = opts.tie_tol;
  sol.evaluator = [prob, mu, support_copy, tie_copy, tie_tol](const Point& beta) {
    double b = beta[0];
    bool inside = false;
    for (const auto& iv : support_copy) {
      if (b >= iv.lo && b <= iv.hi) {
        inside = true;
        break;
      }
    }
    if (!inside) return 0.0;
    double xs = 0.0;
    double m = margin_at(*prob, mu, beta, &xs);
    if (tie_tol > 0.0 && std::abs(m) <= tie_tol) {
      return nonzero_candidate(*prob, mu, b, xs);
    }
    return xs;
  };

  auto f_in = [&](double b) { return problem.f0(sol.evaluator({b}), {b}); };
  auto f_out = [&](double b) { return problem.f0(0.0, {b}); };
  sol.objective_value =
      integrate_piecewise(problem.domain, support, f_in, f_out) + problem.lambda * sol.l0;

  if (opts.output_grid > 1) {
    sol.grid.reserve(opts.output_grid);
    for (int i = 0; i < opts.output_grid; ++i) {
      double b = problem.domain.lower(0) + side * i / (opts.output_grid - 1);
      sol.grid.emplace_back(b, sol.evaluator({b}));
    }
  }
  return sol;
}

std::pair<PrimalSolution, SolveReport> solve_approximate(const SfpProblem& problem,
                                                         const QuadratureScheme& scheme,
                                                         const AscendOptions& opts,
                                                         const RecoverOptions& ropts) {
  struct Accepted {
    DualPoint point;
    double d = 0.0;
  };
  Accepted acc;
  std::vector<int> accepted_ts;
  bool have_initial = false;

  auto hook = [&](const IterInfo& info) {
    if (info.t == 0) {
      acc.point = info.point;
      acc.d = info.eval.value;
      have_initial = true;
      return;
    }
    if (info.eval.value > acc.d + 2.0 * info.delta) {
      acc.point = info.point;
      acc.d = info.eval.value;
      accepted_ts.push_back(info.t);
    }
  };
  auto [best, report] = run_ascent(problem, scheme, opts, hook);
  (void)best;
  if (!have_initial) throw std::logic_error("solve_approximate: no initial iterate");
  report.accepted_iterations = accepted_ts;

  EvalOptions eo;
  eo.estimate_delta = true;
  DualEvaluation final_ev = eval_dual(problem, acc.point, scheme, eo);
  PrimalSolution sol = recover_primal(problem, acc.point, final_ev, scheme, ropts);
  double d_best = *std::max_element(report.dual_trace.begin(), report.dual_trace.end());
  report.final_gap_estimate = std::abs(sol.objective_value - d_best);
  report.delta_used = std::max(report.delta_used, final_ev.delta_est);
  return {std::move(sol), std::move(report)};
}

std::pair<PrimalSolution, SolveReport> solve_stochastic(
    const SfpProblem& problem, const McSampler& sampler, const AscendOptions& opts,
    const QuadratureScheme& quad_for_reporting, const RecoverOptions& ropts) {
  if (sampler.batch_size < 1) throw std::invalid_argument("solve_stochastic: N >= 1 required");

  DualPoint cur = opts.init ? *opts.init : default_init(problem);
  EvalOptions eo;
  eo.refine_support = false;
  eo.estimate_delta = false;
  DualEvaluation ev = eval_dual(problem, cur, quad_for_reporting, eo);
  if (!ev.in_domain) {
    throw std::runtime_error("solve_stochastic: initial point lies outside the dual domain");
  }

  SolveReport report;
  report.dual_trace.push_back(ev.value);
  report.eta_trace.push_back(0.0);
  report.support_trace.push_back(ev.node_mass_support);
  report.best_t = 0;
  double best_v = ev.value;

  const double vol = problem.domain.measure();
  std::vector<DualPoint> retained;

  auto mc_supergradient = [&](const DualPoint& at, const DualEvaluation& at_ev,
                              std::uint64_t t) {
    Supergradient sg;
    sg.p_mu = ComplexVec::zeros(problem.p);
    auto nodes = mc_nodes(McSampler{sampler.domain, sampler.batch_size, sampler.seed}, t);
    for (const auto& b : nodes) {
      double xs = 0.0;
      double m = margin_at(problem, at.mu, b, &xs);
      ComplexVec Fx = problem.F(m < 0.0 ? xs : 0.0, b);
      for (int i = 0; i < problem.p; ++i) {
        sg.p_mu.re[i] += vol / sampler.batch_size * Fx.re[i];
        sg.p_mu.im[i] += vol / sampler.batch_size * Fx.im[i];
      }
    }
    sg.p_mu = sub(sg.p_mu, at_ev.dz_minimizer);
    sg.p_nu = at_ev.dz_slack;
    return sg;
  };

  for (int t = 1; t <= opts.steps; ++t) {
    Supergradient sg = mc_supergradient(cur, ev, static_cast<std::uint64_t>(t));
    double eta = step_size(opts, t);
    DualPoint cand;
    DualEvaluation cev;
    bool ok = false;
    for (int attempt = 0; attempt <= opts.backtrack_max; ++attempt) {
      cand = stepped(cur, sg, eta, opts.nu_step_scale);
      cev = eval_dual(problem, cand, quad_for_reporting, eo);
      if (cev.in_domain) {
        ok = true;
        break;
      }
      eta *= 0.5;
    }
    if (!ok) {
      report.backtrack_exhausted = true;
      break;
    }
    double d_prev = report.dual_trace.back();
    cur = std::move(cand);
    ev = std::move(cev);
    report.dual_trace.push_back(ev.value);
    report.eta_trace.push_back(eta);
    report.support_trace.push_back(ev.node_mass_support);
    report.wall_iterations = t;
    if (ev.value > best_v) {
      best_v = ev.value;
      report.best_t = t;
    }
    if (ev.value > d_prev) {
      retained.push_back(cur);
      report.accepted_iterations.push_back(t);
    }
  }

  if (retained.empty()) {
    throw std::runtime_error("solve_stochastic: no accepted iterate");
  }

  // Pointwise average of the retained solutions; support is the union of
  // their refined supports.
  std::vector<Interval> union_support;
  EvalOptions ref_eo;
  ref_eo.estimate_delta = false;
  std::vector<DualEvaluation> revals;
  revals.reserve(retained.size());
  for (const auto& pt : retained) {
    DualEvaluation re = eval_dual(problem, pt, quad_for_reporting, ref_eo);
    union_support.insert(union_support.end(), re.support.begin(), re.support.end());
    revals.push_back(std::move(re));
  }
  union_support = merge_intervals(union_support);

  SfpProblem const* prob = &problem;
  auto pts = retained;
  auto average_eval = [prob, pts](const Point& beta) {
    double s = 0.0;
    for (const auto& pt : pts) {
      double xs = 0.0;
      double m = margin_at(*prob, pt.mu, beta, &xs);
      if (m < 0.0) s += xs;
    }
    return s / pts.size();
  };

  PrimalSolution sol;
  sol.evaluator = average_eval;
  sol.support = union_support;
  sol.l0 = total_measure(union_support);
  sol.dual = retained.back();
  auto f_in = [&](double b) { return problem.f0(average_eval({b}), {b}); };
  auto f_out = [&](double b) { return problem.f0(0.0, {b}); };
  sol.objective_value =
      integrate_piecewise(problem.domain, union_support, f_in, f_out) + problem.lambda * sol.l0;
  sol.measurements = integrate_vec(quad_for_reporting, problem.p, [&](const Point& b) {
    return problem.F(average_eval(b), b);
  });
  if (ropts.output_grid > 1) {
    double side = problem.domain.side(0);
    for (int i = 0; i < ropts.output_grid; ++i) {
      double b = problem.domain.lower(0) + side * i / (ropts.output_grid - 1);
      sol.grid.emplace_back(b, average_eval({b}));
    }
  }
  double d_best = *std::max_element(report.dual_trace.begin(), report.dual_trace.end());
  report.final_gap_estimate = std::abs(sol.objective_value - d_best);
  return {std::move(sol), std::move(report)};
}

SfpProblem l1_companion(const SfpProblem& problem) {
  if (!problem.pointwise_set.bounded()) {
    throw std::invalid_argument("l1_companion: requires a magnitude-bounded pointwise set");
  }
  const double G = problem.pointwise_set.bound();
  SfpProblem q = problem;
  q.lambda = 0.0;
  q.f0 = [](double x, const Point&) { return std::abs(x); };
  if (problem.h_eval) {
    auto h = problem.h_eval;
    q.pointwise_minimizer = [h, G](const ComplexVec& mu, const Point& beta) {
      double c = inner(mu, h(beta));
      if (std::abs(c) > 1.0) {
        double x = c > 0.0 ? -G : G;
        return ScalarResult{x, G * (1.0 - std::abs(c))};
      }
      return ScalarResult{0.0, 0.0};
    };
  } else {
    auto F = problem.F;
    auto set = problem.pointwise_set;
    q.pointwise_minimizer = [F, set](const ComplexVec& mu, const Point& beta) {
      auto obj = [&](double x) { return std::abs(x) + inner(mu, F(x, beta)); };
      return solve_generic(obj, set, set.bound(), 2001, 1e-10);
    };
  }
  return q;
}

double eval_dual_l1(const SfpProblem& problem, const DualPoint& point,
                    const QuadratureScheme& scheme) {
  SfpProblem q = l1_companion(problem);
  EvalOptions eo;
  eo.estimate_delta = false;
  eo.refine_support = false;
  DualEvaluation ev = eval_dual(q, point, scheme, eo);
  if (!ev.in_domain) {
    throw std::runtime_error("eval_dual_l1: point outside the dual domain");
  }
  return ev.value;
}

double check_l0_l1_scaling(const SfpProblem& problem, const DualPoint& point,
                           const QuadratureScheme& scheme) {
  if (!problem.pointwise_set.bounded()) {
    throw std::invalid_argument("check_l0_l1_scaling: requires a magnitude-bounded set");
  }
  if (std::abs(problem.lambda - 1.0) > 1e-12) {
    throw std::invalid_argument("check_l0_l1_scaling: requires the pure L0 form (lambda = 1)");
  }
  const double G = problem.pointwise_set.bound();
  SfpProblem q = l1_companion(problem);

  // Saturation probe: the L1 pointwise minimizer must be 0 or +-Gamma.
  for (size_t j = 0; j < scheme.nodes.size(); j += std::max<size_t>(1, scheme.nodes.size() / 64)) {
    ScalarResult sr = q.pointwise_minimizer(point.mu, scheme.nodes[j]);
    if (std::abs(sr.x_star) > 1e-10 && std::abs(std::abs(sr.x_star) - G) > 1e-8 * G) {
      throw std::runtime_error(
          "check_l0_l1_scaling: saturation hypothesis fails at beta=" +
          std::to_string(scheme.nodes[j][0]) + " (|mu|=" + std::to_string(norm(point.mu)) +
          ", x=" + std::to_string(sr.x_star) + ")");
    }
  }

  EvalOptions eo;
  eo.estimate_delta = false;
  eo.refine_support = false;
  DualEvaluation d0 = eval_dual(problem, point, scheme, eo);
  if (!d0.in_domain) throw std::runtime_error("check_l0_l1_scaling: point outside dual domain");
  std::vector<double> nu_scaled = point.nu;
  for (double& v : nu_scaled) v *= G;
  DualPoint scaled_pt(scaled(point.mu, G), nu_scaled);
  double d1 = eval_dual_l1(problem, scaled_pt, scheme);
  return std::abs(d0.value - d1 / G);
}

double error_bound_constant(const SfpProblem& problem, double alpha, double eps_slater,
                            double F0_bar) {
  if (!(alpha > 0.0)) throw std::invalid_argument("error_bound_constant: alpha must be positive");
  if (!(eps_slater > 0.0)) {
    throw std::invalid_argument("error_bound_constant: eps_slater must be positive");
  }
  ComplexVec plus = ComplexVec::real(std::vector<double>(problem.p, alpha));
  ComplexVec minus = ComplexVec::real(std::vector<double>(problem.p, -alpha));
  double sp = 0.0, sm = 0.0;
  for (int i = 0; i < problem.m; ++i) {
    sp += problem.g[i](plus);
    sm += problem.g[i](minus);
  }
  if (!std::isfinite(sp) || !std::isfinite(sm)) {
    throw std::invalid_argument(
        "error_bound_constant: g is not finite at +-alpha*1; try a different alpha");
  }
  double front = (F0_bar + problem.lambda * problem.domain.measure()) / (alpha * eps_slater);
  return front * std::max(std::abs(sm), std::abs(sp));
}

}  // namespace sfp
