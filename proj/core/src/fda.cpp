#include "sfp/fda.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "node_cache.hpp"
#include "sfp/scalar_min.hpp"

namespace sfp {

double FunctionalSample::eval(double tau) const {
  if (tau < knots.front() - 1e-12 || tau > knots.back() + 1e-12) {
    throw std::out_of_range("FunctionalSample: evaluation outside [0, 1]");
  }
  tau = std::clamp(tau, knots.front(), knots.back());
  auto it = std::upper_bound(knots.begin(), knots.end(), tau);
  if (it == knots.begin()) return values.front();
  if (it == knots.end()) return values.back();
  size_t j = static_cast<size_t>(it - knots.begin());
  double t0 = knots[j - 1], t1 = knots[j];
  double w = (tau - t0) / (t1 - t0);
  return (1.0 - w) * values[j - 1] + w * values[j];
}

FunctionalSample make_sample(std::vector<double> knots, std::vector<double> values, int label) {
  if (knots.size() != values.size() || knots.size() < 2) {
    throw std::invalid_argument("make_sample: need >= 2 matching knots/values");
  }
  if (!std::is_sorted(knots.begin(), knots.end()) ||
      std::adjacent_find(knots.begin(), knots.end()) != knots.end()) {
    throw std::invalid_argument("make_sample: knots must be strictly increasing");
  }
  if (label != 0 && label != 1) throw std::invalid_argument("make_sample: label must be 0 or 1");
  double t0 = knots.front(), span = knots.back() - knots.front();
  for (double& t : knots) t = (t - t0) / span;
  knots.front() = 0.0;
  knots.back() = 1.0;
  return FunctionalSample{std::move(knots), std::move(values), label};
}

DzLogisticResult dz_logistic(const std::vector<int>& labels, const std::vector<double>& mu,
                             double nu, double eps_tilde) {
  const int p = static_cast<int>(labels.size());
  if (static_cast<int>(mu.size()) != p) {
    throw std::invalid_argument("dz_logistic: labels/mu size mismatch");
  }
  DzLogisticResult res;
  if (!(nu > 0.0)) {
    res.unbounded = true;
    return res;
  }
  double mu_sum = 0.0;
  for (double v : mu) mu_sum += v;
  res.b = -0.5 * mu_sum;

  std::vector<double> zt(p);
  double value = -nu * eps_tilde - 0.25 * mu_sum * mu_sum;
  double loss = 0.0;
  for (int i = 0; i < p; ++i) {
    double s = 1.0 - 2.0 * labels[i];
    double q = mu[i] * s / nu;
    if (!(q > 0.0) || !(q < 1.0)) {
      res.unbounded = true;
      return res;
    }
    double yhat = s * std::log(q / (1.0 - q));
    zt[i] = yhat - res.b;
    // per-coordinate minimum nu*log(1+exp(s yhat)) - mu yhat = nu*H(q)
    value += -nu * (q * std::log(q) + (1.0 - q) * std::log(1.0 - q));
    loss += -std::log(1.0 - q);
  }
  res.z = ComplexVec::real(std::move(zt));
  res.value = value;
  res.slack = {loss - eps_tilde};
  return res;
}

SfpProblem build_rfda(const std::vector<FunctionalSample>& samples, const RfdaOptions& opts) {
  const int p = static_cast<int>(samples.size());
  if (p < 2) throw std::invalid_argument("build_rfda: need at least two samples");
  bool has0 = false, has1 = false;
  std::vector<int> labels(p);
  for (int i = 0; i < p; ++i) {
    labels[i] = samples[i].label;
    (labels[i] == 0 ? has0 : has1) = true;
  }
  if (!has0 || !has1) {
    throw std::invalid_argument("build_rfda: both labels must be present");
  }

  const double r = opts.saturation;
  auto data = std::make_shared<std::vector<FunctionalSample>>(samples);
  auto cache = std::make_shared<detail::BetaVecCache>();
  auto column = [data, cache, p](double tau) -> const std::vector<double>& {
    return cache->get(tau, [data, p](double t) {
      std::vector<double> z(p);
      for (int i = 0; i < p; ++i) z[i] = (*data)[i].eval(t);
      return z;
    });
  };

  SfpProblem prob{Domain::interval(0.0, 1.0)};
  prob.lambda = opts.lambda;
  prob.p = p;
  prob.m = 1;
  prob.f0 = [](double w, const Point&) { return w * w; };
  prob.F = [column, p, r](double w, const Point& beta) {
    const std::vector<double>& z = column(beta[0]);
    ComplexVec out = ComplexVec::zeros(p);
    for (int i = 0; i < p; ++i) out.re[i] = saturate(w * z[i], r);
    return out;
  };
  // Intercept-free view of the constraint, used only by generic fallbacks.
  prob.g = {[labels, eps = opts.eps_tilde](const ComplexVec& z) {
    double loss = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) {
      double s = 1.0 - 2.0 * labels[i];
      loss += std::log1p(std::exp(s * z.re[i]));
    }
    return loss - eps;
  }};

  if (std::isfinite(r)) {
    prob.pointwise_minimizer = [column, p, r](const ComplexVec& mu, const Point& beta) {
      return solve_saturated_cosine(mu.re, column(beta[0]), r);
    };
  } else {
    prob.pointwise_minimizer = [column, p](const ComplexVec& mu, const Point& beta) {
      const std::vector<double>& z = column(beta[0]);
      double c = 0.0;
      for (int i = 0; i < p; ++i) c += mu.re[i] * z[i];
      return solve_quadratic_linear(c, PointwiseSet::all_reals());
    };
    prob.h_eval = [column, p](const Point& beta) {
      return ComplexVec::real(column(beta[0]));
    };
  }

  prob.dz_solver = [labels, eps = opts.eps_tilde](const ComplexVec& mu,
                                                  const std::vector<double>& nu) {
    DzLogisticResult lr = dz_logistic(labels, mu.re, nu[0], eps);
    DzResult r0;
    if (lr.unbounded) return DzResult::unbounded_below(static_cast<int>(labels.size()));
    r0.z = std::move(lr.z);
    r0.value = lr.value;
    r0.slack = std::move(lr.slack);
    return r0;
  };
  return prob;
}

RfdaModel train_rfda(const std::vector<FunctionalSample>& samples, const RfdaOptions& opts,
                     const QuadratureScheme& scheme, const AscendOptions& ascent) {
  SfpProblem prob = build_rfda(samples, opts);

  AscendOptions a = ascent;
  if (!a.init) {
    // mu = 0 sits on the boundary of the logistic dual domain; start at the
    // interior point with every z_i = 0 instead.
    std::vector<double> mu0(prob.p);
    for (int i = 0; i < prob.p; ++i) mu0[i] = 0.5 * (1.0 - 2.0 * samples[i].label);
    a.init = DualPoint(ComplexVec::real(std::move(mu0)), {1.0});
  }

  auto [sol, report] = solve_approximate(prob, scheme, a);

  double mu_sum = 0.0;
  for (double v : sol.dual.mu.re) mu_sum += v;
  double b_train = -0.5 * mu_sum;

  RfdaModel model;
  model.solution = std::move(sol);
  model.report = std::move(report);
  model.intercept_cost = b_train * b_train;
  model.primal_value = model.solution.objective_value + model.intercept_cost;
  double d_best = *std::max_element(model.report.dual_trace.begin(),
                                    model.report.dual_trace.end());
  model.gap = std::abs(model.primal_value - d_best);

  auto eval = model.solution.evaluator;
  model.classifier.weight = [eval](double tau) { return eval({tau}); };
  // Stored with the sign the printed prediction model expects.
  model.classifier.b = -b_train;
  model.classifier.saturation = opts.saturation;
  model.classifier.support = model.solution.support;
  model.classifier.lambda = opts.lambda;
  return model;
}

namespace {

double saturated_inner(const RobustClassifier& clf, const FunctionalSample& sample) {
  double total = 0.0;
  for (const auto& iv : clf.support) {
    int panels = std::clamp(static_cast<int>(std::ceil(iv.measure() * 1024)), 4, 1024);
    double h = iv.measure() / panels;
    for (int c = 0; c < panels; ++c) {
      double tau = iv.lo + (c + 0.5) * h;
      total += h * saturate(sample.eval(tau) * clf.weight(tau), clf.saturation);
    }
  }
  return total;
}

}  // namespace

double predict_proba(const RobustClassifier& clf, const FunctionalSample& sample) {
  double score = saturated_inner(clf, sample) - clf.b;
  return 1.0 / (1.0 + std::exp(-score));
}

std::vector<FunctionalSample> corrupt_impulsive(const std::vector<FunctionalSample>& samples,
                                                double fraction, double magnitude,
                                                std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("corrupt_impulsive: fraction must be in [0, 1]");
  }
  std::vector<FunctionalSample> out = samples;
  for (size_t s = 0; s < out.size(); ++s) {
    std::mt19937_64 rng(mix_seed(seed, s));
    size_t n = out[s].knots.size();
    size_t hits = static_cast<size_t>(std::ceil(fraction * n));
    if (hits == 0 || magnitude == 0.0) continue;
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_int_distribution<int> coin(0, 1);
    for (size_t k = 0; k < hits; ++k) {
      out[s].values[idx[k]] += coin(rng) ? magnitude : -magnitude;
    }
  }
  return out;
}

EvalReport evaluate(const RobustClassifier& clf, const std::vector<FunctionalSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty test set");
  EvalReport rep;
  std::vector<double> scores(samples.size());
  int pos = 0, neg = 0;
  int correct = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    scores[i] = predict_proba(clf, samples[i]);
    (samples[i].label == 1 ? pos : neg)++;
    if ((scores[i] >= 0.5 ? 1 : 0) == samples[i].label) correct++;
  }
  rep.accuracy = static_cast<double>(correct) / samples.size();
  if (pos == 0 || neg == 0) return rep;  // ROC undefined on a single class

  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  rep.roc.push_back({0.0, 0.0});
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    double thr = *it;
    int tp = 0, fp = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
      if (scores[i] >= thr) (samples[i].label == 1 ? tp : fp)++;
    }
    rep.roc.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  rep.roc.push_back({1.0, 1.0});
  for (size_t i = 1; i < rep.roc.size(); ++i) {
    rep.auc += 0.5 * (rep.roc[i].first - rep.roc[i - 1].first) *
               (rep.roc[i].second + rep.roc[i - 1].second);
  }
  rep.roc_defined = true;
  return rep;
}

std::vector<FunctionalSample> make_synthetic_fda(int n, int n_knots, double noise_sd,
                                                 std::uint64_t seed) {
  if (n < 2 || n_knots < 2) throw std::invalid_argument("make_synthetic_fda: n, n_knots too small");
  std::vector<FunctionalSample> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sd);
  for (int s = 0; s < n; ++s) {
    int label = s % 2;
    double sign = label == 1 ? 1.0 : -1.0;
    std::vector<double> knots(n_knots), values(n_knots);
    for (int j = 0; j < n_knots; ++j) {
      double tau = static_cast<double>(j) / (n_knots - 1);
      knots[j] = tau;
      double bump = std::exp(-std::pow((tau - 0.45) / 0.12, 2));
      values[j] = 2.0 * sign * bump + noise(rng);
    }
    out.push_back(FunctionalSample{std::move(knots), std::move(values), label});
  }
  return out;
}

}  // namespace sfp
