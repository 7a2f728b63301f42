#include "sfp/domain.hpp"

#include <cmath>

namespace sfp {

Domain::Domain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw std::invalid_argument("Domain: lower/upper must be nonempty and equally sized");
  }
  for (size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw std::invalid_argument("Domain: requires lower[i] < upper[i]");
    }
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw std::invalid_argument("Domain: bounds must be finite");
    }
  }
}

double Domain::measure() const {
  double m = 1.0;
  for (int i = 0; i < dim(); ++i) m *= side(i);
  return m;
}

bool Domain::contains(const Point& beta, double tol) const {
  if (static_cast<int>(beta.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (beta[i] < lower_[i] - tol || beta[i] > upper_[i] + tol) return false;
  }
  return true;
}

ComplexVec::ComplexVec(std::vector<double> r, std::vector<double> i)
    : re(std::move(r)), im(std::move(i)) {
  if (re.size() != im.size()) {
    throw std::invalid_argument("ComplexVec: re/im length mismatch");
  }
}

double inner(const ComplexVec& a, const ComplexVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.re[i] * b.re[i] + a.im[i] * b.im[i];
  return s;
}

double norm_sq(const ComplexVec& v) { return inner(v, v); }

double norm(const ComplexVec& v) { return std::sqrt(norm_sq(v)); }

ComplexVec axpy(const ComplexVec& a, double s, const ComplexVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("axpy: size mismatch");
  ComplexVec out = a;
  for (int i = 0; i < a.size(); ++i) {
    out.re[i] += s * b.re[i];
    out.im[i] += s * b.im[i];
  }
  return out;
}

ComplexVec scaled(const ComplexVec& v, double s) {
  ComplexVec out = v;
  for (int i = 0; i < v.size(); ++i) {
    out.re[i] *= s;
    out.im[i] *= s;
  }
  return out;
}

ComplexVec sub(const ComplexVec& a, const ComplexVec& b) { return axpy(a, -1.0, b); }

DualPoint::DualPoint(ComplexVec m, std::vector<double> n)
    : mu(std::move(m)), nu(std::move(n)) {
  for (double v : nu) {
    if (v < 0.0) throw std::invalid_argument("DualPoint: nu must be nonnegative");
  }
}

PointwiseSet PointwiseSet::magnitude_bound(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("PointwiseSet: bound must be positive");
  return PointwiseSet(Kind::MagnitudeBound, gamma);
}

double PointwiseSet::bound() const {
  if (kind_ != Kind::MagnitudeBound) {
    throw std::logic_error("PointwiseSet: bound() on an unbounded set");
  }
  return bound_;
}

bool PointwiseSet::contains(double x) const {
  if (kind_ == Kind::AllReals) return true;
  return std::abs(x) <= bound_;
}

double PointwiseSet::clip(double x) const {
  if (kind_ == Kind::AllReals) return x;
  if (x > bound_) return bound_;
  if (x < -bound_) return -bound_;
  return x;
}

double gamma_zero(const SfpProblem& problem, const ComplexVec& mu, const Point& beta) {
  return problem.f0(0.0, beta) + inner(mu, problem.F(0.0, beta));
}

bool weak_duality_witness(const SfpProblem&, double feasible_primal_value,
                          double dual_value, double tol) {
  return dual_value <= feasible_primal_value + tol;
}

}  // namespace sfp
