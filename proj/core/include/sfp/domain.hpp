#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace sfp {

/// A point in the parameter domain. Both shipped applications are 1-D, but
/// the types carry arbitrary box dimensions.
using Point = std::vector<double>;

/// Compact box [lower_1, upper_1] x ... x [lower_n, upper_n] with positive
/// measure.
class Domain {
 public:
  Domain(std::vector<double> lower, std::vector<double> upper);

  static Domain interval(double lo, double hi) { return Domain({lo}, {hi}); }

  int dim() const { return static_cast<int>(lower_.size()); }
  double lower(int i) const { return lower_[i]; }
  double upper(int i) const { return upper_[i]; }
  double side(int i) const { return upper_[i] - lower_[i]; }
  double measure() const;
  bool contains(const Point& beta, double tol = 0.0) const;

 private:
  std::vector<double> lower_, upper_;
};

/// Complex vector stored as an explicit real/imaginary split. All dual
/// arithmetic happens on this split so the dual stays a real vector space.
struct ComplexVec {
  std::vector<double> re, im;

  ComplexVec() = default;
  ComplexVec(std::vector<double> r, std::vector<double> i);
  static ComplexVec zeros(int p) {
    return ComplexVec(std::vector<double>(p, 0.0), std::vector<double>(p, 0.0));
  }
  static ComplexVec real(std::vector<double> r) {
    std::vector<double> i(r.size(), 0.0);
    return ComplexVec(std::move(r), std::move(i));
  }

  int size() const { return static_cast<int>(re.size()); }
};

/// Re[a^H b] on the split representation.
double inner(const ComplexVec& a, const ComplexVec& b);
double norm_sq(const ComplexVec& v);
double norm(const ComplexVec& v);
/// a + s*b
ComplexVec axpy(const ComplexVec& a, double s, const ComplexVec& b);
ComplexVec scaled(const ComplexVec& v, double s);
ComplexVec sub(const ComplexVec& a, const ComplexVec& b);

/// Multiplier state of the dual solver: complex mu for the measurement
/// equality, nonnegative nu for the inequality constraints.
struct DualPoint {
  ComplexVec mu;
  std::vector<double> nu;

  DualPoint() = default;
  DualPoint(ComplexVec m, std::vector<double> n);
};

/// Pointwise constraint set P for X(beta). Always contains 0.
class PointwiseSet {
 public:
  enum class Kind { AllReals, MagnitudeBound };

  static PointwiseSet all_reals() { return PointwiseSet(Kind::AllReals, 0.0); }
  static PointwiseSet magnitude_bound(double gamma);

  Kind kind() const { return kind_; }
  bool bounded() const { return kind_ == Kind::MagnitudeBound; }
  double bound() const;
  bool contains(double x) const;
  /// Clip x into the set (identity for the unbounded set).
  double clip(double x) const;

 private:
  PointwiseSet(Kind k, double b) : kind_(k), bound_(b) {}
  Kind kind_;
  double bound_;
};

/// Result of the per-beta scalar minimization: the minimizer and the value
/// gamma_o(mu, beta).
struct ScalarResult {
  double x_star = 0.0;
  double value = 0.0;
};

/// Result of the finite-dimensional convex d_z subproblem. `unbounded` marks
/// points outside the dual domain (d_z = -inf); `slack` holds g_i evaluated
/// at the block minimizer, which may differ from g_i(z) when the block
/// carries auxiliary variables (the logistic intercept).
struct DzResult {
  ComplexVec z;
  double value = 0.0;
  std::vector<double> slack;
  bool unbounded = false;

  static DzResult unbounded_below(int p) {
    DzResult r;
    r.z = ComplexVec::zeros(p);
    r.unbounded = true;
    return r;
  }
};

/// Full description of one sparse functional program:
///
///   minimize    int F0[X(b), b] db + lambda * m(supp X)
///   subject to  g_i(z) <= 0,  z = int F[X(b), b] db,  X(b) in P a.e.
///
/// The two hooks let applications inject closed-form scalar and d_z solvers;
/// generic fallbacks live in scalar_min and dual_engine.
struct SfpProblem {
  Domain domain;
  double lambda = 0.0;
  int p = 0;
  int m = 0;

  std::function<double(double, const Point&)> f0;
  std::function<ComplexVec(double, const Point&)> F;
  std::vector<std::function<double(const ComplexVec&)>> g;
  PointwiseSet pointwise_set = PointwiseSet::all_reals();

  /// Solves min_{x in P} F0(x,b) + Re[mu^H F(x,b)] exactly or via the
  /// generic scalar solver. Must satisfy value <= gamma_zero whenever 0 in P.
  std::function<ScalarResult(const ComplexVec&, const Point&)> pointwise_minimizer;

  /// Solves min_z sum_i nu_i g_i(z) - Re[mu^H z] (plus any absorbed
  /// auxiliary block).
  std::function<DzResult(const ComplexVec&, const std::vector<double>&)> dz_solver;

  /// Optional: for linear dictionaries F(x,b) = x*h(b), evaluates h(b).
  /// Enables closed-form L1 companions and degenerate-support resolution.
  std::function<ComplexVec(const Point&)> h_eval;
};

/// gamma^(0)(mu, beta) = F0(0, beta) + Re[mu^H F(0, beta)].
double gamma_zero(const SfpProblem& problem, const ComplexVec& mu, const Point& beta);

/// Weak duality check: dual_value <= feasible_primal_value + tol.
bool weak_duality_witness(const SfpProblem& problem, double feasible_primal_value,
                          double dual_value, double tol = 0.0);

}  // namespace sfp
