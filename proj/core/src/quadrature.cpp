#include "sfp/quadrature.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sfp {

namespace {

struct Rule1D {
  std::vector<double> points;   // on [-1/2, 1/2] relative to cell center
  std::vector<double> weights;  // sum to 1
};

Rule1D make_rule(QuadRule rule) {
  if (rule == QuadRule::Midpoint) return {{0.0}, {1.0}};
  // 5-point Gauss-Legendre, rescaled from [-1,1].
  const double n2 = 0.5384693101056830910363144207;
  const double n4 = 0.9061798459386639927976268782;
  const double w0 = 0.5688888888888888888888888889;
  const double w2 = 0.4786286704993664680412915149;
  const double w4 = 0.2369268850561890875142640407;
  return {{-0.5 * n4, -0.5 * n2, 0.0, 0.5 * n2, 0.5 * n4},
          {0.5 * w4, 0.5 * w2, 0.5 * w0, 0.5 * w2, 0.5 * w4}};
}

}  // namespace

QuadratureScheme QuadratureScheme::half() const {
  return build_composite(domain, std::max(1, cells_per_dim / 2), rule);
}

QuadratureScheme build_composite(const Domain& domain, int cells_per_dim, QuadRule rule,
                                 const std::function<double(const Point&)>& probe) {
  if (cells_per_dim < 1) throw std::invalid_argument("build_composite: cells_per_dim < 1");
  const int n = domain.dim();
  const Rule1D r1 = make_rule(rule);
  const int q = static_cast<int>(r1.points.size());

  QuadratureScheme scheme{domain, cells_per_dim, rule, {}, {}, 0.0};

  // Tensor product over dimensions; cells and rule points in lexicographic
  // order, which keeps 1-D nodes ascending.
  long total_cells = 1;
  for (int d = 0; d < n; ++d) total_cells *= cells_per_dim;
  long pts_per_cell = 1;
  for (int d = 0; d < n; ++d) pts_per_cell *= q;

  scheme.nodes.reserve(total_cells * pts_per_cell);
  scheme.weights.reserve(total_cells * pts_per_cell);

  std::vector<double> h(n);
  for (int d = 0; d < n; ++d) h[d] = domain.side(d) / cells_per_dim;

  std::vector<int> cell(n, 0), pt(n, 0);
  for (long c = 0; c < total_cells; ++c) {
    for (long k = 0; k < pts_per_cell; ++k) {
      Point node(n);
      double w = 1.0;
      for (int d = 0; d < n; ++d) {
        double center = domain.lower(d) + (cell[d] + 0.5) * h[d];
        node[d] = center + r1.points[pt[d]] * h[d];
        w *= r1.weights[pt[d]] * h[d];
      }
      scheme.nodes.push_back(std::move(node));
      scheme.weights.push_back(w);
      for (int d = n - 1; d >= 0; --d) {
        if (++pt[d] < q) break;
        pt[d] = 0;
      }
    }
    for (int d = n - 1; d >= 0; --d) {
      if (++cell[d] < cells_per_dim) break;
      cell[d] = 0;
    }
  }

  if (probe) {
    QuadratureScheme coarse = scheme.half();
    scheme.delta = std::abs(integrate(scheme, probe) - integrate(coarse, probe));
  }
  return scheme;
}

double integrate(const QuadratureScheme& scheme,
                 const std::function<double(const Point&)>& f) {
  double s = 0.0;
  for (size_t j = 0; j < scheme.nodes.size(); ++j) {
    double v = f(scheme.nodes[j]);
    if (!std::isfinite(v)) {
      throw std::domain_error("integrate: non-finite integrand at node " + std::to_string(j));
    }
    s += scheme.weights[j] * v;
  }
  return s;
}

ComplexVec integrate_vec(const QuadratureScheme& scheme, int p,
                         const std::function<ComplexVec(const Point&)>& f) {
  ComplexVec acc = ComplexVec::zeros(p);
  for (size_t j = 0; j < scheme.nodes.size(); ++j) {
    ComplexVec v = f(scheme.nodes[j]);
    for (int i = 0; i < p; ++i) {
      if (!std::isfinite(v.re[i]) || !std::isfinite(v.im[i])) {
        throw std::domain_error("integrate_vec: non-finite integrand at node " +
                                std::to_string(j));
      }
      acc.re[i] += scheme.weights[j] * v.re[i];
      acc.im[i] += scheme.weights[j] * v.im[i];
    }
  }
  return acc;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Point> mc_nodes(const McSampler& sampler, std::uint64_t call_index) {
  if (sampler.batch_size < 1) throw std::invalid_argument("mc_nodes: batch_size < 1");
  std::mt19937_64 rng(mix_seed(sampler.seed, call_index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = sampler.domain.dim();
  std::vector<Point> out(sampler.batch_size, Point(n));
  for (auto& node : out) {
    for (int d = 0; d < n; ++d) {
      node[d] = sampler.domain.lower(d) + sampler.domain.side(d) * unit(rng);
    }
  }
  return out;
}

}  // namespace sfp
