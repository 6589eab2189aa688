#include "splc/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "splc/errors.hpp"

namespace splc {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("quadrature: need at least one point");
  // Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix,
  // weights come from the first component of each eigenvector.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = eig.eigenvectors()(0, i);
    rule.weights(i) = 2.0 * v * v;
  }
  return rule;
}

namespace {

SpanQuadrature over_breakpoints(const std::vector<double>& breaks, int points_per_span) {
  const GaussRule rule = gauss_legendre(points_per_span);
  SpanQuadrature q;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < points_per_span; ++i) {
      q.points.push_back(mid + half * rule.nodes(i));
      q.weights.push_back(half * rule.weights(i));
    }
  }
  return q;
}

std::vector<double> unique_breakpoints(const KnotVector& kv) {
  std::vector<double> breaks;
  for (double v : kv.knots())
    if (breaks.empty() || v > breaks.back()) breaks.push_back(v);
  return breaks;
}

}  // namespace

SpanQuadrature span_quadrature(const KnotVector& kv, int points_per_span) {
  return over_breakpoints(unique_breakpoints(kv), points_per_span);
}

SpanQuadrature merged_span_quadrature(const KnotVector& a, const KnotVector& b,
                                      int points_per_span) {
  std::vector<double> breaks = unique_breakpoints(a);
  for (double v : unique_breakpoints(b)) breaks.push_back(v);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return over_breakpoints(breaks, points_per_span);
}

}  // namespace splc
