#ifndef SPLC_QUADRATURE_HPP
#define SPLC_QUADRATURE_HPP

#include <Eigen/Dense>
#include <vector>

#include "splc/knot_vector.hpp"

namespace splc {

/// Gauss-Legendre rule on [-1, 1], exact for polynomials up to degree 2n-1.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussRule gauss_legendre(int n);

/// Per-span quadrature points over the non-empty spans of a knot vector,
/// n points per span mapped from the reference rule.
struct SpanQuadrature {
  std::vector<double> points;
  std::vector<double> weights;
};
SpanQuadrature span_quadrature(const KnotVector& kv, int points_per_span);

/// Same, but over the union of the non-empty spans of two knot vectors that
/// share a domain. Used when the integrand is piecewise-polynomial with
/// breakpoints from both spaces.
SpanQuadrature merged_span_quadrature(const KnotVector& a, const KnotVector& b, int points_per_span);

}  // namespace splc

#endif
