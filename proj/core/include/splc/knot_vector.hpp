#ifndef SPLC_KNOT_VECTOR_HPP
#define SPLC_KNOT_VECTOR_HPP

#include <Eigen/Dense>
#include <vector>

namespace splc {

/// Open (clamped) knot vector of a univariate B-spline space.
///
/// Invariants enforced at construction: the sequence is non-decreasing,
/// the first and last knot are each repeated exactly degree+1 times, every
/// interior knot has multiplicity <= degree, and the basis count
/// n = size - degree - 1 is at least degree + 1.
class KnotVector {
public:
  KnotVector(std::vector<double> knots, int degree);

  int degree() const noexcept { return degree_; }
  const std::vector<double>& knots() const noexcept { return knots_; }

  /// Number of basis functions n.
  int basis_count() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
  /// Number of non-empty spans.
  int span_count() const noexcept;

  double domain_min() const noexcept { return knots_.front(); }
  double domain_max() const noexcept { return knots_.back(); }

  /// Index i with knots[i] <= u < knots[i+1]; u == domain_max maps to the
  /// last non-empty span (right-endpoint convention).
  int find_span(double u) const;

  /// The degree+1 basis values supported on the span of u. `first` is the
  /// index of the first function of the window; values sum to one.
  struct BasisSpan {
    int first;
    Eigen::VectorXd values;
  };
  BasisSpan basis_values(double u) const;

  /// Rows 0..order of derivatives of the window functions, (order+1) x (degree+1).
  struct BasisDerivatives {
    int first;
    Eigen::MatrixXd values;
  };
  BasisDerivatives basis_derivatives(double u, int order) const;

  /// One abscissa per basis function: the mean of its degree interior knots.
  std::vector<double> greville_abscissae() const;

  /// Multiplicity of u among the knots (exact comparison).
  int multiplicity(double u) const noexcept;

  /// Copy with u inserted once. u must be strictly interior and the
  /// resulting multiplicity must stay <= degree.
  KnotVector with_inserted(double u) const;

  /// `levels` rounds of midpoint subdivision of every non-empty span.
  KnotVector refined_uniform(int levels) const;

  /// True when every knot of *this appears (with multiplicity) in `fine`
  /// and the degrees match. Knot values are compared exactly.
  bool nested_in(const KnotVector& fine) const noexcept;

  bool operator==(const KnotVector& other) const noexcept = default;

private:
  std::vector<double> knots_;
  int degree_;
};

/// Open knot vector on [0, 1] with `spans` uniform spans, so the basis
/// count is spans + degree.
KnotVector uniform_open_knots(int degree, int spans);

}  // namespace splc

#endif
