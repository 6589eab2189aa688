#ifndef SPLC_SPLINE_FIELD_HPP
#define SPLC_SPLINE_FIELD_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "splc/tensor_basis.hpp"

namespace splc {

/// Field over a tensor-product spline space: geometry, displacement, force,
/// or temperature, depending on what the coefficients mean. Coefficients are
/// total_count() x d, one row per basis function in linear order. Optional
/// strictly positive weights make the field rational.
class SplineField {
public:
  SplineField(TensorBasis basis, Eigen::MatrixXd coefficients);
  SplineField(TensorBasis basis, Eigen::MatrixXd coefficients, Eigen::VectorXd weights);

  const TensorBasis& basis() const noexcept { return basis_; }
  const Eigen::MatrixXd& coefficients() const noexcept { return coefficients_; }
  int physical_dim() const noexcept { return static_cast<int>(coefficients_.cols()); }
  bool rational() const noexcept { return weights_.has_value(); }
  const Eigen::VectorXd& weights() const { return *weights_; }

  /// Field value at a parametric point (size dim()).
  Eigen::VectorXd value(const Eigen::VectorXd& xi) const;
  double value_scalar(double u) const;  // 1D, single-component convenience

  /// Parametric gradient, physical_dim() x basis().dim().
  Eigen::MatrixXd gradient(const Eigen::VectorXd& xi) const;

private:
  TensorBasis basis_;
  Eigen::MatrixXd coefficients_;
  std::optional<Eigen::VectorXd> weights_;
};

/// Field over the knot vector enlarged by u in the given direction,
/// identical as a function (single-knot-insertion convex combinations).
SplineField insert_knot(const SplineField& field, int direction, double u);

/// Least-squares fit of discrete samples: rows of `sites` are parametric
/// points, rows of `values` the data. Square systems (e.g. Greville sites)
/// are solved by collocation, oversampled ones by least squares.
SplineField l2_project(const Eigen::MatrixXd& sites, const Eigen::MatrixXd& values,
                       const TensorBasis& target);

/// Continuous L2 projection of a callable field via Gauss quadrature;
/// exact when the source function lies in the target space.
SplineField l2_project(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                       int physical_dim, const TensorBasis& target);

/// Projection of an existing spline field onto another space.
SplineField l2_project(const SplineField& source, const TensorBasis& target);

}  // namespace splc

#endif
