#ifndef SPLC_RBF_HPP
#define SPLC_RBF_HPP

#include <Eigen/Dense>

#include "splc/vertex_cloud.hpp"

namespace splc {

/// Radial kernel. The thin-plate spline is parameter-free: r^2 log r in 2D,
/// r^3 in 3D (and |r|^3 in 1D), with phi(0) = 0. The Gaussian uses
/// exp(-(shape*r)^2).
struct RbfKernel {
  enum class Kind { thin_plate_spline, gaussian };
  Kind kind = Kind::thin_plate_spline;
  double shape = 1.0;

  static RbfKernel thin_plate_spline() { return {Kind::thin_plate_spline, 1.0}; }
  static RbfKernel gaussian(double shape) { return {Kind::gaussian, shape}; }

  double operator()(double r, int spatial_dim) const;
};

/// Scattered-data interpolant: radial part plus a linear polynomial tail,
/// one coefficient set per data component. The tail makes constant and
/// linear fields reproduce exactly; the moment constraints
/// sum_i lambda_i = 0 and sum_i lambda_i x_i = 0 make the system unique.
class RbfInterpolant {
public:
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd evaluate_at(const Eigen::MatrixXd& points) const;  // rows of points

  const Eigen::MatrixXd& centers() const noexcept { return centers_; }
  const Eigen::MatrixXd& lambda() const noexcept { return lambda_; }
  const Eigen::RowVectorXd& beta0() const noexcept { return beta0_; }
  const Eigen::MatrixXd& beta_linear() const noexcept { return beta_linear_; }
  const RbfKernel& kernel() const noexcept { return kernel_; }
  double condition_estimate() const noexcept { return condition_estimate_; }

private:
  friend RbfInterpolant build_interpolant(const VertexCloud&, const RbfKernel&);
  Eigen::MatrixXd centers_;      // N x d
  Eigen::MatrixXd lambda_;       // N x m
  Eigen::RowVectorXd beta0_;     // m
  Eigen::MatrixXd beta_linear_;  // d x m
  RbfKernel kernel_;
  double condition_estimate_ = 0.0;
};

/// Solves the saddle-point system [Phi P; P^T 0][lambda; beta] = [data; 0]
/// per component, sharing one factorization. Requires N >= d+1 points that
/// are not collinear (2D) / coplanar (3D).
RbfInterpolant build_interpolant(const VertexCloud& cloud, const RbfKernel& kernel);

/// Dense linear operator that carries source-point data to target points by
/// RBF interpolation. Row sums near one mean consistency (constants map
/// exactly); column sums near one would mean conservation.
class MappingMatrix {
public:
  MappingMatrix() = default;
  explicit MappingMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& source_data) const;

  double row_sum_deviation() const noexcept { return row_sum_deviation_; }
  double col_sum_deviation() const noexcept { return col_sum_deviation_; }

private:
  Eigen::MatrixXd entries_;
  double row_sum_deviation_ = 1.0;
  double col_sum_deviation_ = 1.0;
};

MappingMatrix build_mapping_matrix(const VertexCloud& from, const VertexCloud& to,
                                   const RbfKernel& kernel);

/// max_j |sum_i M_ji - 1| (consistency diagnostic).
double check_consistency(const MappingMatrix& m);
/// max_i |sum_j M_ji - 1| (conservation diagnostic; reported, not enforced).
double check_conservative(const MappingMatrix& m);

}  // namespace splc

#endif
