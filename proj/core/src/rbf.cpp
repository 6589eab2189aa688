#include "splc/rbf.hpp"

#include <cmath>
#include <limits>

#include "splc/errors.hpp"

namespace splc {

double RbfKernel::operator()(double r, int spatial_dim) const {
  switch (kind) {
    case Kind::gaussian: {
      const double a = shape * r;
      return std::exp(-a * a);
    }
    case Kind::thin_plate_spline:
    default:
      if (spatial_dim == 2) return r > 0.0 ? r * r * std::log(r) : 0.0;
      return r * r * r;
  }
}

namespace {

// [Phi P] evaluated with rows at `points` against the given centers.
Eigen::MatrixXd kernel_block(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                             const RbfKernel& kernel) {
  const Eigen::Index rows = points.rows(), n = centers.rows();
  const int d = static_cast<int>(centers.cols());
  Eigen::MatrixXd block(rows, n + 1 + d);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      block(i, j) = kernel((points.row(i) - centers.row(j)).norm(), d);
    block(i, n) = 1.0;
    block.row(i).tail(d) = points.row(i);
  }
  return block;
}

struct SaddleSystem {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double rcond = 0.0;
};

SaddleSystem factor_saddle_system(const VertexCloud& cloud, const RbfKernel& kernel) {
  const Eigen::Index n = cloud.size();
  const int d = cloud.spatial_dim();
  if (n < d + 1)
    throw ArgumentError("rbf: need at least d+1 points for the linear tail");

  // Geometry must span the affine space, otherwise the tail block is rank
  // deficient (collinear points in 2D, coplanar in 3D).
  Eigen::MatrixXd tail(n, d + 1);
  tail.col(0).setOnes();
  tail.rightCols(d) = cloud.points();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(tail);
  if (qr.rank() < d + 1)
    throw ArgumentError("rbf: degenerate point geometry (collinear or coplanar cloud)");

  const Eigen::Index q = d + 1;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n + q, n + q);
  s.topLeftCorner(n, n + q) = kernel_block(cloud.points(), cloud.points(), kernel);
  s.bottomLeftCorner(q, n) = s.topRightCorner(n, q).transpose();

  SaddleSystem sys{Eigen::PartialPivLU<Eigen::MatrixXd>(s), 0.0};
  sys.rcond = sys.lu.rcond();
  if (!(sys.rcond > 1e-15))
    throw NumericalError("rbf: saddle-point system numerically singular",
                         sys.rcond > 0 ? 1.0 / sys.rcond
                                       : std::numeric_limits<double>::infinity());
  return sys;
}

}  // namespace

RbfInterpolant build_interpolant(const VertexCloud& cloud, const RbfKernel& kernel) {
  if (!cloud.has_data()) throw ArgumentError("rbf: cloud carries no data to interpolate");
  const Eigen::Index n = cloud.size();
  const int d = cloud.spatial_dim();
  const int m = cloud.data_dim();

  SaddleSystem sys = factor_saddle_system(cloud, kernel);

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + d + 1, m);
  rhs.topRows(n) = cloud.data();
  const Eigen::MatrixXd solution = sys.lu.solve(rhs);

  RbfInterpolant interp;
  interp.centers_ = cloud.points();
  interp.lambda_ = solution.topRows(n);
  interp.beta0_ = solution.row(n);
  interp.beta_linear_ = solution.bottomRows(d);
  interp.kernel_ = kernel;
  interp.condition_estimate_ = 1.0 / sys.rcond;
  return interp;
}

Eigen::VectorXd RbfInterpolant::evaluate(const Eigen::VectorXd& x) const {
  return evaluate_at(x.transpose()).row(0).transpose();
}

Eigen::MatrixXd RbfInterpolant::evaluate_at(const Eigen::MatrixXd& points) const {
  if (points.cols() != centers_.cols())
    throw ArgumentError("rbf: evaluation point dimension mismatch");
  const Eigen::MatrixXd block = kernel_block(points, centers_, kernel_);
  const Eigen::Index n = centers_.rows();
  const int d = static_cast<int>(centers_.cols());
  Eigen::MatrixXd coeffs(n + 1 + d, lambda_.cols());
  coeffs.topRows(n) = lambda_;
  coeffs.row(n) = beta0_;
  coeffs.bottomRows(d) = beta_linear_;
  return block * coeffs;
}

MappingMatrix::MappingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (!entries_.allFinite()) throw NumericalError("mapping matrix: non-finite entries");
  row_sum_deviation_ = (entries_.rowwise().sum().array() - 1.0).abs().maxCoeff();
  col_sum_deviation_ = (entries_.colwise().sum().array() - 1.0).abs().maxCoeff();
}

Eigen::MatrixXd MappingMatrix::apply(const Eigen::MatrixXd& source_data) const {
  if (source_data.rows() != entries_.cols())
    throw ArgumentError("mapping matrix: source data row count mismatch");
  return entries_ * source_data;
}

MappingMatrix build_mapping_matrix(const VertexCloud& from, const VertexCloud& to,
                                   const RbfKernel& kernel) {
  if (from.spatial_dim() != to.spatial_dim())
    throw ArgumentError("mapping matrix: cloud dimensions differ");
  const Eigen::Index n = from.size();
  const int d = from.spatial_dim();

  SaddleSystem sys = factor_saddle_system(from, kernel);

  // One factorization serves all columns: solve against unit data vectors,
  // then evaluate at the target points.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + d + 1, n);
  rhs.topRows(n).setIdentity();
  const Eigen::MatrixXd coeffs = sys.lu.solve(rhs);
  const Eigen::MatrixXd block = kernel_block(to.points(), from.points(), kernel);
  return MappingMatrix(block * coeffs);
}

double check_consistency(const MappingMatrix& m) { return m.row_sum_deviation(); }

double check_conservative(const MappingMatrix& m) { return m.col_sum_deviation(); }

}  // namespace splc
