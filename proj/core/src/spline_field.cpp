#include "splc/spline_field.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "splc/errors.hpp"
#include "splc/quadrature.hpp"

namespace splc {

SplineField::SplineField(TensorBasis basis, Eigen::MatrixXd coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
  if (coefficients_.rows() != basis_.total_count())
    throw ArgumentError("spline field: coefficient row count must equal basis count");
  if (coefficients_.cols() < 1 || coefficients_.cols() > 3)
    throw ArgumentError("spline field: physical dimension must lie in {1,2,3}");
}

SplineField::SplineField(TensorBasis basis, Eigen::MatrixXd coefficients, Eigen::VectorXd weights)
    : SplineField(std::move(basis), std::move(coefficients)) {
  if (weights.size() != coefficients_.rows())
    throw ArgumentError("spline field: one weight per coefficient row required");
  if ((weights.array() <= 0.0).any())
    throw ArgumentError("spline field: weights must be strictly positive");
  weights_ = std::move(weights);
}

namespace {

void check_query(const TensorBasis& basis, const Eigen::VectorXd& xi) {
  if (xi.size() != basis.dim())
    throw ArgumentError("spline field: query dimension does not match parametric dimension");
}

}  // namespace

Eigen::VectorXd SplineField::value(const Eigen::VectorXd& xi) const {
  check_query(basis_, xi);
  const int d = physical_dim();
  Eigen::VectorXd num = Eigen::VectorXd::Zero(d);
  double den = 0.0;

  if (basis_.dim() == 1) {
    const auto b = basis_.direction(0).basis_values(xi(0));
    for (int i = 0; i <= basis_.direction(0).degree(); ++i) {
      const Eigen::Index idx = b.first + i;
      const double w = rational() ? (*weights_)(idx) : 1.0;
      const double c = b.values(i) * w;
      num += c * coefficients_.row(idx).transpose();
      den += c;
    }
  } else {
    const auto b0 = basis_.direction(0).basis_values(xi(0));
    const auto b1 = basis_.direction(1).basis_values(xi(1));
    for (int j = 0; j <= basis_.direction(1).degree(); ++j)
      for (int i = 0; i <= basis_.direction(0).degree(); ++i) {
        const Eigen::Index idx = basis_.linear_index(b0.first + i, b1.first + j);
        const double w = rational() ? (*weights_)(idx) : 1.0;
        const double c = b0.values(i) * b1.values(j) * w;
        num += c * coefficients_.row(idx).transpose();
        den += c;
      }
  }
  if (rational()) num /= den;
  return num;
}

double SplineField::value_scalar(double u) const {
  Eigen::VectorXd xi(1);
  xi << u;
  return value(xi)(0);
}

Eigen::MatrixXd SplineField::gradient(const Eigen::VectorXd& xi) const {
  check_query(basis_, xi);
  const int d = physical_dim();
  const int dhat = basis_.dim();

  // Weighted sums A = sum N w c and W = sum N w together with their
  // parametric derivatives; the non-rational path keeps W = 1.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd da = Eigen::MatrixXd::Zero(d, dhat);
  double wsum = 0.0;
  Eigen::VectorXd dwsum = Eigen::VectorXd::Zero(dhat);

  if (dhat == 1) {
    const auto der = basis_.direction(0).basis_derivatives(xi(0), 1);
    for (int i = 0; i <= basis_.direction(0).degree(); ++i) {
      const Eigen::Index idx = der.first + i;
      const double w = rational() ? (*weights_)(idx) : 1.0;
      a += der.values(0, i) * w * coefficients_.row(idx).transpose();
      da.col(0) += der.values(1, i) * w * coefficients_.row(idx).transpose();
      wsum += der.values(0, i) * w;
      dwsum(0) += der.values(1, i) * w;
    }
  } else {
    const auto d0 = basis_.direction(0).basis_derivatives(xi(0), 1);
    const auto d1 = basis_.direction(1).basis_derivatives(xi(1), 1);
    for (int j = 0; j <= basis_.direction(1).degree(); ++j)
      for (int i = 0; i <= basis_.direction(0).degree(); ++i) {
        const Eigen::Index idx = basis_.linear_index(d0.first + i, d1.first + j);
        const double w = rational() ? (*weights_)(idx) : 1.0;
        const Eigen::VectorXd c = coefficients_.row(idx).transpose();
        const double v = d0.values(0, i) * d1.values(0, j);
        const double g0 = d0.values(1, i) * d1.values(0, j);
        const double g1 = d0.values(0, i) * d1.values(1, j);
        a += v * w * c;
        da.col(0) += g0 * w * c;
        da.col(1) += g1 * w * c;
        wsum += v * w;
        dwsum(0) += g0 * w;
        dwsum(1) += g1 * w;
      }
  }

  if (!rational()) return da;
  Eigen::MatrixXd grad(d, dhat);
  for (int k = 0; k < dhat; ++k)
    grad.col(k) = (da.col(k) * wsum - a * dwsum(k)) / (wsum * wsum);
  return grad;
}

namespace {

// Single-knot insertion on every coefficient line along one direction.
Eigen::MatrixXd insert_lines(const Eigen::MatrixXd& coeffs, const TensorBasis& basis,
                             int direction, double u, const KnotVector& kv) {
  const int p = kv.degree();
  const int n = kv.basis_count();
  const auto& knots = kv.knots();
  const int span = kv.find_span(u);

  const int n0 = static_cast<int>(basis.count(0));
  const int n_other = basis.dim() == 2 ? static_cast<int>(basis.count(1 - direction)) : 1;
  const Eigen::Index cols = coeffs.cols();

  const int new_n0 = (direction == 0) ? n0 + 1 : n0;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n + 1) * n_other, cols);

  for (int line = 0; line < n_other; ++line) {
    auto src = [&](int i) -> Eigen::RowVectorXd {
      const Eigen::Index idx = (direction == 0) ? i + static_cast<Eigen::Index>(n0) * line
                                                : line + static_cast<Eigen::Index>(n0) * i;
      return coeffs.row(idx);
    };
    auto dst = [&](int i) -> Eigen::Block<Eigen::MatrixXd, 1> {
      const Eigen::Index idx = (direction == 0) ? i + static_cast<Eigen::Index>(new_n0) * line
                                                : line + static_cast<Eigen::Index>(new_n0) * i;
      return out.row(idx);
    };
    for (int i = 0; i <= span - p; ++i) dst(i) = src(i);
    for (int i = span - p + 1; i <= span; ++i) {
      const double alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
      dst(i) = alpha * src(i) + (1.0 - alpha) * src(i - 1);
    }
    for (int i = span + 1; i <= n; ++i) dst(i) = src(i - 1);
  }
  return out;
}

}  // namespace

SplineField insert_knot(const SplineField& field, int direction, double u) {
  const auto& basis = field.basis();
  if (direction < 0 || direction >= basis.dim())
    throw ArgumentError("knot insertion: direction out of range");
  const KnotVector& kv = basis.direction(direction);
  KnotVector enlarged = kv.with_inserted(u);  // validates interior position and multiplicity

  std::vector<KnotVector> dirs = basis.directions();
  dirs[static_cast<std::size_t>(direction)] = enlarged;
  TensorBasis new_basis(std::move(dirs));

  if (!field.rational()) {
    Eigen::MatrixXd coeffs = insert_lines(field.coefficients(), basis, direction, u, kv);
    return SplineField(std::move(new_basis), std::move(coeffs));
  }

  // Rational: run the convex combinations on homogeneous coordinates.
  const Eigen::Index d = field.coefficients().cols();
  Eigen::MatrixXd homogeneous(field.coefficients().rows(), d + 1);
  homogeneous.leftCols(d) = field.coefficients().array().colwise() * field.weights().array();
  homogeneous.col(d) = field.weights();
  Eigen::MatrixXd lifted = insert_lines(homogeneous, basis, direction, u, kv);
  Eigen::VectorXd weights = lifted.col(d);
  Eigen::MatrixXd coeffs = lifted.leftCols(d).array().colwise() / weights.array();
  return SplineField(std::move(new_basis), std::move(coeffs), std::move(weights));
}

namespace {

// Dense collocation matrix: one row per site, one column per basis function.
Eigen::MatrixXd collocation_matrix(const Eigen::MatrixXd& sites, const TensorBasis& basis) {
  const Eigen::Index n = basis.total_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sites.rows(), n);
  for (Eigen::Index k = 0; k < sites.rows(); ++k) {
    if (basis.dim() == 1) {
      const auto b = basis.direction(0).basis_values(sites(k, 0));
      for (int i = 0; i <= basis.direction(0).degree(); ++i) a(k, b.first + i) = b.values(i);
    } else {
      const auto b0 = basis.direction(0).basis_values(sites(k, 0));
      const auto b1 = basis.direction(1).basis_values(sites(k, 1));
      for (int j = 0; j <= basis.direction(1).degree(); ++j)
        for (int i = 0; i <= basis.direction(0).degree(); ++i)
          a(k, basis.linear_index(b0.first + i, b1.first + j)) = b0.values(i) * b1.values(j);
    }
  }
  return a;
}

}  // namespace

SplineField l2_project(const Eigen::MatrixXd& sites, const Eigen::MatrixXd& values,
                       const TensorBasis& target) {
  if (sites.rows() != values.rows())
    throw ArgumentError("projection: one value row per sample site required");
  if (sites.cols() != target.dim())
    throw ArgumentError("projection: site dimension does not match parametric dimension");
  const Eigen::Index n = target.total_count();
  if (sites.rows() < n)
    throw ArgumentError("projection: sample count must be at least the basis count");

  const Eigen::MatrixXd a = collocation_matrix(sites, target);
  Eigen::MatrixXd coeffs;
  if (sites.rows() == n) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14))
      throw NumericalError("projection: collocation system numerically singular",
                           rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    coeffs = lu.solve(values);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < n)
      throw NumericalError("projection: sample sites give a rank-deficient system",
                           qr.maxPivot() / std::abs(qr.matrixR()(n - 1, n - 1)));
    coeffs = qr.solve(values);
  }
  return SplineField(target, std::move(coeffs));
}

SplineField l2_project(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                       int physical_dim, const TensorBasis& target) {
  const Eigen::Index n = target.total_count();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, physical_dim);

  const int dhat = target.dim();
  const auto q0 = span_quadrature(target.direction(0), target.direction(0).degree() + 1);
  const auto q1 = dhat == 2
                      ? span_quadrature(target.direction(1), target.direction(1).degree() + 1)
                      : SpanQuadrature{{0.0}, {1.0}};

  Eigen::VectorXd xi(dhat);
  std::vector<Eigen::Index> idx;
  std::vector<double> val;
  for (std::size_t b = 0; b < q1.points.size(); ++b) {
    for (std::size_t a = 0; a < q0.points.size(); ++a) {
      xi(0) = q0.points[a];
      if (dhat == 2) xi(1) = q1.points[b];
      const double w = q0.weights[a] * q1.weights[b];

      idx.clear();
      val.clear();
      const auto b0 = target.direction(0).basis_values(xi(0));
      if (dhat == 1) {
        for (int i = 0; i <= target.direction(0).degree(); ++i) {
          idx.push_back(b0.first + i);
          val.push_back(b0.values(i));
        }
      } else {
        const auto b1 = target.direction(1).basis_values(xi(1));
        for (int j = 0; j <= target.direction(1).degree(); ++j)
          for (int i = 0; i <= target.direction(0).degree(); ++i) {
            idx.push_back(target.linear_index(b0.first + i, b1.first + j));
            val.push_back(b0.values(i) * b1.values(j));
          }
      }

      const Eigen::VectorXd fv = f(xi);
      for (std::size_t r = 0; r < idx.size(); ++r) {
        rhs.row(idx[r]) += w * val[r] * fv.transpose();
        for (std::size_t c = 0; c < idx.size(); ++c)
          gram(idx[r], idx[c]) += w * val[r] * val[c];
      }
    }
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("projection: Gram matrix not positive definite");
  Eigen::MatrixXd coeffs = ldlt.solve(rhs);
  return SplineField(target, std::move(coeffs));
}

SplineField l2_project(const SplineField& source, const TensorBasis& target) {
  return l2_project([&source](const Eigen::VectorXd& xi) { return source.value(xi); },
                    source.physical_dim(), target);
}

}  // namespace splc
