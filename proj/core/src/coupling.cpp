#include "splc/coupling.hpp"

#include <cmath>
#include <limits>

#include "splc/errors.hpp"
#include "splc/quadrature.hpp"

namespace splc {

Eigen::MatrixXd transfer_vertex_vertex(const MappingMatrix& m, const Eigen::MatrixXd& source_data) {
  return m.apply(source_data);
}

Eigen::MatrixXd transfer_spline_vertex_force(const VertexCloud& fluid,
                                             const Eigen::MatrixXd& structure_sites,
                                             const RbfKernel& kernel) {
  const RbfInterpolant interp = build_interpolant(fluid, kernel);
  return interp.evaluate_at(structure_sites);
}

Eigen::MatrixXd sample_spline_displacement(const SplineField& field,
                                           const Eigen::MatrixXd& parametric_queries) {
  Eigen::MatrixXd out(parametric_queries.rows(), field.physical_dim());
  for (Eigen::Index i = 0; i < parametric_queries.rows(); ++i)
    out.row(i) = field.value(parametric_queries.row(i).transpose()).transpose();
  return out;
}

Eigen::VectorXd invert_point(const SplineField& geometry, const Eigen::VectorXd& x) {
  if (x.size() != geometry.physical_dim())
    throw ArgumentError("inversion: query dimension does not match geometry");
  const auto& basis = geometry.basis();
  const int dhat = basis.dim();

  // Seed from the closest Greville grid image.
  const Eigen::MatrixXd grid = basis.greville_grid();
  Eigen::VectorXd xi = grid.row(0).transpose();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const double dist = (geometry.value(grid.row(i).transpose()) - x).squaredNorm();
    if (dist < best) {
      best = dist;
      xi = grid.row(i).transpose();
    }
  }

  auto clamp = [&](Eigen::VectorXd& p) {
    for (int k = 0; k < dhat; ++k) {
      const auto& kv = basis.direction(k);
      p(k) = std::min(std::max(p(k), kv.domain_min()), kv.domain_max());
    }
  };

  // Damped Gauss-Newton on |geometry(xi) - x|^2.
  Eigen::VectorXd residual = geometry.value(xi) - x;
  double cost = residual.squaredNorm();
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::MatrixXd jac = geometry.gradient(xi);  // d x dhat
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * residual;
    Eigen::VectorXd step = normal.ldlt().solve(-gradient);
    if (!step.allFinite()) break;

    double scale = 1.0;
    Eigen::VectorXd next;
    double next_cost = cost;
    for (int halving = 0; halving < 30; ++halving) {
      next = xi + scale * step;
      clamp(next);
      next_cost = (geometry.value(next) - x).squaredNorm();
      if (next_cost <= cost) break;
      scale *= 0.5;
    }
    const double moved = (next - xi).norm();
    xi = next;
    residual = geometry.value(xi) - x;
    cost = next_cost;
    if (moved < 1e-12) break;
  }

  if (std::sqrt(cost) > 1e-10)
    throw NumericalError("inversion: Newton iteration left residual above 1e-10",
                         std::sqrt(cost));
  return xi;
}

Eigen::MatrixXd sample_spline_displacement(const SplineField& field, const SplineField& geometry,
                                           const Eigen::MatrixXd& physical_queries) {
  if (geometry.basis() != field.basis())
    throw ArgumentError("sampling: displacement and geometry must share a basis");
  Eigen::MatrixXd out(physical_queries.rows(), field.physical_dim());
  for (Eigen::Index i = 0; i < physical_queries.rows(); ++i) {
    const Eigen::VectorXd xi = invert_point(geometry, physical_queries.row(i).transpose());
    out.row(i) = field.value(xi).transpose();
  }
  return out;
}

Eigen::MatrixXd knot_insertion_matrix(const KnotVector& coarse, const KnotVector& fine) {
  if (!coarse.nested_in(fine))
    throw UnsupportedError("insertion matrix: source knots are not nested in the target");

  // Multiset difference fine \ coarse, kept sorted.
  std::vector<double> missing;
  const auto& ck = coarse.knots();
  const auto& fk = fine.knots();
  std::size_t ci = 0;
  for (double v : fk) {
    if (ci < ck.size() && ck[ci] == v)
      ++ci;
    else
      missing.push_back(v);
  }

  KnotVector kv = coarse;
  Eigen::MatrixXd transform = Eigen::MatrixXd::Identity(coarse.basis_count(), coarse.basis_count());
  for (double u : missing) {
    const int p = kv.degree();
    const int n = kv.basis_count();
    const int span = kv.find_span(u);
    const auto& knots = kv.knots();
    Eigen::MatrixXd step = Eigen::MatrixXd::Zero(n + 1, n);
    for (int i = 0; i <= span - p; ++i) step(i, i) = 1.0;
    for (int i = span - p + 1; i <= span; ++i) {
      const double alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
      step(i, i) = alpha;
      step(i, i - 1) = 1.0 - alpha;
    }
    for (int i = span + 1; i <= n; ++i) step(i, i - 1) = 1.0;
    transform = step * transform;
    kv = kv.with_inserted(u);
  }
  return transform;
}

namespace {

Eigen::MatrixXd gram_matrix(const KnotVector& kv) {
  const int n = kv.basis_count();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  const auto quad = span_quadrature(kv, kv.degree() + 1);
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const auto b = kv.basis_values(quad.points[q]);
    for (int i = 0; i <= kv.degree(); ++i)
      for (int j = 0; j <= kv.degree(); ++j)
        gram(b.first + i, b.first + j) += quad.weights[q] * b.values(i) * b.values(j);
  }
  return gram;
}

Eigen::MatrixXd direction_transform(const KnotVector& source, const KnotVector& target) {
  if (source.degree() != target.degree())
    throw UnsupportedError("space transform: directions must share the polynomial degree");
  if (source == target)
    return Eigen::MatrixXd::Identity(source.basis_count(), source.basis_count());
  if (source.nested_in(target)) return knot_insertion_matrix(source, target);
  if (target.nested_in(source)) {
    // L2 projection onto the coarse space: (A^T M A)^{-1} A^T M with A the
    // coarse-to-fine insertion and M the fine Gram matrix.
    const Eigen::MatrixXd a = knot_insertion_matrix(target, source);
    const Eigen::MatrixXd m = gram_matrix(source);
    const Eigen::MatrixXd am = a.transpose() * m;
    return (am * a).ldlt().solve(am);
  }
  throw UnsupportedError("space transform: knot vectors are neither identical nor nested");
}

}  // namespace

SplineSpaceTransform::SplineSpaceTransform(TensorBasis source, TensorBasis target,
                                           std::vector<Eigen::MatrixXd> direction_blocks)
    : source_(std::move(source)), target_(std::move(target)), blocks_(std::move(direction_blocks)) {}

Eigen::MatrixXd SplineSpaceTransform::apply(const Eigen::MatrixXd& source_coefficients) const {
  if (source_coefficients.rows() != source_.total_count())
    throw ArgumentError("space transform: coefficient row count does not match source space");

  if (source_.dim() == 1) return blocks_[0] * source_coefficients;

  const Eigen::Index s0 = source_.count(0), s1 = source_.count(1);
  const Eigen::Index t0 = target_.count(0), t1 = target_.count(1);
  Eigen::MatrixXd out(t0 * t1, source_coefficients.cols());
  for (Eigen::Index c = 0; c < source_coefficients.cols(); ++c) {
    // Linear index i0 + n0*i1 is exactly a column-major (n0 x n1) layout.
    Eigen::Map<const Eigen::MatrixXd> grid(source_coefficients.col(c).data(), s0, s1);
    const Eigen::MatrixXd mapped = blocks_[0] * grid * blocks_[1].transpose();
    out.col(c) = Eigen::Map<const Eigen::VectorXd>(mapped.data(), t0 * t1);
  }
  return out;
}

SplineSpaceTransform build_space_transform(const TensorBasis& source, const TensorBasis& target) {
  if (source.dim() != target.dim())
    throw UnsupportedError("space transform: parametric dimensions differ");
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(source.dim()));
  for (int k = 0; k < source.dim(); ++k)
    blocks.push_back(direction_transform(source.direction(k), target.direction(k)));
  return SplineSpaceTransform(source, target, std::move(blocks));
}

Eigen::MatrixXd transfer_control_data(const SplineSpaceTransform& t,
                                      const Eigen::MatrixXd& source_coefficients) {
  return t.apply(source_coefficients);
}

}  // namespace splc
