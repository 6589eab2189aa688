#include "splc/tensor_basis.hpp"

#include "splc/errors.hpp"

namespace splc {

TensorBasis::TensorBasis(std::vector<KnotVector> directions) : directions_(std::move(directions)) {
  if (directions_.empty() || directions_.size() > 2)
    throw ArgumentError("tensor basis: parametric dimension must be 1 or 2");
}

TensorBasis::TensorBasis(KnotVector single) : TensorBasis(std::vector<KnotVector>{std::move(single)}) {}

TensorBasis::TensorBasis(KnotVector first, KnotVector second)
    : TensorBasis(std::vector<KnotVector>{std::move(first), std::move(second)}) {}

Eigen::Index TensorBasis::total_count() const noexcept {
  Eigen::Index total = 1;
  for (const auto& kv : directions_) total *= kv.basis_count();
  return total;
}

Eigen::Index TensorBasis::linear_index(int i0, int i1) const noexcept {
  return i0 + static_cast<Eigen::Index>(directions_[0].basis_count()) * i1;
}

Eigen::MatrixXd TensorBasis::greville_grid() const {
  const int d = dim();
  Eigen::MatrixXd grid(total_count(), d);
  if (d == 1) {
    const auto g = directions_[0].greville_abscissae();
    for (std::size_t i = 0; i < g.size(); ++i) grid(static_cast<Eigen::Index>(i), 0) = g[i];
    return grid;
  }
  const auto g0 = directions_[0].greville_abscissae();
  const auto g1 = directions_[1].greville_abscissae();
  for (std::size_t j = 0; j < g1.size(); ++j)
    for (std::size_t i = 0; i < g0.size(); ++i) {
      const Eigen::Index row = linear_index(static_cast<int>(i), static_cast<int>(j));
      grid(row, 0) = g0[i];
      grid(row, 1) = g1[j];
    }
  return grid;
}

TensorBasis TensorBasis::refined_uniform(int levels) const {
  std::vector<KnotVector> refined;
  refined.reserve(directions_.size());
  for (const auto& kv : directions_) refined.push_back(kv.refined_uniform(levels));
  return TensorBasis(std::move(refined));
}

}  // namespace splc
