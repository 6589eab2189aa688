#ifndef SPLC_TENSOR_BASIS_HPP
#define SPLC_TENSOR_BASIS_HPP

#include <Eigen/Dense>
#include <vector>

#include "splc/knot_vector.hpp"

namespace splc {

/// Tensor-product B-spline space over one or two parametric directions.
/// Linear indexing runs direction 0 fastest: index = i0 + n0 * i1.
class TensorBasis {
public:
  explicit TensorBasis(std::vector<KnotVector> directions);
  explicit TensorBasis(KnotVector single);
  TensorBasis(KnotVector first, KnotVector second);

  int dim() const noexcept { return static_cast<int>(directions_.size()); }
  const KnotVector& direction(int i) const { return directions_.at(static_cast<std::size_t>(i)); }
  const std::vector<KnotVector>& directions() const noexcept { return directions_; }

  Eigen::Index total_count() const noexcept;
  Eigen::Index count(int direction) const { return this->direction(direction).basis_count(); }

  Eigen::Index linear_index(int i0, int i1 = 0) const noexcept;

  /// Tensor grid of Greville abscissae, total_count() x dim(), in linear order.
  Eigen::MatrixXd greville_grid() const;

  TensorBasis refined_uniform(int levels) const;

  bool operator==(const TensorBasis& other) const noexcept = default;

private:
  std::vector<KnotVector> directions_;
};

}  // namespace splc

#endif
