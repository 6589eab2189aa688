#ifndef SPLC_COUPLING_HPP
#define SPLC_COUPLING_HPP

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "splc/rbf.hpp"
#include "splc/spline_field.hpp"
#include "splc/vertex_cloud.hpp"

namespace splc {

/// One side of a coupling interface: a point set or a spline field.
enum class SideRole { fluid_like, structure_like };

struct InterfaceSide {
  std::variant<VertexCloud, SplineField> rep;
  SideRole role;

  bool is_spline() const noexcept { return std::holds_alternative<SplineField>(rep); }
  const SplineField& spline() const { return std::get<SplineField>(rep); }
  const VertexCloud& cloud() const { return std::get<VertexCloud>(rep); }
};

/// Point-set to point-set transfer: plain application of the mapping matrix.
Eigen::MatrixXd transfer_vertex_vertex(const MappingMatrix& m, const Eigen::MatrixXd& source_data);

/// Force transfer from a vertex side onto spline-side evaluation sites:
/// RBF fit on the source vertices evaluated at the given physical points.
Eigen::MatrixXd transfer_spline_vertex_force(const VertexCloud& fluid,
                                             const Eigen::MatrixXd& structure_sites,
                                             const RbfKernel& kernel);

/// Spline-side field sampled at parametric query points (one row each).
Eigen::MatrixXd sample_spline_displacement(const SplineField& field,
                                           const Eigen::MatrixXd& parametric_queries);

/// Same for physical query points: each is pulled back through the interface
/// geometry by damped Newton iteration before evaluation.
Eigen::MatrixXd sample_spline_displacement(const SplineField& field, const SplineField& geometry,
                                           const Eigen::MatrixXd& physical_queries);

/// Closest-point inversion of a spline geometry. Seeded from the nearest
/// Greville grid point; fails with a numerical error when the residual stays
/// above 1e-10.
Eigen::VectorXd invert_point(const SplineField& geometry, const Eigen::VectorXd& x);

/// Linear operator between two spline spaces with nested knot vectors,
/// stored as one dense block per parametric direction. Coarse-to-fine is the
/// exact knot-insertion transform; fine-to-coarse is the L2 projection,
/// exact on functions already in the target space.
class SplineSpaceTransform {
public:
  SplineSpaceTransform(TensorBasis source, TensorBasis target,
                       std::vector<Eigen::MatrixXd> direction_blocks);

  const TensorBasis& source() const noexcept { return source_; }
  const TensorBasis& target() const noexcept { return target_; }
  const Eigen::MatrixXd& direction_block(int i) const { return blocks_.at(static_cast<std::size_t>(i)); }

  /// Maps a source control block (source total x d) to the target space.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& source_coefficients) const;

private:
  TensorBasis source_;
  TensorBasis target_;
  std::vector<Eigen::MatrixXd> blocks_;
};

SplineSpaceTransform build_space_transform(const TensorBasis& source, const TensorBasis& target);

/// Blockwise application of the transform to each physical component.
Eigen::MatrixXd transfer_control_data(const SplineSpaceTransform& t,
                                      const Eigen::MatrixXd& source_coefficients);

/// Exact single-direction knot-insertion matrix (fine count x coarse count).
Eigen::MatrixXd knot_insertion_matrix(const KnotVector& coarse, const KnotVector& fine);

}  // namespace splc

#endif
