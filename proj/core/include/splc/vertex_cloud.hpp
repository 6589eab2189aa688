#ifndef SPLC_VERTEX_CLOUD_HPP
#define SPLC_VERTEX_CLOUD_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>

namespace splc {

/// Ordered point set with optional per-point vector data; the non-spline
/// side of a coupling interface. Points must be pairwise distinct (no two
/// closer than 1e-12).
class VertexCloud {
public:
  explicit VertexCloud(Eigen::MatrixXd points);
  VertexCloud(Eigen::MatrixXd points, Eigen::MatrixXd data);

  Eigen::Index size() const noexcept { return points_.rows(); }
  int spatial_dim() const noexcept { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& points() const noexcept { return points_; }

  bool has_data() const noexcept { return data_.has_value(); }
  int data_dim() const { return static_cast<int>(data().cols()); }
  const Eigen::MatrixXd& data() const;

  VertexCloud with_data(Eigen::MatrixXd data) const;

private:
  Eigen::MatrixXd points_;
  std::optional<Eigen::MatrixXd> data_;
};

/// Plain-text point-cloud format (see docs/pointcloud-format.md).
void write_cloud_text(std::ostream& os, const VertexCloud& cloud);
VertexCloud read_cloud_text(std::istream& is);
void write_cloud_file(const std::string& path, const VertexCloud& cloud);
VertexCloud read_cloud_file(const std::string& path);

}  // namespace splc

#endif
