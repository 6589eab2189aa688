#include "splc/vertex_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "splc/errors.hpp"

namespace splc {

namespace {

constexpr double kDistinctTolerance = 1e-12;

// Lexicographic sweep; only points inside the first-coordinate window can
// collide, and per-component gap checks keep the inner scan cheap for
// structured grids with many equal first coordinates.
void check_pairwise_distinct(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  const int d = static_cast<int>(points.cols());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (int c = 0; c < d; ++c) {
      if (points(a, c) < points(b, c)) return true;
      if (points(a, c) > points(b, c)) return false;
    }
    return false;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (points(order[j], 0) - points(order[i], 0) > kDistinctTolerance) break;
      bool near = true;
      for (int c = 1; c < d && near; ++c)
        near = std::abs(points(order[j], c) - points(order[i], c)) <= kDistinctTolerance;
      if (near && (points.row(order[i]) - points.row(order[j])).norm() <= kDistinctTolerance) {
        std::ostringstream os;
        os << "vertex cloud: points " << order[i] << " and " << order[j]
           << " coincide within " << kDistinctTolerance;
        throw ArgumentError(os.str());
      }
    }
  }
}

}  // namespace

VertexCloud::VertexCloud(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw ArgumentError("vertex cloud: need at least one point");
  if (points_.cols() < 1 || points_.cols() > 3)
    throw ArgumentError("vertex cloud: spatial dimension must lie in {1,2,3}");
  if (!points_.allFinite()) throw ArgumentError("vertex cloud: non-finite coordinates");
  check_pairwise_distinct(points_);
}

VertexCloud::VertexCloud(Eigen::MatrixXd points, Eigen::MatrixXd data)
    : VertexCloud(std::move(points)) {
  if (data.rows() != points_.rows())
    throw ArgumentError("vertex cloud: one data row per point required");
  data_ = std::move(data);
}

const Eigen::MatrixXd& VertexCloud::data() const {
  if (!data_) throw ArgumentError("vertex cloud: no data attached");
  return *data_;
}

VertexCloud VertexCloud::with_data(Eigen::MatrixXd data) const {
  return VertexCloud(points_, std::move(data));
}

void write_cloud_text(std::ostream& os, const VertexCloud& cloud) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  const int m = cloud.has_data() ? cloud.data_dim() : 0;
  os << "cloud " << cloud.size() << ' ' << cloud.spatial_dim() << ' ' << m << "\n";
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (int c = 0; c < cloud.spatial_dim(); ++c) {
      if (c) os << ' ';
      os << cloud.points()(i, c);
    }
    for (int c = 0; c < m; ++c) os << ' ' << cloud.data()(i, c);
    os << "\n";
  }
}

namespace {

bool next_token(std::istream& is, std::string& token) {
  while (is >> token) {
    if (token.front() == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    return true;
  }
  return false;
}

double read_real(std::istream& is) {
  std::string token;
  if (!next_token(is, token)) throw FormatError("point cloud: unexpected end of input");
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError("point cloud: expected real, got '" + token + "'");
  }
}

}  // namespace

VertexCloud read_cloud_text(std::istream& is) {
  std::string token;
  if (!next_token(is, token) || token != "cloud")
    throw FormatError("point cloud: expected 'cloud' header");
  long n = 0, d = 0, m = 0;
  if (!(is >> n >> d >> m) || n < 1 || d < 1 || d > 3 || m < 0)
    throw FormatError("point cloud: malformed header counts");
  Eigen::MatrixXd points(n, d);
  Eigen::MatrixXd data(n, m);
  for (long i = 0; i < n; ++i) {
    for (long c = 0; c < d; ++c) points(i, c) = read_real(is);
    for (long c = 0; c < m; ++c) data(i, c) = read_real(is);
  }
  if (m == 0) return VertexCloud(std::move(points));
  return VertexCloud(std::move(points), std::move(data));
}

void write_cloud_file(const std::string& path, const VertexCloud& cloud) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  write_cloud_text(os, cloud);
}

VertexCloud read_cloud_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_cloud_text(is);
}

}  // namespace splc
