#include "splc/wire.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "splc/errors.hpp"

namespace splc::wire {

namespace {

double canonical_nan() { return std::bit_cast<double>(kCanonicalNanBits); }

void put_u16(std::vector<std::byte>& out, std::uint16_t v) {
  out.push_back(static_cast<std::byte>(v & 0xff));
  out.push_back(static_cast<std::byte>((v >> 8) & 0xff));
}

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_uint(std::span<const std::byte> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i)
    v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(bytes[offset + i])) << (8 * i);
  return v;
}

}  // namespace

KnotMatrix encode_knot_matrix(const TensorBasis& basis) {
  const int dim = basis.dim();
  Eigen::Index width = 0;
  std::vector<Eigen::Index> lengths(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    lengths[static_cast<std::size_t>(k)] =
        static_cast<Eigen::Index>(basis.direction(k).knots().size());
    width += lengths[static_cast<std::size_t>(k)];
  }

  KnotMatrix m;
  m.entries = Eigen::MatrixXd::Constant(dim, width, canonical_nan());
  Eigen::Index offset = 0;
  for (int k = 0; k < dim; ++k) {
    const auto& knots = basis.direction(k).knots();
    for (std::size_t i = 0; i < knots.size(); ++i)
      m.entries(k, offset + static_cast<Eigen::Index>(i)) = knots[i];
    offset += lengths[static_cast<std::size_t>(k)];
  }
  return m;
}

TensorBasis decode_knot_matrix(const KnotMatrix& m, std::span<const int> degrees) {
  const Eigen::Index rows = m.entries.rows();
  if (rows < 1 || rows > 2) throw FormatError("knot matrix: row count must be 1 or 2");
  if (static_cast<Eigen::Index>(degrees.size()) != rows)
    throw FormatError("knot matrix: one degree per row required");

  // Each row must hold one contiguous finite block in its own column range
  // and NaN everywhere else; the blocks of consecutive rows must tile the
  // width in order.
  std::vector<KnotVector> directions;
  Eigen::Index offset = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    Eigen::Index len = 0;
    while (offset + len < m.entries.cols() && !std::isnan(m.entries(r, offset + len))) ++len;
    if (len == 0) throw FormatError("knot matrix: empty knot block");
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c) {
      const bool inside = c >= offset && c < offset + len;
      if (!inside && !std::isnan(m.entries(r, c)))
        throw FormatError("knot matrix: finite entry in a padding zone");
    }
    std::vector<double> knots(static_cast<std::size_t>(len));
    for (Eigen::Index i = 0; i < len; ++i) knots[static_cast<std::size_t>(i)] = m.entries(r, offset + i);
    try {
      directions.emplace_back(std::move(knots), degrees[static_cast<std::size_t>(r)]);
    } catch (const ArgumentError& e) {
      throw FormatError(std::string("knot matrix: invalid knot block: ") + e.what());
    }
    offset += len;
  }
  if (offset != m.entries.cols())
    throw FormatError("knot matrix: knot blocks do not tile the matrix width");
  return TensorBasis(std::move(directions));
}

std::int64_t nan_count(const KnotMatrix& m) {
  std::int64_t count = 0;
  for (Eigen::Index r = 0; r < m.entries.rows(); ++r)
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c)
      if (std::isnan(m.entries(r, c))) ++count;
  return count;
}

std::size_t header_tail_bytes(std::uint8_t parametric_dim) {
  return 8 * static_cast<std::size_t>(parametric_dim) + 9;
}

std::vector<std::byte> encode_frame(const WireFrame& frame) {
  const FrameHeader& h = frame.header;
  if (h.basis_sizes.size() != h.parametric_dim)
    throw ArgumentError("frame: basis size pair count must equal parametric_dim");
  if (h.payload_bytes != frame.payload.size())
    throw ArgumentError("frame: header payload length does not match payload");

  std::vector<std::byte> out;
  out.reserve(h.encoded_size() + frame.payload.size());
  for (std::uint8_t b : kMagic) out.push_back(static_cast<std::byte>(b));
  put_u16(out, h.version);
  out.push_back(static_cast<std::byte>(h.role));
  out.push_back(static_cast<std::byte>(h.parametric_dim));
  out.push_back(static_cast<std::byte>(h.physical_dim));
  for (const auto& [n, p] : h.basis_sizes) {
    put_u32(out, n);
    put_u32(out, p);
  }
  out.push_back(static_cast<std::byte>(h.kind));
  put_u64(out, h.payload_bytes);
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

WireFrame decode_frame(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderPrefixBytes) throw FormatError("frame: truncated header");
  for (std::size_t i = 0; i < kMagic.size(); ++i)
    if (std::to_integer<std::uint8_t>(bytes[i]) != kMagic[i])
      throw FormatError("frame: bad magic bytes");

  WireFrame frame;
  FrameHeader& h = frame.header;
  h.version = static_cast<std::uint16_t>(get_uint(bytes, 4, 2));
  h.role = static_cast<std::uint8_t>(get_uint(bytes, 6, 1));
  h.parametric_dim = static_cast<std::uint8_t>(get_uint(bytes, 7, 1));
  h.physical_dim = static_cast<std::uint8_t>(get_uint(bytes, 8, 1));
  if (h.parametric_dim > 2) throw FormatError("frame: parametric_dim above 2");

  const std::size_t need = kHeaderPrefixBytes + header_tail_bytes(h.parametric_dim);
  if (bytes.size() < need) throw FormatError("frame: truncated header");
  std::size_t offset = kHeaderPrefixBytes;
  for (int k = 0; k < h.parametric_dim; ++k) {
    const auto n = static_cast<std::uint32_t>(get_uint(bytes, offset, 4));
    const auto p = static_cast<std::uint32_t>(get_uint(bytes, offset + 4, 4));
    h.basis_sizes.emplace_back(n, p);
    offset += 8;
  }
  const auto kind = static_cast<std::uint8_t>(get_uint(bytes, offset, 1));
  if (kind < 1 || kind > 4) throw FormatError("frame: unknown payload kind");
  h.kind = static_cast<PayloadKind>(kind);
  h.payload_bytes = get_uint(bytes, offset + 1, 8);
  offset += 9;

  if (bytes.size() != offset + h.payload_bytes)
    throw FormatError("frame: payload length does not match header");
  frame.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
  return frame;
}

std::vector<std::byte> pack_doubles_row_major(const Eigen::MatrixXd& values) {
  std::vector<std::byte> out(static_cast<std::size_t>(values.size()) * 8);
  std::size_t pos = 0;
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      double v = values(r, c);
      if (std::isnan(v)) v = canonical_nan();
      std::memcpy(out.data() + pos, &v, 8);
      pos += 8;
    }
  return out;
}

Eigen::MatrixXd unpack_doubles_row_major(std::span<const std::byte> bytes, Eigen::Index rows,
                                         Eigen::Index cols) {
  if (bytes.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 8)
    throw FormatError("payload: byte length does not match the expected shape");
  Eigen::MatrixXd values(rows, cols);
  std::size_t pos = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v = 0;
      std::memcpy(&v, bytes.data() + pos, 8);
      values(r, c) = v;
      pos += 8;
    }
  return values;
}

namespace {

void check_params(const OverheadParams& params) {
  if (params.parametric_dim < 1 || params.parametric_dim > 2)
    throw ArgumentError("overhead: parametric_dim must be 1 or 2");
  if (params.degrees.size() != static_cast<std::size_t>(params.parametric_dim))
    throw ArgumentError("overhead: one degree per parametric direction required");
  if (params.physical_dim < 1) throw ArgumentError("overhead: physical_dim must be positive");
  if (params.subdivisions < 1) throw ArgumentError("overhead: subdivisions must be positive");
  for (int p : params.degrees)
    if (p < 0) throw ArgumentError("overhead: negative degree");
}

}  // namespace

std::uint64_t overhead_vertex(const OverheadParams& params) {
  check_params(params);
  std::uint64_t elements = 1, points_per_element = 1;
  for (int k = 0; k < params.parametric_dim; ++k) {
    elements *= static_cast<std::uint64_t>(params.subdivisions);
    points_per_element *= static_cast<std::uint64_t>(params.degrees[static_cast<std::size_t>(k)] + 1);
  }
  return params.timestep_count * static_cast<std::uint64_t>(params.physical_dim) * elements *
         points_per_element;
}

std::uint64_t overhead_spline(const OverheadParams& params) {
  check_params(params);
  std::uint64_t control = 1, knots = 0;
  for (int k = 0; k < params.parametric_dim; ++k) {
    const std::uint64_t p = static_cast<std::uint64_t>(params.degrees[static_cast<std::size_t>(k)]);
    const std::uint64_t n = static_cast<std::uint64_t>(params.subdivisions) + p;
    control *= n;
    knots += n + p + 1;
  }
  return params.timestep_count * static_cast<std::uint64_t>(params.physical_dim) * control + knots;
}

std::uint64_t padded_knot_matrix_doubles(const OverheadParams& params) {
  check_params(params);
  std::uint64_t width = 0;
  for (int k = 0; k < params.parametric_dim; ++k) {
    const std::uint64_t p = static_cast<std::uint64_t>(params.degrees[static_cast<std::size_t>(k)]);
    width += static_cast<std::uint64_t>(params.subdivisions) + 2 * p + 1;
  }
  return static_cast<std::uint64_t>(params.parametric_dim) * width;
}

std::uint64_t knot_matrix_nan_entries(const OverheadParams& params) {
  check_params(params);
  std::uint64_t width = 0;
  for (int k = 0; k < params.parametric_dim; ++k) {
    const std::uint64_t p = static_cast<std::uint64_t>(params.degrees[static_cast<std::size_t>(k)]);
    width += static_cast<std::uint64_t>(params.subdivisions) + 2 * p + 1;
  }
  return static_cast<std::uint64_t>(params.parametric_dim - 1) * width;
}

OverheadReport measured_overhead(const OverheadParams& params, bool spline_mode,
                                 const TransferAccounting& accounting) {
  OverheadReport report;
  report.analytical_doubles =
      spline_mode ? overhead_spline(params) : overhead_vertex(params);
  report.analytical_bytes = report.analytical_doubles * 8;
  report.measured_bytes = accounting.counted_bytes_sent;
  report.nan_entries = accounting.nan_doubles_sent;
  report.discrepancy_bytes = static_cast<std::int64_t>(report.measured_bytes) -
                             static_cast<std::int64_t>(report.analytical_bytes);
  return report;
}

}  // namespace splc::wire
