#ifndef SPLC_WIRE_HPP
#define SPLC_WIRE_HPP

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "splc/tensor_basis.hpp"

namespace splc::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'P', 'L', 'C'};
inline constexpr std::uint16_t kFormatVersion = 1;
/// Canonical quiet-NaN bit pattern used for padding entries.
inline constexpr std::uint64_t kCanonicalNanBits = 0x7ff8000000000000ull;

/// Knot vectors of a tensor basis embedded in one matrix, one row per
/// parametric direction, block-diagonal with quiet-NaN padding. Row i holds
/// its n_i + p_i + 1 knots in its own column block; every other entry is NaN.
struct KnotMatrix {
  Eigen::MatrixXd entries;  // dim x sum_i (n_i + p_i + 1), row-major on the wire
};

KnotMatrix encode_knot_matrix(const TensorBasis& basis);
/// Inverse of the encoding; degrees must be supplied since the matrix only
/// stores knots. Finite entries inside a padding zone are a format error.
TensorBasis decode_knot_matrix(const KnotMatrix& m, std::span<const int> degrees);
std::int64_t nan_count(const KnotMatrix& m);

enum class PayloadKind : std::uint8_t {
  knot_matrix = 1,    // handshake payload of a spline participant
  control_block = 2,  // per-step field data (control point values)
  vertex_mesh = 3,    // handshake payload of a vertex participant (coordinates)
  control_signal = 4, // coupling-scheme signalling, one u64
};

/// Frame header. All multi-byte integers little-endian; reals binary64
/// little-endian, row-major. The (n_i, p_i) pairs describe the sender's
/// interface basis; a vertex participant sends zero pairs (parametric_dim 0).
struct FrameHeader {
  std::uint16_t version = kFormatVersion;
  std::uint8_t role = 0;
  std::uint8_t parametric_dim = 0;
  std::uint8_t physical_dim = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> basis_sizes;  // (n_i, p_i)
  PayloadKind kind = PayloadKind::control_block;
  std::uint64_t payload_bytes = 0;

  std::size_t encoded_size() const noexcept { return 9 + 8 * basis_sizes.size() + 9; }
};

struct WireFrame {
  FrameHeader header;
  std::vector<std::byte> payload;
};

std::vector<std::byte> encode_frame(const WireFrame& frame);
WireFrame decode_frame(std::span<const std::byte> bytes);

/// Fixed-size prefix of the header up to and including parametric_dim's
/// pair count, enough to size the rest of a streamed read.
inline constexpr std::size_t kHeaderPrefixBytes = 9;
/// Bytes remaining in the header once the prefix (and so parametric_dim)
/// is known.
std::size_t header_tail_bytes(std::uint8_t parametric_dim);

std::vector<std::byte> pack_doubles_row_major(const Eigen::MatrixXd& values);
Eigen::MatrixXd unpack_doubles_row_major(std::span<const std::byte> bytes, Eigen::Index rows,
                                         Eigen::Index cols);

/// Sweep cell of the communication-overhead experiments. `subdivisions` is
/// the per-direction span count r; vertex mode uses r^parametric_dim
/// elements with (degree+1)^parametric_dim quadrature points each, spline
/// mode uses n_i = r + degree_i basis functions per direction.
struct OverheadParams {
  std::uint64_t timestep_count = 1;
  int physical_dim = 3;
  int parametric_dim = 2;
  std::vector<int> degrees = {2, 2};
  int subdivisions = 2;
};

/// Closed-form double counts (8 bytes each once on the wire).
std::uint64_t overhead_vertex(const OverheadParams& params);
std::uint64_t overhead_spline(const OverheadParams& params);
/// Entry count of the padded knot matrix actually transmitted (finite + NaN).
std::uint64_t padded_knot_matrix_doubles(const OverheadParams& params);
/// NaN entries of that matrix: (dim - 1) * sum_i (n_i + p_i + 1).
std::uint64_t knot_matrix_nan_entries(const OverheadParams& params);

/// Per-direction byte accounting of one participant. `counted` covers field
/// payloads only (knot matrices and control blocks); mesh-coordinate and
/// signalling frames contribute to the totals but not to the overhead
/// figures, which model field data.
struct TransferAccounting {
  std::uint64_t payload_bytes_sent = 0;
  std::uint64_t payload_bytes_received = 0;
  std::uint64_t counted_bytes_sent = 0;
  std::uint64_t counted_bytes_received = 0;
  std::uint64_t nan_doubles_sent = 0;
  std::uint64_t nan_doubles_received = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
};

struct OverheadReport {
  std::uint64_t analytical_doubles = 0;
  std::uint64_t analytical_bytes = 0;
  std::uint64_t measured_bytes = 0;
  std::uint64_t nan_entries = 0;
  std::int64_t discrepancy_bytes = 0;  // measured - analytical
};

/// Report for one direction of travel of a completed session: measured
/// bytes are the sender's counted field payload.
OverheadReport measured_overhead(const OverheadParams& params, bool spline_mode,
                                 const TransferAccounting& accounting);

}  // namespace splc::wire

#endif
