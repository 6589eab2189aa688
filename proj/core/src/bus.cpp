#include "splc/bus.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <utility>

#include "splc/errors.hpp"

namespace splc {

namespace {

std::uint64_t count_nan_doubles(std::span<const std::byte> payload) {
  std::uint64_t count = 0;
  for (std::size_t pos = 0; pos + 8 <= payload.size(); pos += 8) {
    double v = 0;
    std::memcpy(&v, payload.data() + pos, 8);
    if (std::isnan(v)) ++count;
  }
  return count;
}

bool counted_kind(wire::PayloadKind kind) {
  return kind == wire::PayloadKind::knot_matrix || kind == wire::PayloadKind::control_block;
}

}  // namespace

Participant::Participant(std::string name, Role role, InterfaceDescription interface,
                         int data_cols, Eigen::Index step_rows, Transport& transport)
    : name_(std::move(name)),
      role_(role),
      interface_(std::move(interface)),
      data_cols_(data_cols),
      step_rows_(step_rows),
      transport_(transport) {
  if (data_cols_ < 1) throw ArgumentError("participant: data column count must be positive");
  if (step_rows_ < 1) throw ArgumentError("participant: step row count must be positive");
}

Participant Participant::spline(std::string name, Role role, TensorBasis basis, int data_cols,
                                Transport& transport) {
  const Eigen::Index rows = basis.total_count();
  return Participant(std::move(name), role, InterfaceDescription(std::move(basis)), data_cols,
                     rows, transport);
}

Participant Participant::vertex(std::string name, Role role, VertexCloud cloud, int data_cols,
                                Transport& transport) {
  const Eigen::Index rows = cloud.size();
  return Participant(std::move(name), role, InterfaceDescription(std::move(cloud)), data_cols,
                     rows, transport);
}

void Participant::send_frame(wire::PayloadKind kind, const Eigen::MatrixXd& values) {
  wire::WireFrame frame;
  frame.header.version = wire::kFormatVersion;
  frame.header.role = static_cast<std::uint8_t>(role_);
  frame.header.kind = kind;
  frame.header.physical_dim = static_cast<std::uint8_t>(values.cols());
  if (const auto* basis = std::get_if<TensorBasis>(&interface_)) {
    frame.header.parametric_dim = static_cast<std::uint8_t>(basis->dim());
    for (int k = 0; k < basis->dim(); ++k)
      frame.header.basis_sizes.emplace_back(
          static_cast<std::uint32_t>(basis->direction(k).basis_count()),
          static_cast<std::uint32_t>(basis->direction(k).degree()));
  }
  frame.payload = wire::pack_doubles_row_major(values);
  frame.header.payload_bytes = frame.payload.size();

  const std::vector<std::byte> bytes = wire::encode_frame(frame);
  transport_.send(bytes);

  accounting_.frames_sent += 1;
  accounting_.payload_bytes_sent += frame.payload.size();
  if (counted_kind(kind)) {
    accounting_.counted_bytes_sent += frame.payload.size();
    if (kind == wire::PayloadKind::knot_matrix)
      accounting_.nan_doubles_sent += count_nan_doubles(frame.payload);
  }
}

wire::WireFrame Participant::receive_frame() {
  std::vector<std::byte> bytes(wire::kHeaderPrefixBytes);
  transport_.receive_exact(bytes);
  const auto parametric_dim = std::to_integer<std::uint8_t>(bytes[7]);
  if (parametric_dim > 2) throw FormatError("frame: parametric_dim above 2");

  const std::size_t tail = wire::header_tail_bytes(parametric_dim);
  bytes.resize(bytes.size() + tail);
  transport_.receive_exact(std::span(bytes).last(tail));

  std::uint64_t payload_bytes = 0;
  std::memcpy(&payload_bytes, bytes.data() + bytes.size() - 8, 8);
  bytes.resize(bytes.size() + payload_bytes);
  transport_.receive_exact(std::span(bytes).last(static_cast<std::size_t>(payload_bytes)));

  wire::WireFrame frame = wire::decode_frame(bytes);
  if (frame.header.version != wire::kFormatVersion) {
    std::ostringstream os;
    os << "participant " << name_ << ": peer speaks format version " << frame.header.version
       << ", expected " << wire::kFormatVersion;
    throw ProtocolError(os.str());
  }
  if (frame.header.role == static_cast<std::uint8_t>(role_))
    throw ProtocolError("participant " + name_ + ": peer claims the same role");

  accounting_.frames_received += 1;
  accounting_.payload_bytes_received += frame.payload.size();
  if (counted_kind(frame.header.kind)) {
    accounting_.counted_bytes_received += frame.payload.size();
    if (frame.header.kind == wire::PayloadKind::knot_matrix)
      accounting_.nan_doubles_received += count_nan_doubles(frame.payload);
  }
  return frame;
}

namespace {

InterfaceDescription decode_interface(const wire::WireFrame& frame) {
  const auto& h = frame.header;
  if (h.kind == wire::PayloadKind::knot_matrix) {
    if (h.parametric_dim < 1) throw FormatError("handshake: knot matrix without directions");
    const std::uint64_t doubles = h.payload_bytes / 8;
    if (doubles % h.parametric_dim != 0)
      throw FormatError("handshake: knot matrix width is not a whole number of columns");
    wire::KnotMatrix m;
    m.entries = wire::unpack_doubles_row_major(frame.payload, h.parametric_dim,
                                               static_cast<Eigen::Index>(doubles / h.parametric_dim));
    std::vector<int> degrees;
    for (const auto& [n, p] : h.basis_sizes) degrees.push_back(static_cast<int>(p));
    TensorBasis basis = wire::decode_knot_matrix(m, degrees);
    for (int k = 0; k < basis.dim(); ++k)
      if (basis.direction(k).basis_count() !=
          static_cast<int>(h.basis_sizes[static_cast<std::size_t>(k)].first))
        throw FormatError("handshake: knot matrix disagrees with declared basis count");
    return basis;
  }
  if (h.kind == wire::PayloadKind::vertex_mesh) {
    if (h.physical_dim < 1) throw FormatError("handshake: vertex mesh without coordinates");
    const std::uint64_t doubles = h.payload_bytes / 8;
    if (doubles % h.physical_dim != 0)
      throw FormatError("handshake: coordinate count is not a whole number of points");
    return VertexCloud(wire::unpack_doubles_row_major(
        frame.payload, static_cast<Eigen::Index>(doubles / h.physical_dim), h.physical_dim));
  }
  throw ProtocolError("handshake: peer sent a data frame before its interface description");
}

}  // namespace

const InterfaceDescription& Participant::handshake() {
  if (handshaken()) throw ProtocolError("participant " + name_ + ": handshake already completed");

  auto send_description = [&] {
    if (const auto* basis = std::get_if<TensorBasis>(&interface_)) {
      const wire::KnotMatrix m = wire::encode_knot_matrix(*basis);
      send_frame(wire::PayloadKind::knot_matrix, m.entries);
    } else {
      send_frame(wire::PayloadKind::vertex_mesh, std::get<VertexCloud>(interface_).points());
    }
  };

  if (role_ == Role::first_sender) {
    send_description();
    peer_ = decode_interface(receive_frame());
  } else {
    wire::WireFrame frame = receive_frame();
    send_description();
    peer_ = decode_interface(frame);
  }
  return *peer_;
}

const InterfaceDescription& Participant::peer_interface() const {
  if (!peer_) throw ProtocolError("participant " + name_ + ": no handshake yet");
  return *peer_;
}

void Participant::send_block(const Eigen::MatrixXd& block) {
  if (!handshaken())
    throw ProtocolError("participant " + name_ + ": step exchange before handshake");
  if (block.rows() != step_rows_ || block.cols() != data_cols_) {
    std::ostringstream os;
    os << "participant " << name_ << ": step block is " << block.rows() << "x" << block.cols()
       << ", declared interface expects " << step_rows_ << "x" << data_cols_;
    throw ArgumentError(os.str());
  }
  send_frame(wire::PayloadKind::control_block, block);
}

Eigen::MatrixXd Participant::receive_block() {
  if (!handshaken())
    throw ProtocolError("participant " + name_ + ": step exchange before handshake");
  const wire::WireFrame frame = receive_frame();
  if (frame.header.kind != wire::PayloadKind::control_block)
    throw ProtocolError("participant " + name_ + ": expected a control block");
  const int cols = frame.header.physical_dim;
  if (cols < 1 || frame.header.payload_bytes % (8 * static_cast<std::uint64_t>(cols)) != 0)
    throw FormatError("control block: payload does not tile into rows");
  const auto rows = static_cast<Eigen::Index>(frame.header.payload_bytes / 8 / cols);
  return wire::unpack_doubles_row_major(frame.payload, rows, cols);
}

Eigen::MatrixXd Participant::exchange_step(const Eigen::MatrixXd& send) {
  Eigen::MatrixXd received;
  if (role_ == Role::first_sender) {
    send_block(send);
    received = receive_block();
  } else {
    received = receive_block();
    send_block(send);
  }
  ++steps_;
  return received;
}

void Participant::send_signal(std::uint64_t code) {
  Eigen::MatrixXd payload(1, 1);
  double as_double = 0;
  std::memcpy(&as_double, &code, 8);
  payload(0, 0) = as_double;
  send_frame(wire::PayloadKind::control_signal, payload);
}

std::uint64_t Participant::receive_signal() {
  const wire::WireFrame frame = receive_frame();
  if (frame.header.kind != wire::PayloadKind::control_signal)
    throw ProtocolError("participant " + name_ + ": expected a signal frame");
  if (frame.payload.size() != 8) throw FormatError("signal frame: payload must be one u64");
  std::uint64_t code = 0;
  std::memcpy(&code, frame.payload.data(), 8);
  return code;
}

namespace {

constexpr std::uint64_t kSignalContinue = 0;
constexpr std::uint64_t kSignalConverged = 1;
constexpr std::uint64_t kSignalAbort = 2;

double relative_update(const Eigen::MatrixXd& next, const Eigen::MatrixXd& prev) {
  const double num = (next - prev).cwiseAbs().maxCoeff();
  const double den = next.cwiseAbs().maxCoeff();
  return den > 1e-14 ? num / den : num;
}

}  // namespace

CouplingTranscript run_coupled(Participant& participant, const CouplingScheme& scheme, int steps,
                               const SolveCallback& solve,
                               const StepAcceptedCallback& on_step_accepted,
                               const Eigen::MatrixXd& initial_estimate) {
  if (steps < 1) throw ArgumentError("coupled run: need at least one step");
  if (scheme.max_sub_iterations < 1 || !(scheme.tolerance > 0) ||
      !(scheme.relaxation > 0 && scheme.relaxation <= 1))
    throw ArgumentError("coupled run: invalid scheme parameters");

  const bool controller = participant.role() == Role::first_sender;
  if (controller && initial_estimate.size() == 0)
    throw ArgumentError("coupled run: the first sender needs an initial interface estimate");

  CouplingTranscript transcript;
  Eigen::MatrixXd estimate = initial_estimate;

  for (int step = 1; step <= steps; ++step) {
    StepTranscript record;
    record.step = step;

    if (controller) {
      for (int k = 1; k <= scheme.max_sub_iterations; ++k) {
        participant.send_block(solve(estimate));
        const Eigen::MatrixXd received = participant.receive_block();
        if (received.rows() != estimate.rows() || received.cols() != estimate.cols())
          throw ArgumentError("coupled run: peer block shape changed mid-session");

        const Eigen::MatrixXd relaxed =
            (1.0 - scheme.relaxation) * estimate + scheme.relaxation * received;
        const double residual = relative_update(relaxed, estimate);
        record.residuals.push_back(residual);
        estimate = relaxed;
        record.iterations = k;

        if (residual < scheme.tolerance) {
          participant.send_signal(kSignalConverged);
          break;
        }
        if (k == scheme.max_sub_iterations) {
          participant.send_signal(kSignalAbort);
          throw ConvergenceError("coupled run: no convergence within " +
                                     std::to_string(scheme.max_sub_iterations) +
                                     " sub-iterations",
                                 record.residuals);
        }
        participant.send_signal(kSignalContinue);
      }
    } else {
      for (int k = 1; k <= scheme.max_sub_iterations + 1; ++k) {
        const Eigen::MatrixXd received = participant.receive_block();
        participant.send_block(solve(received));
        const std::uint64_t signal = participant.receive_signal();
        record.iterations = k;
        if (signal == kSignalConverged) break;
        if (signal == kSignalAbort)
          throw ConvergenceError("coupled run: peer reported non-convergence", {});
      }
    }

    participant.note_step_completed();
    record.counted_bytes_sent = participant.accounting().counted_bytes_sent;
    record.counted_bytes_received = participant.accounting().counted_bytes_received;
    transcript.steps.push_back(std::move(record));
    if (on_step_accepted) on_step_accepted(step);
  }

  transcript.accounting = participant.accounting();
  return transcript;
}

}  // namespace splc
