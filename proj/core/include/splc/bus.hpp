#ifndef SPLC_BUS_HPP
#define SPLC_BUS_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "splc/transport.hpp"
#include "splc/vertex_cloud.hpp"
#include "splc/wire.hpp"

namespace splc {

/// Deterministic send order inside one coupling exchange: the first sender
/// writes its block before reading the peer's.
enum class Role : std::uint8_t { first_sender = 0, second_sender = 1 };

/// What a participant declares about itself: a spline interface (tensor
/// basis) or a vertex interface (point coordinates).
using InterfaceDescription = std::variant<TensorBasis, VertexCloud>;

/// One side of a two-participant coupling session. Owned by exactly one
/// thread; all calls block until the peer has played its part.
class Participant {
public:
  Participant(std::string name, Role role, InterfaceDescription interface, int data_cols,
              Eigen::Index step_rows, Transport& transport);

  /// Spline participant whose step blocks carry one row per basis function.
  static Participant spline(std::string name, Role role, TensorBasis basis, int data_cols,
                            Transport& transport);
  /// Vertex participant whose step blocks carry one row per point.
  static Participant vertex(std::string name, Role role, VertexCloud cloud, int data_cols,
                            Transport& transport);

  /// Exchanges interface descriptions. Must complete exactly once before
  /// any step data flows.
  const InterfaceDescription& handshake();

  /// Blocking per-step data exchange: returns the peer's block. Dimensions
  /// are checked against the declared step shape before any bytes leave.
  Eigen::MatrixXd exchange_step(const Eigen::MatrixXd& send);

  /// Half-operations for asymmetric (serial) schemes.
  void send_block(const Eigen::MatrixXd& block);
  Eigen::MatrixXd receive_block();
  void send_signal(std::uint64_t code);
  std::uint64_t receive_signal();

  const std::string& name() const noexcept { return name_; }
  Role role() const noexcept { return role_; }
  bool handshaken() const noexcept { return peer_.has_value(); }
  const InterfaceDescription& peer_interface() const;
  int steps_completed() const noexcept { return steps_; }
  void note_step_completed() noexcept { ++steps_; }
  const wire::TransferAccounting& accounting() const noexcept { return accounting_; }

  int data_cols() const noexcept { return data_cols_; }
  Eigen::Index step_rows() const noexcept { return step_rows_; }

private:
  void send_frame(wire::PayloadKind kind, const Eigen::MatrixXd& values);
  wire::WireFrame receive_frame();

  std::string name_;
  Role role_;
  InterfaceDescription interface_;
  int data_cols_;
  Eigen::Index step_rows_;
  Transport& transport_;
  std::optional<InterfaceDescription> peer_;
  int steps_ = 0;
  wire::TransferAccounting accounting_;
};

/// Serial-implicit fixed-point scheme with constant under-relaxation on the
/// exchanged interface datum.
struct CouplingScheme {
  double tolerance = 1e-12;  // relative sup-norm of the relaxed update
  double relaxation = 0.5;
  int max_sub_iterations = 100;
};

struct StepTranscript {
  int step = 0;
  int iterations = 0;
  std::vector<double> residuals;  // controller side only
  std::uint64_t counted_bytes_sent = 0;      // cumulative at step end
  std::uint64_t counted_bytes_received = 0;  // cumulative at step end
};

struct CouplingTranscript {
  std::vector<StepTranscript> steps;
  wire::TransferAccounting accounting;
};

using SolveCallback = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& received)>;
using StepAcceptedCallback = std::function<void(int step)>;

/// Drives one participant through `steps` coupled time steps. The first
/// sender solves against the current relaxed interface estimate, the second
/// sender replies to what it receives; the first sender owns relaxation and
/// convergence control and announces both through signal frames. The
/// `initial_estimate` (shape of the peer's block) seeds the first solve and
/// is required for the first sender.
CouplingTranscript run_coupled(Participant& participant, const CouplingScheme& scheme, int steps,
                               const SolveCallback& solve,
                               const StepAcceptedCallback& on_step_accepted,
                               const Eigen::MatrixXd& initial_estimate = Eigen::MatrixXd());

}  // namespace splc

#endif
