#ifndef SPLC_HEAT_HPP
#define SPLC_HEAT_HPP

#include <Eigen/Dense>
#include <vector>

#include "splc/bus.hpp"
#include "splc/spline_field.hpp"

namespace splc::heat {

/// u(x, y, t) = 1 + x^2 + alpha y^2 + beta t, which turns the transient heat
/// equation into an exactly representable benchmark: the constant source
/// beta - 2 - 2 alpha and the boundary trace of u close the problem.
struct ManufacturedSolution {
  double alpha = 3.0;
  double beta = 1.3;

  double value(double x, double y, double t) const {
    return 1.0 + x * x + alpha * y * y + beta * t;
  }
  double ddx(double x) const { return 2.0 * x; }
  double ddy(double y) const { return 2.0 * alpha * y; }
  double source() const { return beta - 2.0 - 2.0 * alpha; }
};

enum class SubdomainRole { dirichlet, neumann };

struct Rectangle {
  double x0, x1, y0, y1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Tensor-product B-spline Galerkin discretization of the heat equation on
/// an axis-aligned rectangle, stepped by backward Euler. The coupling edge
/// sits at x = x1 for the Dirichlet role and x = x0 for the Neumann role;
/// every other edge carries the manufactured Dirichlet datum.
class HeatSubdomain {
public:
  HeatSubdomain(Rectangle bounds, int degree, int spans, SubdomainRole role,
                ManufacturedSolution solution);

  const TensorBasis& basis() const noexcept { return basis_; }
  const Rectangle& bounds() const noexcept { return bounds_; }
  SubdomainRole role() const noexcept { return role_; }
  double time() const noexcept { return time_; }
  const Eigen::VectorXd& state() const noexcept { return state_; }

  const Eigen::MatrixXd& mass() const noexcept { return mass_; }
  const Eigen::MatrixXd& stiffness() const noexcept { return stiffness_; }

  /// Knot vector of the coupling-edge trace space (direction 1).
  const KnotVector& interface_knots() const { return basis_.direction(1); }

  /// One backward-Euler sub-iteration solve of the Dirichlet side. The
  /// coupling-edge coefficient line is given in this subdomain's own trace
  /// space; returns the trace line and its inward neighbour, one column
  /// each, as the data sent across the interface.
  Eigen::MatrixXd step_dirichlet(const Eigen::VectorXd& interface_line, double dt);

  /// One backward-Euler sub-iteration solve of the Neumann side against the
  /// physical normal-derivative flux along the coupling edge (a 1D spline
  /// in the interface coordinate, positive in +x). Returns the trace line.
  Eigen::MatrixXd step_neumann(const SplineField& interface_flux, double dt);

  /// Accepts the last sub-iteration solve as the state at time() + dt.
  void commit(double dt);

  /// Relative L2 error of the committed state against the exact solution.
  double l2_error() const;

  /// Coefficient line of the committed state along the coupling edge.
  Eigen::VectorXd interface_trace() const;
  /// Trace plus inward-neighbour lines, the Dirichlet side's payload.
  Eigen::MatrixXd interface_lines() const;

private:
  Eigen::VectorXd dirichlet_values(double t, const Eigen::VectorXd* interface_line) const;
  Eigen::VectorXd solve(double t_next, double dt, const Eigen::VectorXd* interface_line,
                        const SplineField* interface_flux);
  Eigen::VectorXd edge_line(const Eigen::VectorXd& coefficients, int i0) const;

  Rectangle bounds_;
  int degree_;
  SubdomainRole role_;
  ManufacturedSolution solution_;
  TensorBasis basis_;

  Eigen::MatrixXd mass_;
  Eigen::MatrixXd stiffness_;
  Eigen::VectorXd load_unit_;  // integral of each basis function

  std::vector<Eigen::Index> free_;
  std::vector<Eigen::Index> constrained_;
  Eigen::PartialPivLU<Eigen::MatrixXd> system_ff_;
  Eigen::MatrixXd system_fc_;
  double dt_factored_ = -1.0;

  Eigen::VectorXd state_;      // committed coefficients at time_
  Eigen::VectorXd candidate_;  // last sub-iteration solve
  double time_ = 0.0;
};

/// Receiver-side reconstruction of the sender's normal derivative along the
/// coupling edge: the two transmitted coefficient lines weighted by the edge
/// derivatives of the sender's normal-direction basis. `edge_parameter` is
/// the sender's normal-direction parameter of the edge (1 for a right edge),
/// `normal_scale` the physical derivative scale d(xi)/dx.
SplineField interface_normal_derivative(const TensorBasis& sender_basis,
                                        const Eigen::MatrixXd& lines, double edge_parameter,
                                        double normal_scale);

/// Relative L2 error of a 1D flux spline against a constant exact flux,
/// integrated over the flux's own spans. Falls back to the absolute error
/// when the exact flux is numerically zero.
double flux_relative_l2_error(const SplineField& flux, double exact_flux);

struct BenchmarkConfig {
  int degree = 2;
  int spans_dirichlet = 2;  // r_D
  int spans_neumann = 4;    // r_N
  double dt = 0.1;
  double end_time = 1.0;
  ManufacturedSolution solution;
  CouplingScheme scheme;
};

struct BenchmarkStep {
  double time = 0.0;
  double error_dirichlet = 0.0;
  double error_neumann = 0.0;
  double flux_rel_error = 0.0;
  int sub_iterations = 0;
  std::uint64_t counted_bytes = 0;  // cumulative, both directions of travel
};

struct BenchmarkReport {
  std::vector<BenchmarkStep> steps;
  CouplingTranscript dirichlet_transcript;
  CouplingTranscript neumann_transcript;
};

/// Per-side results of a run driven over an externally provided transport.
struct ParticipantReport {
  CouplingTranscript transcript;
  std::vector<double> l2_errors;
  std::vector<double> flux_rel_errors;  // Neumann side only
};

int benchmark_step_count(const BenchmarkConfig& config);

/// Runs one side of the benchmark over the given transport.
ParticipantReport run_participant(SubdomainRole side, const BenchmarkConfig& config,
                                  Transport& transport);

/// Runs both sides on two threads over the given transport pair.
BenchmarkReport run_benchmark(const BenchmarkConfig& config, Transport& dirichlet_end,
                              Transport& neumann_end);
/// Same over an in-process pair.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

std::vector<double> flux_error_series(const BenchmarkReport& report);

}  // namespace splc::heat

#endif
