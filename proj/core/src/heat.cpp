#include "splc/heat.hpp"

#include <cmath>
#include <future>
#include <sstream>
#include <utility>

#include "splc/coupling.hpp"
#include "splc/errors.hpp"
#include "splc/quadrature.hpp"

namespace splc::heat {

namespace {

// 1D parametric Gram, stiffness, and load-of-one integrals of a knot vector.
struct Univariate {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd load;
};

Univariate univariate_blocks(const KnotVector& kv) {
  const int n = kv.basis_count();
  Univariate u{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
               Eigen::VectorXd::Zero(n)};
  const auto quad = span_quadrature(kv, kv.degree() + 1);
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const auto der = kv.basis_derivatives(quad.points[q], 1);
    const double w = quad.weights[q];
    for (int i = 0; i <= kv.degree(); ++i) {
      u.load(der.first + i) += w * der.values(0, i);
      for (int j = 0; j <= kv.degree(); ++j) {
        u.gram(der.first + i, der.first + j) += w * der.values(0, i) * der.values(0, j);
        u.stiffness(der.first + i, der.first + j) += w * der.values(1, i) * der.values(1, j);
      }
    }
  }
  return u;
}

// (A1 kron A0) for the linear index i0 + n0 * i1.
Eigen::MatrixXd kron_grid(const Eigen::MatrixXd& a1, const Eigen::MatrixXd& a0) {
  Eigen::MatrixXd out(a0.rows() * a1.rows(), a0.cols() * a1.cols());
  for (Eigen::Index i1 = 0; i1 < a1.rows(); ++i1)
    for (Eigen::Index j1 = 0; j1 < a1.cols(); ++j1)
      out.block(i1 * a0.rows(), j1 * a0.cols(), a0.rows(), a0.cols()) = a1(i1, j1) * a0;
  return out;
}

}  // namespace

HeatSubdomain::HeatSubdomain(Rectangle bounds, int degree, int spans, SubdomainRole role,
                             ManufacturedSolution solution)
    : bounds_(bounds),
      degree_(degree),
      role_(role),
      solution_(solution),
      basis_(uniform_open_knots(degree, spans), uniform_open_knots(degree, spans)) {
  if (degree < 2) throw ArgumentError("heat subdomain: degree must be at least 2");
  if (!(bounds.width() > 0 && bounds.height() > 0))
    throw ArgumentError("heat subdomain: empty rectangle");

  const Univariate u0 = univariate_blocks(basis_.direction(0));
  const Univariate u1 = univariate_blocks(basis_.direction(1));
  const double lx = bounds_.width(), ly = bounds_.height();

  mass_ = lx * ly * kron_grid(u1.gram, u0.gram);
  stiffness_ = (ly / lx) * kron_grid(u1.gram, u0.stiffness) +
               (lx / ly) * kron_grid(u1.stiffness, u0.gram);
  load_unit_ = lx * ly * kron_grid(u1.load, u0.load);

  const int n0 = static_cast<int>(basis_.count(0));
  const int n1 = static_cast<int>(basis_.count(1));
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i0 = 0; i0 < n0; ++i0) {
      const bool outer_x = role_ == SubdomainRole::dirichlet ? i0 == 0 : i0 == n0 - 1;
      const bool coupling_x = role_ == SubdomainRole::dirichlet ? i0 == n0 - 1 : false;
      const bool horizontal = i1 == 0 || i1 == n1 - 1;
      if (outer_x || coupling_x || horizontal)
        constrained_.push_back(basis_.linear_index(i0, i1));
      else
        free_.push_back(basis_.linear_index(i0, i1));
    }

  // Exactly representable initial condition.
  const SplineField initial = l2_project(
      [&](const Eigen::VectorXd& xi) {
        Eigen::VectorXd v(1);
        v(0) = solution_.value(bounds_.x0 + lx * xi(0), bounds_.y0 + ly * xi(1), 0.0);
        return v;
      },
      1, basis_);
  state_ = initial.coefficients().col(0);
}

Eigen::VectorXd HeatSubdomain::edge_line(const Eigen::VectorXd& coefficients, int i0) const {
  const int n1 = static_cast<int>(basis_.count(1));
  Eigen::VectorXd line(n1);
  for (int i1 = 0; i1 < n1; ++i1) line(i1) = coefficients(basis_.linear_index(i0, i1));
  return line;
}

Eigen::VectorXd HeatSubdomain::dirichlet_values(double t,
                                                const Eigen::VectorXd* interface_line) const {
  const int n0 = static_cast<int>(basis_.count(0));
  const int n1 = static_cast<int>(basis_.count(1));
  const double lx = bounds_.width(), ly = bounds_.height();
  Eigen::VectorXd values = Eigen::VectorXd::Zero(basis_.total_count());

  if (role_ == SubdomainRole::dirichlet) {
    if (!interface_line) throw ArgumentError("heat subdomain: interface line required");
    if (interface_line->size() != n1)
      throw ArgumentError("heat subdomain: interface line length mismatch");
    for (int i1 = 0; i1 < n1; ++i1)
      values(basis_.linear_index(n0 - 1, i1)) = (*interface_line)(i1);
  }

  // 1D fits of the boundary datum on the outer edges; the trace of the
  // manufactured solution is quadratic, so these are exact. Corners are
  // written last by the horizontal edges.
  auto fit_vertical = [&](double x_fixed) {
    const SplineField f = l2_project(
        [&](const Eigen::VectorXd& eta) {
          Eigen::VectorXd v(1);
          v(0) = solution_.value(x_fixed, bounds_.y0 + ly * eta(0), t);
          return v;
        },
        1, TensorBasis(basis_.direction(1)));
    return f.coefficients().col(0);
  };
  auto fit_horizontal = [&](double y_fixed) {
    const SplineField f = l2_project(
        [&](const Eigen::VectorXd& xi) {
          Eigen::VectorXd v(1);
          v(0) = solution_.value(bounds_.x0 + lx * xi(0), y_fixed, t);
          return v;
        },
        1, TensorBasis(basis_.direction(0)));
    return f.coefficients().col(0);
  };

  const int outer_i0 = role_ == SubdomainRole::dirichlet ? 0 : n0 - 1;
  const double outer_x = role_ == SubdomainRole::dirichlet ? bounds_.x0 : bounds_.x1;
  const Eigen::VectorXd vertical = fit_vertical(outer_x);
  for (int i1 = 0; i1 < n1; ++i1) values(basis_.linear_index(outer_i0, i1)) = vertical(i1);

  const Eigen::VectorXd bottom = fit_horizontal(bounds_.y0);
  const Eigen::VectorXd top = fit_horizontal(bounds_.y1);
  for (int i0 = 0; i0 < n0; ++i0) {
    values(basis_.linear_index(i0, 0)) = bottom(i0);
    values(basis_.linear_index(i0, n1 - 1)) = top(i0);
  }
  return values;
}

Eigen::VectorXd HeatSubdomain::solve(double t_next, double dt,
                                     const Eigen::VectorXd* interface_line,
                                     const SplineField* interface_flux) {
  if (!(dt > 0)) throw ArgumentError("heat subdomain: time step must be positive");

  if (dt != dt_factored_) {
    const Eigen::MatrixXd system = mass_ / dt + stiffness_;
    Eigen::MatrixXd ff(free_.size(), free_.size());
    system_fc_.resize(static_cast<Eigen::Index>(free_.size()),
                      static_cast<Eigen::Index>(constrained_.size()));
    for (std::size_t a = 0; a < free_.size(); ++a) {
      for (std::size_t b = 0; b < free_.size(); ++b)
        ff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            system(free_[a], free_[b]);
      for (std::size_t b = 0; b < constrained_.size(); ++b)
        system_fc_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            system(free_[a], constrained_[b]);
    }
    system_ff_.compute(ff);
    dt_factored_ = dt;
  }

  const Eigen::VectorXd values = dirichlet_values(t_next, interface_line);
  Eigen::VectorXd rhs = mass_ * state_ / dt + solution_.source() * load_unit_;

  if (interface_flux) {
    if (role_ != SubdomainRole::neumann)
      throw ArgumentError("heat subdomain: flux on a Dirichlet subdomain");
    // Natural boundary term on the coupling edge x = x0: the outward normal
    // is -x there, so grad(u).n = -flux.
    const KnotVector& own = basis_.direction(1);
    const KnotVector& flux_kv = interface_flux->basis().direction(0);
    const auto quad = merged_span_quadrature(own, flux_kv,
                                             std::max(own.degree(), flux_kv.degree()) + 1);
    const double ly = bounds_.height();
    for (std::size_t q = 0; q < quad.points.size(); ++q) {
      const double flux = interface_flux->value_scalar(quad.points[q]);
      const auto b = own.basis_values(quad.points[q]);
      for (int j = 0; j <= own.degree(); ++j)
        rhs(basis_.linear_index(0, b.first + j)) -= ly * quad.weights[q] * flux * b.values(j);
    }
  }

  Eigen::VectorXd constrained_values(constrained_.size());
  Eigen::VectorXd rhs_free(free_.size());
  for (std::size_t b = 0; b < constrained_.size(); ++b)
    constrained_values(static_cast<Eigen::Index>(b)) = values(constrained_[b]);
  for (std::size_t a = 0; a < free_.size(); ++a)
    rhs_free(static_cast<Eigen::Index>(a)) = rhs(free_[a]);
  rhs_free -= system_fc_ * constrained_values;

  const Eigen::VectorXd solution_free = system_ff_.solve(rhs_free);

  Eigen::VectorXd full(basis_.total_count());
  for (std::size_t a = 0; a < free_.size(); ++a)
    full(free_[a]) = solution_free(static_cast<Eigen::Index>(a));
  for (std::size_t b = 0; b < constrained_.size(); ++b)
    full(constrained_[b]) = constrained_values(static_cast<Eigen::Index>(b));
  candidate_ = full;
  return full;
}

Eigen::MatrixXd HeatSubdomain::step_dirichlet(const Eigen::VectorXd& interface_line, double dt) {
  if (role_ != SubdomainRole::dirichlet)
    throw ArgumentError("heat subdomain: not the Dirichlet side");
  const Eigen::VectorXd full = solve(time_ + dt, dt, &interface_line, nullptr);
  const int n0 = static_cast<int>(basis_.count(0));
  Eigen::MatrixXd lines(basis_.count(1), 2);
  lines.col(0) = edge_line(full, n0 - 1);
  lines.col(1) = edge_line(full, n0 - 2);
  return lines;
}

Eigen::MatrixXd HeatSubdomain::step_neumann(const SplineField& interface_flux, double dt) {
  if (role_ != SubdomainRole::neumann)
    throw ArgumentError("heat subdomain: not the Neumann side");
  const Eigen::VectorXd full = solve(time_ + dt, dt, nullptr, &interface_flux);
  Eigen::MatrixXd line(basis_.count(1), 1);
  line.col(0) = edge_line(full, 0);
  return line;
}

void HeatSubdomain::commit(double dt) {
  if (candidate_.size() != state_.size())
    throw ArgumentError("heat subdomain: no sub-iteration solve to commit");
  state_ = candidate_;
  time_ += dt;
}

double HeatSubdomain::l2_error() const {
  const SplineField field(basis_, state_);
  const double lx = bounds_.width(), ly = bounds_.height();
  const auto q0 = span_quadrature(basis_.direction(0), degree_ + 1);
  const auto q1 = span_quadrature(basis_.direction(1), degree_ + 1);
  double num = 0.0, den = 0.0;
  Eigen::VectorXd xi(2);
  for (std::size_t b = 0; b < q1.points.size(); ++b)
    for (std::size_t a = 0; a < q0.points.size(); ++a) {
      xi << q0.points[a], q1.points[b];
      const double w = q0.weights[a] * q1.weights[b] * lx * ly;
      const double exact =
          solution_.value(bounds_.x0 + lx * xi(0), bounds_.y0 + ly * xi(1), time_);
      const double diff = field.value(xi)(0) - exact;
      num += w * diff * diff;
      den += w * exact * exact;
    }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

Eigen::VectorXd HeatSubdomain::interface_trace() const {
  const int n0 = static_cast<int>(basis_.count(0));
  return edge_line(state_, role_ == SubdomainRole::dirichlet ? n0 - 1 : 0);
}

Eigen::MatrixXd HeatSubdomain::interface_lines() const {
  const int n0 = static_cast<int>(basis_.count(0));
  const int edge = role_ == SubdomainRole::dirichlet ? n0 - 1 : 0;
  const int inward = role_ == SubdomainRole::dirichlet ? n0 - 2 : 1;
  Eigen::MatrixXd lines(basis_.count(1), 2);
  lines.col(0) = edge_line(state_, edge);
  lines.col(1) = edge_line(state_, inward);
  return lines;
}

SplineField interface_normal_derivative(const TensorBasis& sender_basis,
                                        const Eigen::MatrixXd& lines, double edge_parameter,
                                        double normal_scale) {
  if (sender_basis.dim() != 2)
    throw ArgumentError("interface derivative: sender basis must be two-dimensional");
  const KnotVector& normal_kv = sender_basis.direction(0);
  if (lines.cols() != 2 || lines.rows() != sender_basis.count(1))
    throw ArgumentError("interface derivative: expected trace and neighbour lines");

  // At an open-knot-vector endpoint only the edge function and its inward
  // neighbour carry a first derivative, so the two transmitted lines
  // reconstruct the normal derivative exactly.
  const auto der = normal_kv.basis_derivatives(edge_parameter, 1);
  const int p = normal_kv.degree();
  const bool right_edge = edge_parameter >= normal_kv.domain_max();
  const double w_edge = der.values(1, right_edge ? p : 0);
  const double w_inward = der.values(1, right_edge ? p - 1 : 1);

  Eigen::MatrixXd coeffs = normal_scale * (w_edge * lines.col(0) + w_inward * lines.col(1));
  return SplineField(TensorBasis(sender_basis.direction(1)), std::move(coeffs));
}

double flux_relative_l2_error(const SplineField& flux, double exact_flux) {
  const KnotVector& kv = flux.basis().direction(0);
  const auto quad = span_quadrature(kv, kv.degree() + 1);
  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const double diff = flux.value_scalar(quad.points[q]) - exact_flux;
    num += quad.weights[q] * diff * diff;
    den += quad.weights[q] * exact_flux * exact_flux;
  }
  if (std::sqrt(den) < 1e-14) return std::sqrt(num);
  return std::sqrt(num / den);
}

int benchmark_step_count(const BenchmarkConfig& config) {
  if (!(config.dt > 0)) throw ArgumentError("heat benchmark: dt must be positive");
  if (!(config.end_time > 0)) throw ArgumentError("heat benchmark: end time must be positive");
  const int steps = static_cast<int>(std::llround(config.end_time / config.dt));
  return steps < 1 ? 1 : steps;
}

ParticipantReport run_participant(SubdomainRole side, const BenchmarkConfig& config,
                                  Transport& transport) {
  const bool is_dirichlet = side == SubdomainRole::dirichlet;
  const int spans = is_dirichlet ? config.spans_dirichlet : config.spans_neumann;
  const Rectangle bounds = is_dirichlet ? Rectangle{0.0, 1.0, 0.0, 1.0}
                                        : Rectangle{1.0, 2.0, 0.0, 1.0};
  HeatSubdomain subdomain(bounds, config.degree, spans, side, config.solution);

  Participant participant(is_dirichlet ? "dirichlet" : "neumann",
                          is_dirichlet ? Role::first_sender : Role::second_sender,
                          InterfaceDescription(subdomain.basis()), is_dirichlet ? 2 : 1,
                          subdomain.basis().count(1), transport);

  const InterfaceDescription& remote = participant.handshake();
  const auto* peer_basis = std::get_if<TensorBasis>(&remote);
  if (!peer_basis)
    throw ProtocolError("heat benchmark: peer did not declare a spline interface");

  const int steps = benchmark_step_count(config);
  ParticipantReport report;

  if (is_dirichlet) {
    const SplineSpaceTransform to_peer =
        build_space_transform(TensorBasis(subdomain.interface_knots()),
                              TensorBasis(peer_basis->direction(1)));
    const SplineSpaceTransform from_peer =
        build_space_transform(TensorBasis(peer_basis->direction(1)),
                              TensorBasis(subdomain.interface_knots()));

    const Eigen::MatrixXd initial = to_peer.apply(subdomain.interface_trace());
    auto solve_fn = [&](const Eigen::MatrixXd& received) {
      const Eigen::VectorXd own_line = from_peer.apply(received).col(0);
      return subdomain.step_dirichlet(own_line, config.dt);
    };
    auto accept = [&](int) {
      subdomain.commit(config.dt);
      report.l2_errors.push_back(subdomain.l2_error());
    };
    report.transcript =
        run_coupled(participant, config.scheme, steps, solve_fn, accept, initial);
  } else {
    double last_flux_error = 0.0;
    auto solve_fn = [&](const Eigen::MatrixXd& received) {
      const SplineField flux = interface_normal_derivative(*peer_basis, received, 1.0, 1.0);
      last_flux_error =
          flux_relative_l2_error(flux, config.solution.ddx(subdomain.bounds().x0));
      return subdomain.step_neumann(flux, config.dt);
    };
    auto accept = [&](int) {
      subdomain.commit(config.dt);
      report.l2_errors.push_back(subdomain.l2_error());
      report.flux_rel_errors.push_back(last_flux_error);
    };
    report.transcript = run_coupled(participant, config.scheme, steps, solve_fn, accept);
  }
  return report;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, Transport& dirichlet_end,
                              Transport& neumann_end) {
  auto dirichlet_future = std::async(std::launch::async, [&] {
    return run_participant(SubdomainRole::dirichlet, config, dirichlet_end);
  });
  auto neumann_future = std::async(std::launch::async, [&] {
    return run_participant(SubdomainRole::neumann, config, neumann_end);
  });

  // Surface the first error; the closing transport unblocks the peer.
  ParticipantReport dirichlet, neumann;
  std::exception_ptr error;
  try {
    dirichlet = dirichlet_future.get();
  } catch (...) {
    error = std::current_exception();
  }
  try {
    neumann = neumann_future.get();
  } catch (...) {
    if (!error) error = std::current_exception();
  }
  if (error) std::rethrow_exception(error);

  BenchmarkReport report;
  report.dirichlet_transcript = dirichlet.transcript;
  report.neumann_transcript = neumann.transcript;
  const int steps = benchmark_step_count(config);
  for (int k = 0; k < steps; ++k) {
    BenchmarkStep step;
    step.time = (k + 1) * config.dt;
    step.error_dirichlet = dirichlet.l2_errors.at(static_cast<std::size_t>(k));
    step.error_neumann = neumann.l2_errors.at(static_cast<std::size_t>(k));
    step.flux_rel_error = neumann.flux_rel_errors.at(static_cast<std::size_t>(k));
    const auto& d = dirichlet.transcript.steps.at(static_cast<std::size_t>(k));
    step.sub_iterations = d.iterations;
    step.counted_bytes = d.counted_bytes_sent + d.counted_bytes_received;
    report.steps.push_back(step);
  }
  return report;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  auto [dirichlet_end, neumann_end] = make_inproc_pair();
  return run_benchmark(config, *dirichlet_end, *neumann_end);
}

std::vector<double> flux_error_series(const BenchmarkReport& report) {
  std::vector<double> series;
  series.reserve(report.steps.size());
  for (const auto& step : report.steps) series.push_back(step.flux_rel_error);
  return series;
}

}  // namespace splc::heat
