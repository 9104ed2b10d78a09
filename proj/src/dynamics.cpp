#include "sgobs/dynamics.hpp"

namespace sgobs {

VectorXd rhs_field(const FieldState& state, const PhysicalParams& params,
                   double ghost_right, const Grid& grid) {
  validate(state, grid);
  if (!std::isfinite(ghost_right))
    throw Error(ErrorKind::Numeric, "ghost value is not finite");
  VectorXd accel(state.z.size());
  field_acceleration(state.z, ghost_right, params, grid, accel);
  return accel;
}

ClosedLoopSystem::ClosedLoopSystem(PhysicalParams params, Grid grid,
                                   std::optional<ControllerConfig> controller,
                                   double alpha, Mode mode)
    : params_(params), grid_(grid), controller_(std::move(controller)), alpha_(alpha),
      mode_(mode) {
  if (mode_ != Mode::Unforced && !controller_)
    throw Error(ErrorKind::InvalidArgument, "controlled modes need a controller");
  if (mode_ == Mode::ClosedLoop && !(alpha_ > 0.0))
    throw Error(ErrorKind::InvalidArgument, "observer gain alpha must be positive");
  if (mode_ == Mode::PlantOnly) alpha_ = 0.0;
}

namespace {

// Plant-only runs integrate [z, v] alone.
Eigen::Index field_count(Mode mode) { return mode == Mode::PlantOnly ? 2 : 4; }

}  // namespace

BoundarySignals ClosedLoopSystem::boundary(const Eigen::Ref<const VectorXd>& y) const {
  const Eigen::Index m = grid_.interior();
  const double h = grid_.h();
  const auto z = y.segment(0, m);
  const auto v = y.segment(m, m);

  BoundarySignals s{};
  s.y = output_y(v);

  switch (mode_) {
    case Mode::ClosedLoop: {
      const auto zhat = y.segment(2 * m, m);
      const auto vhat = y.segment(3 * m, m);
      s.h_hat_control = hamiltonian(zhat, vhat, zhat(m - 1), params_, grid_);
      s.u = -controller_->gamma * controller_->psi(s.h_hat_control - controller_->h_star) * s.y;
      s.ghost = plant_ghost(z(m - 1), s.u, h);
      s.ghost_hat = observer_ghost(zhat(m - 1), s.u, alpha_, s.y, vhat(m - 1), h);
      break;
    }
    case Mode::Unforced: {
      const auto zhat = y.segment(2 * m, m);
      const auto vhat = y.segment(3 * m, m);
      s.h_hat_control = hamiltonian(zhat, vhat, zhat(m - 1), params_, grid_);
      s.u = 0.0;
      s.ghost = plant_ghost(z(m - 1), 0.0, h);
      s.ghost_hat = zhat(m - 1);
      break;
    }
    case Mode::PlantOnly: {
      // Full-information law: the controller sees the true plant energy.
      s.h_hat_control = hamiltonian(z, v, z(m - 1), params_, grid_);
      s.u = -controller_->gamma * controller_->psi(s.h_hat_control - controller_->h_star) * s.y;
      s.ghost = plant_ghost(z(m - 1), s.u, h);
      s.ghost_hat = s.ghost;
      break;
    }
  }
  return s;
}

void ClosedLoopSystem::operator()(double /*t*/, const Eigen::Ref<const VectorXd>& y,
                                  Eigen::Ref<VectorXd> dydt) const {
  const Eigen::Index m = grid_.interior();
  const Eigen::Index fields = field_count(mode_);
  if (y.size() != fields * m || dydt.size() != y.size())
    throw Error(ErrorKind::Numeric, "state vector has the wrong dimension");
  if (!y.allFinite()) throw Error(ErrorKind::Numeric, "state contains non-finite values");

  const BoundarySignals s = boundary(y);
  if (!std::isfinite(s.u) || !std::isfinite(s.ghost) || !std::isfinite(s.ghost_hat))
    throw Error(ErrorKind::Numeric, "boundary values are not finite");

  dydt.segment(0, m) = y.segment(m, m);
  field_acceleration(y.segment(0, m), s.ghost, params_, grid_, dydt.segment(m, m));
  if (fields == 4) {
    dydt.segment(2 * m, m) = y.segment(3 * m, m);
    field_acceleration(y.segment(2 * m, m), s.ghost_hat, params_, grid_,
                       dydt.segment(3 * m, m));
  }
}

ClosedLoopSystem::Diagnostics ClosedLoopSystem::diagnostics(
    const Eigen::Ref<const VectorXd>& y) const {
  const Eigen::Index m = grid_.interior();
  const BoundarySignals s = boundary(y);
  const auto z = y.segment(0, m);
  const auto v = y.segment(m, m);
  Diagnostics d{};
  d.u = s.u;
  d.y = s.y;
  d.H = hamiltonian(z, v, s.ghost, params_, grid_);
  if (mode_ == Mode::PlantOnly) {
    d.H_hat = d.H;
    d.E = 0.0;
  } else {
    const auto zhat = y.segment(2 * m, m);
    const auto vhat = y.segment(3 * m, m);
    d.H_hat = hamiltonian(zhat, vhat, s.ghost_hat, params_, grid_);
    d.E = weighted_error(z, v, zhat, vhat, s.ghost, s.ghost_hat, params_, grid_);
  }
  return d;
}

ClosedLoopState rhs_closed_loop(const ClosedLoopState& state, const PhysicalParams& params,
                                const ControllerConfig& ctrl, const ObserverConfig& obs,
                                const Grid& grid) {
  validate(state.plant, grid);
  validate(state.observer, grid);
  const ClosedLoopSystem system(params, grid, ctrl, obs.alpha, Mode::ClosedLoop);
  const VectorXd y = pack(state);
  VectorXd dydt(y.size());
  system(state.t, y, dydt);
  return unpack(dydt, state.t);
}

}  // namespace sgobs
