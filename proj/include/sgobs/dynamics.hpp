#ifndef SGOBS_DYNAMICS_HPP
#define SGOBS_DYNAMICS_HPP

// Method-of-lines right-hand side for the plant, the boundary observer and the
// coupled closed loop. The state vector is [z, v, zhat, vhat] on the interior
// nodes; z_0 = 0 and the ghost value z_n is rebuilt from the boundary law on
// every evaluation (one-sided, first order).

#include <cmath>
#include <optional>

#include "sgobs/core.hpp"
#include "sgobs/functionals.hpp"
#include "sgobs/record.hpp"

namespace sgobs {

/// z_n = z_{n-1} + h u.
inline double plant_ghost(double z_last, double u, double h) { return z_last + h * u; }

/// zhat_n = zhat_{n-1} + h (u + alpha (y - vhat_{n-1})).
inline double observer_ghost(double zhat_last, double u, double alpha, double y,
                             double vhat_last, double h) {
  return zhat_last + h * (u + alpha * (y - vhat_last));
}

/// Measured output: the velocity at the last interior node.
template <typename Derived>
typename Derived::Scalar output_y(const Eigen::MatrixBase<Derived>& v) {
  return v(v.size() - 1);
}

inline double output_y(const FieldState& plant) { return output_y(plant.v); }

/// a_i = k (z_{i+1} - 2 z_i + z_{i-1}) / h^2 - beta sin z_i, with z_0 = 0 and
/// z_n = ghost_right. Writes into `accel` (same length as z).
template <typename DerivedZ, typename DerivedA>
void field_acceleration(const Eigen::MatrixBase<DerivedZ>& z,
                        typename DerivedZ::Scalar ghost_right,
                        const PhysicalParams& params, const Grid& grid,
                        const Eigen::MatrixBase<DerivedA>& accel_out) {
  using Scalar = typename DerivedZ::Scalar;
  auto& accel = const_cast<Eigen::MatrixBase<DerivedA>&>(accel_out);
  const Eigen::Index m = z.size();
  const Scalar h = grid.h();
  const Scalar c = Scalar(params.k()) / (h * h);
  const Scalar beta = params.beta();

  if (m == 1) {
    accel(0) = c * (ghost_right - Scalar(2) * z(0)) - beta * std::sin(z(0));
    return;
  }
  accel(0) = c * (z(1) - Scalar(2) * z(0));
  if (m > 2)
    accel.segment(1, m - 2) =
        c * (z.tail(m - 2) - Scalar(2) * z.segment(1, m - 2) + z.head(m - 2));
  accel(m - 1) = c * (ghost_right - Scalar(2) * z(m - 1) + z(m - 2));
  accel -= beta * z.derived().unaryExpr([](Scalar s) { return std::sin(s); });
}

/// Acceleration of a single field; throws Numeric on non-finite input.
VectorXd rhs_field(const FieldState& state, const PhysicalParams& params,
                   double ghost_right, const Grid& grid);

/// Boundary quantities derived from a closed-loop state, in evaluation order.
struct BoundarySignals {
  double y;
  /// Observer energy as seen by the controller.
  double h_hat_control;
  double u;
  double ghost;
  double ghost_hat;
};

/// The coupled plant / observer / controller system on packed state vectors.
///
/// Evaluation order inside each call: y, H(zhat), u, ghosts, stencils. The
/// controller's H(zhat) uses the observer's zero-flux ghost (zhat_n =
/// zhat_{n-1}) because the full ghost depends on u itself.
class ClosedLoopSystem {
 public:
  /// `controller` may be absent only in Unforced mode.
  ClosedLoopSystem(PhysicalParams params, Grid grid, std::optional<ControllerConfig> controller,
                   double alpha, Mode mode);

  const PhysicalParams& params() const noexcept { return params_; }
  const Grid& grid() const noexcept { return grid_; }
  Mode mode() const noexcept { return mode_; }
  double alpha() const noexcept { return alpha_; }

  /// Length of the packed state vector ([z, v] only in plant-only mode).
  Eigen::Index dimension() const noexcept {
    return (mode_ == Mode::PlantOnly ? 2 : 4) * grid_.interior();
  }

  BoundarySignals boundary(const Eigen::Ref<const VectorXd>& y) const;

  /// dy/dt into `dydt`. Throws Numeric on non-finite state.
  void operator()(double t, const Eigen::Ref<const VectorXd>& y,
                  Eigen::Ref<VectorXd> dydt) const;

  struct Diagnostics {
    double H;
    double H_hat;
    double E;
    double u;
    double y;
  };

  Diagnostics diagnostics(const Eigen::Ref<const VectorXd>& y) const;

 private:
  PhysicalParams params_;
  Grid grid_;
  std::optional<ControllerConfig> controller_;
  double alpha_;
  Mode mode_;
};

/// Time derivative of a closed-loop state as a state of the same shape
/// (z' = v, v' = acceleration for both fields; t carries over).
ClosedLoopState rhs_closed_loop(const ClosedLoopState& state, const PhysicalParams& params,
                                const ControllerConfig& ctrl, const ObserverConfig& obs,
                                const Grid& grid);

}  // namespace sgobs

#endif  // SGOBS_DYNAMICS_HPP
