#include "sgobs/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace sgobs {

double hamiltonian(const FieldState& state, const PhysicalParams& params,
                   const Grid& grid, double ghost_right) {
  return hamiltonian(state.z, state.v, ghost_right, params, grid);
}

double weighted_error(const FieldState& plant, const FieldState& observer,
                      const PhysicalParams& params, const Grid& grid, double ghost,
                      double ghost_hat) {
  return weighted_error(plant.z, plant.v, observer.z, observer.v, ghost, ghost_hat,
                        params, grid);
}

double goal_q(double h_val, double h_star) {
  const double d = h_val - h_star;
  return 0.5 * d * d;
}

VectorXd energy_rate(const TimeSeriesRecord& record) {
  const std::size_t count = record.size();
  if (count < 3)
    throw Error(ErrorKind::InvalidArgument, "energy rate needs at least 3 samples");
  const auto& t = record.t;
  const auto& H = record.H;
  const double dt = (t.back() - t.front()) / static_cast<double>(count - 1);
  for (std::size_t i = 1; i < count; ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
      throw Error(ErrorKind::InvalidArgument, "energy rate needs uniform sampling");
  }
  VectorXd rate(static_cast<Eigen::Index>(count));
  rate(0) = (H[1] - H[0]) / (t[1] - t[0]);
  for (std::size_t i = 1; i + 1 < count; ++i)
    rate(static_cast<Eigen::Index>(i)) = (H[i + 1] - H[i - 1]) / (t[i + 1] - t[i - 1]);
  rate(static_cast<Eigen::Index>(count - 1)) =
      (H[count - 1] - H[count - 2]) / (t[count - 1] - t[count - 2]);
  return rate;
}

double power_identity_residual(const TimeSeriesRecord& record,
                               const PhysicalParams& params) {
  const VectorXd rate = energy_rate(record);
  const std::size_t count = record.size();
  double power_scale = 1.0;
  for (std::size_t i = 0; i < count; ++i)
    power_scale = std::max(power_scale, std::abs(params.k() * record.u[i] * record.y[i]));
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double power = params.k() * record.u[i] * record.y[i];
    worst = std::max(worst, std::abs(rate(static_cast<Eigen::Index>(i)) - power));
  }
  return worst / power_scale;
}

}  // namespace sgobs
