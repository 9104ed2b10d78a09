#ifndef SGOBS_INTEGRATOR_HPP
#define SGOBS_INTEGRATOR_HPP

// Explicit Runge-Kutta time integration for method-of-lines systems.
//
// `System` is any callable f(t, y, dydt) writing the derivative of y into dydt
// (Eigen::Ref<const VectorXd>, Eigen::Ref<VectorXd>). Exceptions of type
// sgobs::Error with kind Numeric thrown from f reject the step instead of
// aborting the run.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "sgobs/core.hpp"

namespace sgobs {

struct IntegratorConfig {
  double rtol = 1e-6;
  double atol = 1e-9;
  double dt_init = 1e-3;
  double dt_max = std::numeric_limits<double>::infinity();
  long max_steps = 5'000'000;

  void validate() const;
};

inline void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0) || !(dt_init > 0.0) || !(dt_max > 0.0))
    throw Error(ErrorKind::InvalidArgument,
                "rtol, atol, dt_init and dt_max must be positive");
  if (max_steps <= 0) throw Error(ErrorKind::InvalidArgument, "max_steps must be positive");
}

/// Dormand-Prince 5(4) tableau.
namespace dopri5 {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
// Fifth-order weights (also row 7 of the tableau, first same as last).
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between fifth- and fourth-order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Fourth-order continuous extension (Hairer, Norsett & Wanner).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dopri5

struct Dp45Step {
  VectorXd y5;
  /// Fifth minus fourth order solution, component-wise.
  VectorXd error;
  /// Weighted RMS error; +inf when a stage was not finite.
  double err_est;
  /// Stage derivatives k1..k7 (k7 = f(t + dt, y5)).
  std::array<VectorXd, 7> stages;
  bool finite;
};

/// Weighted RMS norm of `err` scaled by atol + rtol max(|y|, |y_new|).
inline double weighted_rms(const VectorXd& err, const VectorXd& y, const VectorXd& y_new,
                           double rtol, double atol) {
  if (err.size() == 0) return 0.0;
  const VectorXd scale = (atol + rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
  return std::sqrt((err.array() / scale.array()).square().mean());
}

/// Reusable stage storage for one Dormand-Prince integration.
class Dp45Stepper {
 public:
  explicit Dp45Stepper(Eigen::Index dim) : tmp_(dim), y5_(dim), err_(dim) {
    for (auto& k : k_) k.resize(dim);
  }

  /// Computes the trial step from (t, y) over dt. `k1` must hold f(t, y) on
  /// entry; after an accepted step swap_fsal() moves k7 into k1. Returns the
  /// weighted error, or +inf when a stage is not finite.
  template <typename System>
  double attempt(System& f, double t, const VectorXd& y, double dt, double rtol,
                 double atol) {
    using namespace dopri5;
    auto& [k1, k2, k3, k4, k5, k6, k7] = k_;
    try {
      tmp_ = y + dt * a21 * k1;
      f(t + c2 * dt, tmp_, k2);
      tmp_ = y + dt * (a31 * k1 + a32 * k2);
      f(t + c3 * dt, tmp_, k3);
      tmp_ = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
      f(t + c4 * dt, tmp_, k4);
      tmp_ = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(t + c5 * dt, tmp_, k5);
      tmp_ = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(t + dt, tmp_, k6);
      y5_ = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      f(t + dt, y5_, k7);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numeric) throw;
      return std::numeric_limits<double>::infinity();
    }
    err_ = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    if (!y5_.allFinite() || !err_.allFinite()) return std::numeric_limits<double>::infinity();
    return weighted_rms(err_, y, y5_, rtol, atol);
  }

  /// State at t + theta dt, theta in [0, 1], from the continuous extension of
  /// the last attempted step. Call before swap_fsal().
  void dense(const VectorXd& y, double dt, double theta, VectorXd& out) const {
    using namespace dopri5;
    const auto& [k1, k2, k3, k4, k5, k6, k7] = k_;
    const double s = 1.0 - theta;
    out = y + theta * ((y5_ - y) +
                       s * ((dt * k1 - (y5_ - y)) +
                            theta * (((y5_ - y) - dt * k7 - (dt * k1 - (y5_ - y))) +
                                     s * dt *
                                         (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 +
                                          d7 * k7))));
    (void)k2;
  }

  VectorXd& k1() noexcept { return k_[0]; }
  const VectorXd& y5() const noexcept { return y5_; }
  const VectorXd& error() const noexcept { return err_; }
  const std::array<VectorXd, 7>& stages() const noexcept { return k_; }

  void swap_fsal() { k_[0].swap(k_[6]); }

 private:
  std::array<VectorXd, 7> k_;
  VectorXd tmp_;
  VectorXd y5_;
  VectorXd err_;
};

/// One Dormand-Prince step from (t, y) with step dt.
template <typename System>
Dp45Step step_dp45(System&& f, double t, const VectorXd& y, double dt, double rtol = 1e-6,
                   double atol = 1e-9) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
  Dp45Stepper stepper(y.size());
  Dp45Step out;
  try {
    f(t, y, stepper.k1());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Numeric) throw;
    out.err_est = std::numeric_limits<double>::infinity();
    out.finite = false;
    return out;
  }
  out.err_est = stepper.attempt(f, t, y, dt, rtol, atol);
  out.finite = std::isfinite(out.err_est);
  out.y5 = stepper.y5();
  out.error = stepper.error();
  out.stages = stepper.stages();
  return out;
}

/// PI step-size controller (safety 0.9, growth clamped to [0.2, 5]).
class StepController {
 public:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 5.0;
  static constexpr double kBeta = 0.04;
  static constexpr double kAlpha = 0.2 - 0.75 * kBeta;

  /// New step after an accepted step with weighted error `err` (<= 1).
  double accept(double dt, double err) {
    err = std::max(err, 1e-10);
    double factor = kSafety * std::pow(err, -kAlpha) * std::pow(err_prev_, kBeta);
    factor = std::clamp(factor, kMinFactor, rejected_ ? 1.0 : kMaxFactor);
    err_prev_ = err;
    rejected_ = false;
    return dt * factor;
  }

  /// Retry step after a rejection.
  double reject(double dt, double err) {
    rejected_ = true;
    if (!std::isfinite(err)) return dt * kMinFactor;
    const double factor = std::max(kMinFactor, kSafety * std::pow(err, -kAlpha));
    return dt * std::min(1.0, factor);
  }

 private:
  double err_prev_ = 1e-4;
  bool rejected_ = false;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
  std::size_t samples = 0;
};

/// Smallest step the driver will attempt before declaring stiffness.
inline constexpr double kMinStep = 1e-14;

/// Number of sample times t0 + j dt_s in [t0, t1].
inline std::size_t sample_count(double t0, double t1, double sample_dt) {
  return static_cast<std::size_t>(std::floor((t1 - t0) / sample_dt * (1.0 + 1e-12))) + 1;
}

/// Adaptive Dormand-Prince integration of y from t_span.first to
/// t_span.second. `on_sample(t, y)` fires at every t0 + j sample_dt inside the
/// span, with y from the continuous extension of the accepted step. `y` holds the
/// final state on return.
template <typename System, typename OnSample>
IntegrationStats integrate(System&& f, VectorXd& y, std::pair<double, double> t_span,
                           const IntegratorConfig& cfg, double sample_dt,
                           OnSample&& on_sample) {
  cfg.validate();
  const auto [t0, t1] = t_span;
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "empty time span");
  if (!(sample_dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample_dt must be positive");

  const std::size_t n_samples = sample_count(t0, t1, sample_dt);
  auto sample_time = [&](std::size_t j) {
    return std::min(t0 + static_cast<double>(j) * sample_dt, t1);
  };

  IntegrationStats stats;
  Dp45Stepper stepper(y.size());
  StepController controller;

  f(t0, y, stepper.k1());
  ++stats.rhs_evaluations;

  std::size_t next = 0;
  on_sample(sample_time(next), static_cast<const VectorXd&>(y));
  ++next;

  double t = t0;
  double dt = std::min(cfg.dt_init, cfg.dt_max);
  VectorXd interp(y.size());

  while (t < t1) {
    if (stats.accepted + stats.rejected >= cfg.max_steps)
      throw IntegrationError(ErrorKind::Divergence, t,
                             "maximum number of steps exceeded");
    if (dt < kMinStep)
      throw IntegrationError(ErrorKind::Stiffness, t, "step size underflow");

    const bool last = t + dt >= t1;
    const double step = last ? t1 - t : dt;
    const double err = stepper.attempt(f, t, y, step, cfg.rtol, cfg.atol);
    stats.rhs_evaluations += 6;

    if (!(err <= 1.0)) {
      ++stats.rejected;
      dt = controller.reject(step, err);
      continue;
    }

    ++stats.accepted;
    const double t_new = last ? t1 : t + step;
    while (next < n_samples && sample_time(next) <= t_new) {
      const double ts = sample_time(next);
      const double theta = (ts - t) / (t_new - t);
      if (theta >= 1.0)
        interp = stepper.y5();
      else
        stepper.dense(y, step, theta, interp);
      on_sample(ts, static_cast<const VectorXd&>(interp));
      ++next;
    }
    y = stepper.y5();
    stepper.swap_fsal();
    t = t_new;
    dt = std::min(controller.accept(step, err), cfg.dt_max);
  }
  stats.samples = next;
  return stats;
}

/// Fixed-step methods for convergence studies.
enum class FixedMethod { Rk4, Dp5 };

/// Integrates with `steps` equal steps over t_span; returns the final state.
template <typename System>
VectorXd integrate_fixed(System&& f, VectorXd y, std::pair<double, double> t_span,
                         int steps, FixedMethod method) {
  if (steps <= 0) throw Error(ErrorKind::InvalidArgument, "steps must be positive");
  const double dt = (t_span.second - t_span.first) / steps;
  const Eigen::Index dim = y.size();
  if (method == FixedMethod::Dp5) {
    Dp45Stepper stepper(dim);
    f(t_span.first, y, stepper.k1());
    for (int i = 0; i < steps; ++i) {
      const double t = t_span.first + i * dt;
      stepper.attempt(f, t, y, dt, 1.0, 1.0);
      y = stepper.y5();
      stepper.swap_fsal();
    }
    return y;
  }
  VectorXd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  for (int i = 0; i < steps; ++i) {
    const double t = t_span.first + i * dt;
    f(t, y, k1);
    tmp = y + 0.5 * dt * k1;
    f(t + 0.5 * dt, tmp, k2);
    tmp = y + 0.5 * dt * k2;
    f(t + 0.5 * dt, tmp, k3);
    tmp = y + dt * k3;
    f(t + dt, tmp, k4);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace sgobs

#endif  // SGOBS_INTEGRATOR_HPP
