#ifndef SGOBS_FUNCTIONALS_HPP
#define SGOBS_FUNCTIONALS_HPP

// Discrete energy functionals on the interior grid.
//
// The gradient energy is the staggered sum over all n intervals (the last one
// reaching the ghost node); kinetic and potential densities are summed with
// weight h over the interior nodes. With these weights the gradient of the
// discrete energy is exactly the three-point stencil used by the dynamics, so
// the unforced semi-discrete system conserves it.

#include <cmath>

#include "sgobs/core.hpp"
#include "sgobs/record.hpp"

namespace sgobs {

namespace detail {

// 1 - cos z without cancellation for small z.
template <typename Scalar>
Scalar one_minus_cos(Scalar z) {
  using std::sin;
  const Scalar s = sin(z / Scalar(2));
  return Scalar(2) * s * s;
}

// sum over intervals i = 0..n-1 of (w_{i+1} - w_i)^2 with w_0 = 0, w_n = ghost.
template <typename Derived>
typename Derived::Scalar squared_jumps(const Eigen::MatrixBase<Derived>& w,
                                       typename Derived::Scalar ghost) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = w.size();
  Scalar total = w(0) * w(0);
  if (m > 1) total += (w.tail(m - 1) - w.head(m - 1)).squaredNorm();
  const Scalar last = ghost - w(m - 1);
  return total + last * last;
}

}  // namespace detail

template <typename DerivedZ, typename DerivedV>
typename DerivedZ::Scalar hamiltonian(const Eigen::MatrixBase<DerivedZ>& z,
                                      const Eigen::MatrixBase<DerivedV>& v,
                                      typename DerivedZ::Scalar ghost_right,
                                      const PhysicalParams& params,
                                      const Grid& grid) {
  using Scalar = typename DerivedZ::Scalar;
  const Scalar h = grid.h();
  const Scalar k = params.k();
  const Scalar beta = params.beta();
  const Scalar gradient = k / (Scalar(2) * h) * detail::squared_jumps(z, ghost_right);
  const Scalar potential =
      z.derived().unaryExpr([](Scalar s) { return detail::one_minus_cos(s); }).sum();
  return gradient + h * (v.squaredNorm() / Scalar(2) + beta * potential);
}

double hamiltonian(const FieldState& state, const PhysicalParams& params,
                   const Grid& grid, double ghost_right);

/// E = 1/2 [sum h (v - vhat)^2 + k sum (de / h)^2 h], e = z - zhat including the
/// ghost difference at x_n.
template <typename D1, typename D2, typename D3, typename D4>
typename D1::Scalar weighted_error(const Eigen::MatrixBase<D1>& z,
                                   const Eigen::MatrixBase<D2>& v,
                                   const Eigen::MatrixBase<D3>& zhat,
                                   const Eigen::MatrixBase<D4>& vhat,
                                   typename D1::Scalar ghost,
                                   typename D1::Scalar ghost_hat,
                                   const PhysicalParams& params, const Grid& grid) {
  using Scalar = typename D1::Scalar;
  const Scalar h = grid.h();
  const Scalar k = params.k();
  const Scalar kinetic = h * (v - vhat).squaredNorm();
  const Scalar gradient = k / h * detail::squared_jumps(z - zhat, ghost - ghost_hat);
  return (kinetic + gradient) / Scalar(2);
}

double weighted_error(const FieldState& plant, const FieldState& observer,
                      const PhysicalParams& params, const Grid& grid, double ghost,
                      double ghost_hat);

/// 1/2 (H - H*)^2.
double goal_q(double h_val, double h_star);

/// Largest |dH/dt - k u y| over interior samples (central differences),
/// normalised by max(1, max |k u y|). Needs at least 3 uniformly spaced samples.
double power_identity_residual(const TimeSeriesRecord& record,
                               const PhysicalParams& params);

/// Central-difference dH/dt at every sample (one-sided at the ends).
VectorXd energy_rate(const TimeSeriesRecord& record);

}  // namespace sgobs

#endif  // SGOBS_FUNCTIONALS_HPP
