#ifndef SGOBS_ADMISSIBILITY_HPP
#define SGOBS_ADMISSIBILITY_HPP

// Closed-form admissibility conditions on (k, beta), the observer-gain
// interval, and the constants of the exponential decay certificate
//
//   E(t) <= M E(0) exp(-delta t)
//
// together with the energy bound H_max and the trajectory constant bounding
// |H(z) - H(zhat)| by c_corr sqrt(E).

#include <optional>
#include <string>
#include <utility>

#include "sgobs/core.hpp"

namespace sgobs {

/// Open (lo, hi) or closed [lo, hi] interval depending on context. Empty when
/// lo >= hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const noexcept { return !(lo < hi); }
  double width() const noexcept { return hi - lo; }
  bool contains_open(double x) const noexcept { return lo < x && x < hi; }
  bool contains_closed(double x) const noexcept { return lo <= x && x <= hi; }
};

enum class AdmissibilityCase { LargeK, MiddleK, SmallK };

const char* to_string(AdmissibilityCase c);

struct AdmissibilityReport {
  /// +inf when (1 + 4/pi^2) beta >= k.
  double eta;
  bool holds;
  AdmissibilityCase case_label;
  /// (eta, min{1, k}) when holds, empty otherwise.
  Interval epsilon_range;
};

/// max{beta, 4 beta / (pi^2 k - (pi^2 + 4) beta)}. Throws
/// InadmissibleParameters when the denominator is not positive.
double eta(const PhysicalParams& params);

/// Boolean route through eta: (1 + 4/pi^2) beta < k and eta < min{1, k}.
AdmissibilityReport check_assumption2(const PhysicalParams& params);

/// Boolean route through the explicit three-case bound on beta.
bool admissible_by_cases(const PhysicalParams& params);
AdmissibilityCase classify(const PhysicalParams& params);
/// Supremum of admissible beta for this k in the three-case form.
double beta_bound(double k);

/// Roots of (eps k / 2) a^2 - k a + eps / 2 = 0. Throws EpsilonRange unless
/// eta < eps < min{1, k}.
Interval alpha_interval(const PhysicalParams& params, double epsilon);

struct Deltas {
  double d1;
  double d2;
  double d3;
};

Deltas deltas(const PhysicalParams& params, double epsilon, double alpha);

/// delta(eps) = min{2|d1| / (1 + k0 eps), 2|d2| / (k (1 + k0 eps))}.
double decay_rate(const PhysicalParams& params, double epsilon);

struct DecayCertificate {
  double k;
  double beta;
  double epsilon;
  double alpha;
  double delta1;
  double delta2;
  double delta3;
  double k0;
  double m_const;
  double delta_rate;
  double e0;
  double h_star;
  double h0;
  double h_max;
  double c1_const;
  double c2_const;
  double c_corr;
};

/// Evaluates every constant for the given (eps, alpha). `e0` is the initial
/// weighted error, `h0` the initial plant energy. Throws Certificate when
/// Assumption-2 fails, eps is outside the range, or alpha is infeasible.
DecayCertificate decay_certificate(const PhysicalParams& params, double epsilon,
                                   double alpha, double e0, double h_star,
                                   double h0);

/// Number of interior grid points used by optimize_epsilon is
/// kEpsilonGridPoints - 1 (spacing = range width / kEpsilonGridPoints).
inline constexpr int kEpsilonGridPoints = 10000;

/// Picks eps on a uniform grid over (eta, min{1, k}) maximising delta(eps).
/// With `alpha` set only eps admitting that alpha are considered; without it
/// the certificate uses alpha = 1 / eps (always feasible).
std::pair<double, DecayCertificate> optimize_epsilon(
    const PhysicalParams& params, std::optional<double> alpha, double e0 = 0.0,
    double h_star = 0.0, double h0 = 0.0);

}  // namespace sgobs

#endif  // SGOBS_ADMISSIBILITY_HPP
