#include "sgobs/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sgobs {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// Lower edge of the epsilon range; +inf when the first inequality fails.
double eta_or_inf(const PhysicalParams& p) {
  const double denom = kPi2 * p.k() - (kPi2 + 4.0) * p.beta();
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(p.beta(), 4.0 * p.beta() / denom);
}

}  // namespace

const char* to_string(AdmissibilityCase c) {
  switch (c) {
    case AdmissibilityCase::LargeK: return "k>(pi^2+8)/pi^2";
    case AdmissibilityCase::MiddleK: return "1<=k<=(pi^2+8)/pi^2";
    case AdmissibilityCase::SmallK: return "k<1";
  }
  return "?";
}

double eta(const PhysicalParams& params) {
  const double value = eta_or_inf(params);
  if (std::isinf(value))
    throw Error(ErrorKind::InadmissibleParameters,
                "eta undefined: requires (1 + 4/pi^2) beta < k");
  return value;
}

AdmissibilityCase classify(const PhysicalParams& params) {
  const double k = params.k();
  if (k > (kPi2 + 8.0) / kPi2) return AdmissibilityCase::LargeK;
  if (k >= 1.0) return AdmissibilityCase::MiddleK;
  return AdmissibilityCase::SmallK;
}

double beta_bound(double k) {
  if (k > (kPi2 + 8.0) / kPi2) return 1.0;
  if (k >= 1.0) return kPi2 * k / (kPi2 + 8.0);
  return kPi2 * k * k / ((kPi2 + 4.0) * k + 4.0);
}

bool admissible_by_cases(const PhysicalParams& params) {
  return params.beta() < beta_bound(params.k());
}

AdmissibilityReport check_assumption2(const PhysicalParams& params) {
  const double k = params.k();
  const double beta = params.beta();
  const double eta_value = eta_or_inf(params);
  const double cap = std::min(1.0, k);
  const bool first = (1.0 + 4.0 / kPi2) * beta < k;
  const bool holds = first && eta_value < cap;

  AdmissibilityReport report{eta_value, holds, classify(params), Interval{}};
  if (holds) report.epsilon_range = Interval{eta_value, cap};
  return report;
}

Interval alpha_interval(const PhysicalParams& params, double epsilon) {
  const double k = params.k();
  const double eta_value = eta_or_inf(params);
  if (!(eta_value < epsilon && epsilon < std::min(1.0, k)))
    throw Error(ErrorKind::EpsilonRange,
                "epsilon must lie in (eta, min{1, k})");
  // The product of the roots is 1/k; take the large root from the formula and
  // the small one from the product to avoid cancellation.
  const double disc = k * k - epsilon * epsilon * k;
  const double hi = (k + std::sqrt(disc)) / (epsilon * k);
  const double lo = 1.0 / (k * hi);
  return {lo, hi};
}

Deltas deltas(const PhysicalParams& params, double epsilon, double alpha) {
  const double k = params.k();
  const double beta = params.beta();
  return {
      -epsilon / 2.0 + beta / 2.0,
      -epsilon * k / 2.0 + 2.0 * beta / kPi2 + epsilon * beta / 2.0 +
          2.0 * epsilon * beta / kPi2,
      -alpha * k + epsilon / 2.0 + epsilon * k / 2.0 * alpha * alpha,
  };
}

double decay_rate(const PhysicalParams& params, double epsilon) {
  const double k = params.k();
  const double k0 = std::max(1.0, 1.0 / k);
  const Deltas d = deltas(params, epsilon, 0.0);
  const double scale = 1.0 + k0 * epsilon;
  return std::min(2.0 * std::abs(d.d1) / scale,
                  2.0 * std::abs(d.d2) / (k * scale));
}

DecayCertificate decay_certificate(const PhysicalParams& params, double epsilon,
                                   double alpha, double e0, double h_star,
                                   double h0) {
  const auto report = check_assumption2(params);
  if (!report.holds)
    throw Error(ErrorKind::Certificate, "parameters violate the admissibility inequalities");
  if (!report.epsilon_range.contains_open(epsilon))
    throw Error(ErrorKind::Certificate, "epsilon outside (eta, min{1, k})");
  const Interval gains = alpha_interval(params, epsilon);
  if (!(alpha > 0.0) || !gains.contains_closed(alpha))
    throw Error(ErrorKind::Certificate, "observer gain alpha outside the admissible interval");
  if (!(e0 >= 0.0) || !(h_star >= 0.0) || !(h0 >= 0.0))
    throw Error(ErrorKind::Certificate, "e0, h_star and h0 must be non-negative");

  const double k = params.k();
  const double beta = params.beta();
  DecayCertificate c{};
  c.k = k;
  c.beta = beta;
  c.epsilon = epsilon;
  c.alpha = alpha;
  const Deltas d = deltas(params, epsilon, alpha);
  c.delta1 = d.d1;
  c.delta2 = d.d2;
  c.delta3 = d.d3;
  c.k0 = std::max(1.0, 1.0 / k);
  c.m_const = (1.0 + c.k0 * epsilon) / (1.0 - c.k0 * epsilon);
  c.delta_rate = decay_rate(params, epsilon);
  c.e0 = e0;
  c.h_star = h_star;
  c.h0 = h0;

  c.c1_const = 2.0 * beta + 4.0 * c.m_const * e0;
  c.c2_const = 4.0;
  const double c1 = c.c1_const;
  const double c2 = c.c2_const;
  c.h_max = std::max({h_star, h0, c1 + c2 * h_star, c1 + c2 * h0,
                      c1 + c1 * c2 + c2 * c2 * h_star});

  // Bound on every L2 norm of z_t, z_x and their estimates, then the
  // Lipschitz chain for the kinetic, gradient and potential terms.
  const double norm_bound = std::sqrt(std::max(2.0, 2.0 / k) * c.h_max);
  c.c_corr = norm_bound * (std::sqrt(2.0) + std::sqrt(2.0 * k)) +
             beta * std::sqrt(2.0 / k);
  return c;
}

std::pair<double, DecayCertificate> optimize_epsilon(const PhysicalParams& params,
                                                     std::optional<double> alpha,
                                                     double e0, double h_star,
                                                     double h0) {
  const auto report = check_assumption2(params);
  if (!report.holds)
    throw Error(ErrorKind::InadmissibleParameters,
                "parameters violate the admissibility inequalities");
  const Interval range = report.epsilon_range;
  const double step = range.width() / kEpsilonGridPoints;

  int best = -1;
  double best_rate = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < kEpsilonGridPoints; ++i) {
    const double eps = range.lo + step * i;
    if (!range.contains_open(eps)) continue;
    if (alpha && !alpha_interval(params, eps).contains_closed(*alpha)) continue;
    const double rate = decay_rate(params, eps);
    if (rate > best_rate) {
      best_rate = rate;
      best = i;
    }
  }
  if (best < 0)
    throw Error(ErrorKind::Infeasible,
                "no epsilon in (eta, min{1, k}) admits the requested alpha");
  const double eps = range.lo + step * best;
  const double gain = alpha ? *alpha : 1.0 / eps;
  return {eps, decay_certificate(params, eps, gain, e0, h_star, h0)};
}

}  // namespace sgobs
