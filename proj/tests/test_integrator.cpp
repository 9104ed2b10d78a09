#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sgobs/integrator.hpp"

using namespace sgobs;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

void decay(double, const VectorXd& y, VectorXd& dydt) { dydt = -y; }

void oscillator(double, const VectorXd& y, VectorXd& dydt) {
  dydt.resize(2);
  dydt << y(1), -y(0);
}

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// Global error at t = 2 pi of the oscillator with `steps` fixed steps,
// propagating either the 5th-order or the embedded 4th-order solution.
double oscillator_error(int steps, bool embedded) {
  const double dt = two_pi / steps;
  VectorXd y = vec({1.0, 0.0});
  for (int i = 0; i < steps; ++i) {
    const Dp45Step s = step_dp45(oscillator, i * dt, y, dt);
    y = embedded ? VectorXd(s.y5 - s.error) : s.y5;
  }
  return (y - vec({1.0, 0.0})).norm();
}

double slope(const std::vector<double>& dts, const std::vector<double>& errs) {
  const double n = static_cast<double>(dts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("tableau consistency") {
  using namespace dopri5;
  CHECK(b1 + b3 + b4 + b5 + b6 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e1 + e3 + e4 + e5 + e6 + e7 == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(a21 == doctest::Approx(c2));
  CHECK(a31 + a32 == doctest::Approx(c3));
  CHECK(a41 + a42 + a43 == doctest::Approx(c4));
  CHECK(a51 + a52 + a53 + a54 == doctest::Approx(c5));
  CHECK(a61 + a62 + a63 + a64 + a65 == doctest::Approx(1.0));
}

TEST_CASE("single step") {
  auto zero = [](double, const VectorXd&, VectorXd& d) { d.setZero(); };
  const VectorXd y0 = vec({1.0, -2.0, 3.0});
  const Dp45Step s0 = step_dp45(zero, 0.0, y0, 0.5);
  CHECK(s0.y5 == y0);
  CHECK(s0.err_est == 0.0);
  CHECK(s0.finite);

  const Dp45Step s = step_dp45(decay, 0.0, vec({1.0}), 0.1);
  CHECK(std::abs(s.y5(0) - std::exp(-0.1)) <= 1e-8);
  CHECK(s.err_est > 0.0);
  CHECK(s.stages[0](0) == -1.0);

  CHECK_THROWS_AS(step_dp45(decay, 0.0, vec({1.0}), 0.0), Error);

  auto blowup = [](double, const VectorXd& y, VectorXd& d) {
    d = y.array() * std::numeric_limits<double>::infinity();
  };
  const Dp45Step bad = step_dp45(blowup, 0.0, vec({1.0}), 0.1);
  CHECK_FALSE(bad.finite);
  CHECK(std::isinf(bad.err_est));
}

TEST_CASE("fixed-step oscillator: embedded solution is fourth order") {
  std::vector<double> dts, e4, e5;
  for (double target : {0.2, 0.1, 0.05, 0.025}) {
    const int steps = static_cast<int>(std::lround(two_pi / target));
    dts.push_back(two_pi / steps);
    e4.push_back(oscillator_error(steps, true));
    e5.push_back(oscillator_error(steps, false));
  }
  CHECK(slope(dts, e4) == doctest::Approx(4.0).epsilon(0.3 / 4.0));
  CHECK(slope(dts, e5) >= 4.5);
}

TEST_CASE("fixed-step order on y' = -y") {
  const double exact = std::exp(-1.0);
  for (auto [method, expected] : {std::pair{FixedMethod::Rk4, 4.0}, std::pair{FixedMethod::Dp5, 5.0}}) {
    std::vector<double> dts, errs;
    for (int steps : {5, 10, 20, 40}) {
      const VectorXd y = integrate_fixed(decay, vec({1.0}), {0.0, 1.0}, steps, method);
      dts.push_back(1.0 / steps);
      errs.push_back(std::abs(y(0) - exact));
    }
    const double order = slope(dts, errs);
    CHECK(order == doctest::Approx(expected).epsilon(0.1));
    if (method == FixedMethod::Dp5) CHECK(order >= 4.5);
  }
  CHECK_THROWS_AS(integrate_fixed(decay, vec({1.0}), {0.0, 1.0}, 0, FixedMethod::Rk4), Error);
}

TEST_CASE("adaptive integration of y' = -y") {
  VectorXd y = vec({1.0});
  IntegratorConfig cfg;
  cfg.rtol = 1e-8;
  std::vector<double> ts, ys;
  const IntegrationStats stats = integrate(decay, y, {0.0, 1.0}, cfg, 0.1, [&](double t, const VectorXd& s) {
    ts.push_back(t);
    ys.push_back(s(0));
  });
  CHECK(std::abs(y(0) - 0.3678794) <= 1e-7);
  REQUIRE(ts.size() == 11);
  CHECK(stats.samples == 11);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    CHECK(ts[j] == doctest::Approx(0.1 * static_cast<double>(j)).epsilon(1e-15));
    CHECK(std::abs(ys[j] - std::exp(-ts[j])) < 1e-5);
  }
  CHECK(ts.back() == 1.0);
  CHECK(stats.accepted > 0);
}

TEST_CASE("adaptive oscillator returns to its start after one period") {
  VectorXd y = vec({1.0, 0.0});
  IntegratorConfig cfg;
  cfg.rtol = 1e-8;
  integrate(oscillator, y, {0.0, two_pi}, cfg, 0.5, [](double, const VectorXd&) {});
  CHECK((y - vec({1.0, 0.0})).norm() <= 1e-6);
}

TEST_CASE("integration is deterministic") {
  auto once = [] {
    VectorXd y = vec({1.0, 0.0});
    std::vector<double> out;
    integrate(oscillator, y, {0.0, 10.0}, IntegratorConfig{}, 0.01,
              [&](double t, const VectorXd& s) {
                out.push_back(t);
                out.push_back(s(0));
                out.push_back(s(1));
              });
    return out;
  };
  const auto a = once(), b = once();
  CHECK(a == b);
}

TEST_CASE("tighter tolerance never increases the final error") {
  // Over [0, 5] the step size is governed by the tolerance rather than by the
  // ramp-up from dt_init.
  double prev = std::numeric_limits<double>::infinity();
  for (double rtol = 1e-3; rtol >= 1e-11; rtol /= 2) {
    VectorXd y = vec({1.0});
    IntegratorConfig cfg;
    cfg.rtol = rtol;
    cfg.atol = 1e-14;
    integrate(decay, y, {0.0, 5.0}, cfg, 5.0, [](double, const VectorXd&) {});
    const double err = std::abs(y(0) - std::exp(-5.0));
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("driver failure modes") {
  VectorXd y = vec({1.0});
  IntegratorConfig cfg;
  cfg.max_steps = 5;
  try {
    integrate(decay, y, {0.0, 100.0}, cfg, 1.0, [](double, const VectorXd&) {});
    FAIL("expected divergence");
  } catch (const IntegrationError& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
    CHECK(e.time() > 0.0);
  }

  auto poison = [](double t, const VectorXd& yy, VectorXd& d) {
    d = -yy;
    if (t > 0.5) d.setConstant(std::nan(""));
  };
  VectorXd z = vec({1.0});
  try {
    integrate(poison, z, {0.0, 1.0}, IntegratorConfig{}, 0.1, [](double, const VectorXd&) {});
    FAIL("expected stiffness");
  } catch (const IntegrationError& e) {
    CHECK(e.kind() == ErrorKind::Stiffness);
    CHECK(e.time() == doctest::Approx(0.5).epsilon(1e-6));
  }

  auto throwing = [](double t, const VectorXd& yy, VectorXd& d) {
    if (t > 0.25) throw Error(ErrorKind::Numeric, "bad state");
    d = -yy;
  };
  VectorXd w = vec({1.0});
  CHECK_THROWS_AS(integrate(throwing, w, {0.0, 1.0}, IntegratorConfig{}, 0.1,
                            [](double, const VectorXd&) {}),
                  IntegrationError);

  VectorXd v = vec({1.0});
  IntegratorConfig bad;
  bad.rtol = -1.0;
  CHECK_THROWS_AS(integrate(decay, v, {0.0, 1.0}, bad, 0.1, [](double, const VectorXd&) {}),
                  Error);
  CHECK_THROWS_AS(integrate(decay, v, {1.0, 1.0}, IntegratorConfig{}, 0.1,
                            [](double, const VectorXd&) {}),
                  Error);
  CHECK_THROWS_AS(integrate(decay, v, {0.0, 1.0}, IntegratorConfig{}, 0.0,
                            [](double, const VectorXd&) {}),
                  Error);
}

TEST_CASE("sample counts") {
  CHECK(sample_count(0.0, 50.0, 0.01) == 5001);
  CHECK(sample_count(0.0, 1.0, 0.3) == 4);
  CHECK(sample_count(0.0, 1.0, 1.0) == 2);
}
