#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sgobs/core.hpp"
#include "sgobs/expression.hpp"

using namespace sgobs;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an sgobs::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("physical parameters reject non-positive values") {
  CHECK_NOTHROW(PhysicalParams(0.12, 0.02));
  CHECK(kind_of([] { PhysicalParams(0.0, 0.02); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { PhysicalParams(0.12, -1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { PhysicalParams(std::nan(""), 0.1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("grid construction") {
  const Grid g4 = build_grid(4);
  CHECK(g4.h() == 0.25);
  CHECK(g4.interior() == 3);

  const Grid g1000 = build_grid(1000);
  CHECK(g1000.h() == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(g1000.interior() == 999);
  CHECK(std::abs(g1000.h() * 1000 - 1.0) <= std::numeric_limits<double>::epsilon());

  const VectorXd x = g1000.interior_nodes();
  REQUIRE(x.size() == 999);
  CHECK(x(0) == doctest::Approx(0.001));
  CHECK(x(998) == doctest::Approx(0.999));

  CHECK(kind_of([] { build_grid(2); }) == ErrorKind::DegenerateGrid);
  CHECK(kind_of([] { build_grid(-5); }) == ErrorKind::DegenerateGrid);
  CHECK_NOTHROW(build_grid(3));
}

TEST_CASE("sample_profile") {
  const Grid g(4);
  CHECK(sample_profile(profile::Zero{}, g) == VectorXd::Zero(3));
  CHECK(sample_profile(profile::Constant{2.0}, g) == VectorXd::Constant(3, 2.0));
}

TEST_CASE("paper profile values") {
  CHECK(evaluate(profile::PaperInitial{}, 0.5) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(evaluate(profile::PaperInitial{}, 0.0) == 0.0);
  const Grid g(4);
  const VectorXd z = sample_profile(profile::PaperInitial{}, g);
  CHECK(z(1) == doctest::Approx(10.0));
  CHECK(z(0) == doctest::Approx(5.0));
  CHECK(z(2) == doctest::Approx(5.0));
}

TEST_CASE("paper profile vanishes at the Dirichlet end at rate h^2") {
  double prev = 0.0;
  for (int n : {100, 200, 400, 800}) {
    const Grid g(n);
    const double first = sample_profile(profile::PaperInitial{}, g)(0);
    if (prev > 0.0) CHECK(std::log2(prev / first) == doctest::Approx(2.0).epsilon(0.01));
    prev = first;
  }
}

TEST_CASE("profile descriptors parse and describe") {
  CHECK(std::holds_alternative<profile::Zero>(parse_profile("zero")));
  CHECK(std::holds_alternative<profile::PaperInitial>(parse_profile("paper")));
  const auto c = parse_profile("const:2.5");
  REQUIRE(std::holds_alternative<profile::Constant>(c));
  CHECK(std::get<profile::Constant>(c).value == 2.5);
  CHECK(describe(c) == "const:2.5");

  const auto e = parse_profile("expr:sin(pi*x)^2 + 2*x");
  REQUIRE(std::holds_alternative<profile::Custom>(e));
  CHECK(evaluate(e, 0.25) == doctest::Approx(0.5 + 0.5));
  CHECK(describe(e) == "expr:sin(pi*x)^2 + 2*x");

  CHECK(kind_of([] { parse_profile("bogus"); }) == ErrorKind::Profile);
  CHECK(kind_of([] { parse_profile("const:abc"); }) == ErrorKind::Profile);
  CHECK(kind_of([] { parse_profile("expr:sin(x"); }) == ErrorKind::Profile);
}

TEST_CASE("non-finite profile evaluation is a profile error") {
  const auto e = parse_profile("expr:log(x - 0.5)");
  CHECK(kind_of([&] { sample_profile(e, Grid(4)); }) == ErrorKind::Profile);
  const auto d = parse_profile("expr:1/(x-0.5)");
  CHECK(kind_of([&] { sample_profile(d, Grid(4)); }) == ErrorKind::Profile);
}

TEST_CASE("expression grammar") {
  auto eval = [](const std::string& src, double x) {
    return (*profile::Expression::compile(src))(x);
  };
  CHECK(eval("1 + 2 * 3", 0) == 7.0);
  CHECK(eval("(1 + 2) * 3", 0) == 9.0);
  CHECK(eval("2 ^ 3 ^ 2", 0) == 512.0);
  CHECK(eval("-x^2", 3.0) == -9.0);
  CHECK(eval("exp(0) + cos(0) + sqrt(16)", 0) == 6.0);
  CHECK(eval("5*(1 - cos(2*pi*x))", 0.5) == doctest::Approx(10.0));
  CHECK(eval("abs(-e)", 0) == doctest::Approx(std::numbers::e));
  CHECK(eval("1e-3 * x", 2.0) == doctest::Approx(2e-3));
  CHECK_THROWS_AS(profile::Expression::compile(""), Error);
  CHECK_THROWS_AS(profile::Expression::compile("1 +"), Error);
  CHECK_THROWS_AS(profile::Expression::compile("foo(x)"), Error);
  CHECK_THROWS_AS(profile::Expression::compile("x y"), Error);
}

TEST_CASE("gain functions vanish at zero and have the sign of their argument") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (const GainFunction& psi :
       {GainFunction::linear(0.12), GainFunction::linear(3.0), GainFunction::scaled_tanh(1.0),
        GainFunction::scaled_tanh(0.05)}) {
    CHECK(psi(0.0) == 0.0);
    for (int i = 0; i < 100; ++i) {
      double s = dist(rng);
      if (s == 0.0) s = 1e-3;
      CHECK(s * psi(s) > 0.0);
    }
  }
  CHECK(GainFunction::scaled_tanh(2.0)(1e6) == doctest::Approx(2.0));
  CHECK_THROWS_AS(GainFunction::linear(0.0), Error);
  CHECK_THROWS_AS(GainFunction::scaled_tanh(-1.0), Error);
}

TEST_CASE("controller and observer configs validate") {
  CHECK_NOTHROW(ControllerConfig(1.0, 10.0, GainFunction::linear(0.12)));
  CHECK_NOTHROW(ControllerConfig(1.0, 0.0, GainFunction::linear(0.12)));
  CHECK_THROWS_AS(ControllerConfig(0.0, 10.0, GainFunction::linear(0.12)), Error);
  CHECK_THROWS_AS(ControllerConfig(1.0, -1.0, GainFunction::linear(0.12)), Error);
  CHECK_NOTHROW(ObserverConfig(20.0));
  CHECK_THROWS_AS(ObserverConfig(0.0), Error);
  CHECK_THROWS_AS(ObserverConfig(-1.0), Error);
}

TEST_CASE("state validation and packing") {
  const Grid g(5);
  FieldState s = FieldState::zeros(g);
  CHECK_NOTHROW(validate(s, g));
  s.v(2) = std::numeric_limits<double>::infinity();
  CHECK(kind_of([&] { validate(s, g); }) == ErrorKind::Numeric);
  CHECK(kind_of([&] { validate(FieldState::zeros(Grid(6)), g); }) == ErrorKind::Numeric);

  ClosedLoopState cl{FieldState::zeros(g), FieldState::zeros(g), 1.5};
  cl.plant.z << 1, 2, 3, 4;
  cl.plant.v << 5, 6, 7, 8;
  cl.observer.z << 9, 10, 11, 12;
  cl.observer.v << 13, 14, 15, 16;
  const VectorXd y = pack(cl);
  REQUIRE(y.size() == 16);
  for (int i = 0; i < 16; ++i) CHECK(y(i) == i + 1);
  const ClosedLoopState back = unpack(y, 1.5);
  CHECK(back.t == 1.5);
  CHECK(back.plant.z == cl.plant.z);
  CHECK(back.observer.v == cl.observer.v);
}
