#include "sgobs/core.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sgobs/expression.hpp"

namespace sgobs {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateGrid: return "degenerate-grid";
    case ErrorKind::Profile: return "profile";
    case ErrorKind::InadmissibleParameters: return "inadmissible-parameters";
    case ErrorKind::EpsilonRange: return "epsilon-range";
    case ErrorKind::Certificate: return "certificate";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Refusal: return "refusal";
    case ErrorKind::Io: return "io";
    case ErrorKind::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

PhysicalParams::PhysicalParams(double k, double beta) : k_(k), beta_(beta) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw Error(ErrorKind::InvalidArgument, "k must be a finite positive number");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error(ErrorKind::InvalidArgument, "beta must be a finite positive number");
}

Grid::Grid(int n) : n_(n), h_(0.0) {
  if (n < 3)
    throw Error(ErrorKind::DegenerateGrid,
                "grid needs at least 3 intervals, got " + std::to_string(n));
  h_ = 1.0 / static_cast<double>(n);
}

VectorXd Grid::interior_nodes() const {
  VectorXd nodes(interior());
  for (int i = 0; i < interior(); ++i) nodes(i) = x(i + 1);
  return nodes;
}

Grid build_grid(int n) { return Grid(n); }

void validate(const FieldState& state, const Grid& grid) {
  if (state.z.size() != grid.interior() || state.v.size() != grid.interior())
    throw Error(ErrorKind::Numeric, "field state does not match the grid");
  if (!state.z.allFinite() || !state.v.allFinite())
    throw Error(ErrorKind::Numeric, "field state contains non-finite values");
}

VectorXd pack(const ClosedLoopState& state) {
  const Eigen::Index m = state.plant.size();
  VectorXd y(4 * m);
  y << state.plant.z, state.plant.v, state.observer.z, state.observer.v;
  return y;
}

ClosedLoopState unpack(const Eigen::Ref<const VectorXd>& y, double t) {
  const Eigen::Index m = y.size() / 4;
  ClosedLoopState state;
  state.plant.z = y.segment(0, m);
  state.plant.v = y.segment(m, m);
  state.observer.z = y.segment(2 * m, m);
  state.observer.v = y.segment(3 * m, m);
  state.t = t;
  return state;
}

GainFunction GainFunction::linear(double slope) {
  if (!(slope > 0.0) || !std::isfinite(slope))
    throw Error(ErrorKind::InvalidArgument, "psi slope must be positive");
  return {Kind::Linear, slope};
}

GainFunction GainFunction::scaled_tanh(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::InvalidArgument, "psi scale must be positive");
  return {Kind::ScaledTanh, scale};
}

double GainFunction::operator()(double s) const noexcept {
  switch (kind_) {
    case Kind::Linear: return parameter_ * s;
    case Kind::ScaledTanh: return parameter_ * std::tanh(s / parameter_);
  }
  return 0.0;
}

std::string GainFunction::describe() const {
  char buf[64];
  if (kind_ == Kind::Linear)
    std::snprintf(buf, sizeof buf, "linear(slope=%.17g)", parameter_);
  else
    std::snprintf(buf, sizeof buf, "tanh(scale=%.17g)", parameter_);
  return buf;
}

ControllerConfig::ControllerConfig(double gamma_, double h_star_, GainFunction psi_)
    : gamma(gamma_), h_star(h_star_), psi(psi_) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  if (!(h_star >= 0.0) || !std::isfinite(h_star))
    throw Error(ErrorKind::InvalidArgument, "h_star must be non-negative");
}

ObserverConfig::ObserverConfig(double alpha_, ProfileDescriptor zhat0_,
                               ProfileDescriptor zhat1_)
    : alpha(alpha_), zhat0(std::move(zhat0_)), zhat1(std::move(zhat1_)) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
}

ProfileDescriptor parse_profile(const std::string& text) {
  if (text == "zero") return profile::Zero{};
  if (text == "paper") return profile::PaperInitial{};
  if (text.starts_with("const:")) {
    const std::string body = text.substr(6);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc() || ptr != body.data() + body.size() || body.empty() ||
        !std::isfinite(value))
      throw Error(ErrorKind::Profile, "malformed constant profile '" + text + "'");
    return profile::Constant{value};
  }
  if (text.starts_with("expr:")) {
    const std::string body = text.substr(5);
    return profile::Custom{body, profile::Expression::compile(body)};
  }
  throw Error(ErrorKind::Profile, "unknown profile '" + text +
                                      "' (expected zero, const:<c>, paper or expr:<...>)");
}

std::string describe(const ProfileDescriptor& descriptor) {
  struct Visitor {
    std::string operator()(const profile::Zero&) const { return "zero"; }
    std::string operator()(const profile::Constant& c) const {
      char buf[48];
      std::snprintf(buf, sizeof buf, "const:%.17g", c.value);
      return buf;
    }
    std::string operator()(const profile::PaperInitial&) const { return "paper"; }
    std::string operator()(const profile::Custom& c) const { return "expr:" + c.source; }
  };
  return std::visit(Visitor{}, descriptor);
}

double evaluate(const ProfileDescriptor& descriptor, double x) {
  struct Visitor {
    double x;
    double operator()(const profile::Zero&) const { return 0.0; }
    double operator()(const profile::Constant& c) const { return c.value; }
    double operator()(const profile::PaperInitial&) const {
      // 1 - cos(2 pi x) = 2 sin^2(pi x), accurate near x = 0
      const double s = std::sin(std::numbers::pi * x);
      return 10.0 * s * s;
    }
    double operator()(const profile::Custom& c) const { return (*c.compiled)(x); }
  };
  return std::visit(Visitor{x}, descriptor);
}

VectorXd sample_profile(const ProfileDescriptor& descriptor, const Grid& grid) {
  VectorXd out(grid.interior());
  for (int i = 0; i < grid.interior(); ++i) {
    const double x = grid.x(i + 1);
    const double value = evaluate(descriptor, x);
    if (!std::isfinite(value)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      throw Error(ErrorKind::Profile,
                  "profile " + describe(descriptor) + " is not finite at x = " + buf);
    }
    out(i) = value;
  }
  return out;
}

}  // namespace sgobs
