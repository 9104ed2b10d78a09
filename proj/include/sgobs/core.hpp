#ifndef SGOBS_CORE_HPP
#define SGOBS_CORE_HPP

// Domain types shared by every module: PDE coefficients, the uniform grid,
// sampled field states and the controller / observer configuration.

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>

#include "sgobs/error.hpp"

namespace sgobs {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using VectorXd = Vector<double>;

/// Coefficients of z_tt - k z_xx + beta sin z = 0. Both must be positive.
class PhysicalParams {
 public:
  PhysicalParams(double k, double beta);

  double k() const noexcept { return k_; }
  double beta() const noexcept { return beta_; }

 private:
  double k_;
  double beta_;
};

/// Uniform partition of [0, 1] into n intervals. Only the n - 1 interior
/// nodes x_i = i h carry state; x_0 is Dirichlet and x_n is a ghost node.
class Grid {
 public:
  explicit Grid(int n);

  int intervals() const noexcept { return n_; }
  int interior() const noexcept { return n_ - 1; }
  double h() const noexcept { return h_; }
  /// x_i for i in [0, n].
  double x(int i) const noexcept { return static_cast<double>(i) * h_; }

  VectorXd interior_nodes() const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }

 private:
  int n_;
  double h_;
};

Grid build_grid(int n);

/// Displacement and velocity samples on the interior nodes.
template <typename Scalar>
struct BasicFieldState {
  Vector<Scalar> z;
  Vector<Scalar> v;

  static BasicFieldState zeros(const Grid& grid) {
    return {Vector<Scalar>::Zero(grid.interior()),
            Vector<Scalar>::Zero(grid.interior())};
  }

  Eigen::Index size() const { return z.size(); }
};

using FieldState = BasicFieldState<double>;

/// Throws Numeric if the state does not fit the grid or is not finite.
void validate(const FieldState& state, const Grid& grid);

struct ClosedLoopState {
  FieldState plant;
  FieldState observer;
  double t = 0.0;
};

/// Packs the state as [z, v, zhat, vhat], the integrator's vector layout.
VectorXd pack(const ClosedLoopState& state);
ClosedLoopState unpack(const Eigen::Ref<const VectorXd>& y, double t);

/// The gain function psi of the control law. Continuous, psi(0) = 0 and
/// s psi(s) > 0 away from zero.
class GainFunction {
 public:
  enum class Kind { Linear, ScaledTanh };

  /// psi(s) = slope * s
  static GainFunction linear(double slope);
  /// psi(s) = scale * tanh(s / scale)
  static GainFunction scaled_tanh(double scale);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return parameter_; }

  double operator()(double s) const noexcept;

  std::string describe() const;

 private:
  GainFunction(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_;
  double parameter_;
};

struct ControllerConfig {
  double gamma;
  double h_star;
  GainFunction psi;

  ControllerConfig(double gamma, double h_star, GainFunction psi);
};

namespace profile {

struct Zero {};
struct Constant {
  double value;
};
/// 5 (1 - cos 2 pi x)
struct PaperInitial {};

class Expression;

/// A user expression in x, compiled once. Holds a shared immutable tree.
struct Custom {
  std::string source;
  std::shared_ptr<const Expression> compiled;
};

}  // namespace profile

using ProfileDescriptor =
    std::variant<profile::Zero, profile::Constant, profile::PaperInitial,
                 profile::Custom>;

/// Parses `zero`, `const:<c>`, `paper` or `expr:<expression in x>`.
ProfileDescriptor parse_profile(const std::string& text);
std::string describe(const ProfileDescriptor& descriptor);

double evaluate(const ProfileDescriptor& descriptor, double x);

/// Descriptor evaluated at x_1 .. x_{n-1}.
VectorXd sample_profile(const ProfileDescriptor& descriptor, const Grid& grid);

struct ObserverConfig {
  double alpha;
  ProfileDescriptor zhat0 = profile::Zero{};
  ProfileDescriptor zhat1 = profile::Zero{};

  explicit ObserverConfig(double alpha, ProfileDescriptor zhat0 = profile::Zero{},
                          ProfileDescriptor zhat1 = profile::Zero{});
};

}  // namespace sgobs

#endif  // SGOBS_CORE_HPP
