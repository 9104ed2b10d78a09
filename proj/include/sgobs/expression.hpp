#ifndef SGOBS_EXPRESSION_HPP
#define SGOBS_EXPRESSION_HPP

#include <memory>
#include <string>
#include <vector>

#include "sgobs/core.hpp"

namespace sgobs::profile {

/// Arithmetic expression in one variable `x`.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses, numeric
/// literals, the constants `pi` and `e`, and the functions sin, cos, tan,
/// exp, log, sqrt, abs, tanh, sinh, cosh. Compiled to a postfix program.
class Expression {
 public:
  /// Throws ErrorKind::Profile on a syntax error.
  static std::shared_ptr<const Expression> compile(const std::string& source);

  double operator()(double x) const;

  const std::string& source() const noexcept { return source_; }

  struct Op {
    enum class Code {
      Number, Variable, Add, Sub, Mul, Div, Pow, Neg,
      Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Tanh, Sinh, Cosh,
    } code;
    double value = 0.0;
  };

 private:
  Expression(std::string source, std::vector<Op> program)
      : source_(std::move(source)), program_(std::move(program)) {}

  std::string source_;
  std::vector<Op> program_;
};

}  // namespace sgobs::profile

#endif  // SGOBS_EXPRESSION_HPP
