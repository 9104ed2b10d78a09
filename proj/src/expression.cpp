#include "sgobs/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

namespace sgobs::profile {

namespace {

using Code = Expression::Op::Code;

// Recursive descent:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' sum ')' | '(' sum ')'
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  std::vector<Expression::Op> parse() {
    sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return std::move(program_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::Profile, "expression '" + text_ + "': " + message +
                                        " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Code code, double value = 0.0) { program_.push_back({code, value}); }

  void sum() {
    product();
    for (;;) {
      if (accept('+')) {
        product();
        emit(Code::Add);
      } else if (accept('-')) {
        product();
        emit(Code::Sub);
      } else {
        return;
      }
    }
  }

  void product() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Code::Mul);
      } else if (accept('/')) {
        unary();
        emit(Code::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Code::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Code::Pow);
    }
  }

  void primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (accept('(')) {
      sum();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      identifier();
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void number() {
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    emit(Code::Number, value);
  }

  void identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "x") return emit(Code::Variable);
    if (name == "pi") return emit(Code::Number, std::numbers::pi);
    if (name == "e") return emit(Code::Number, std::numbers::e);

    static const std::pair<const char*, Code> functions[] = {
        {"sin", Code::Sin},   {"cos", Code::Cos},   {"tan", Code::Tan},
        {"exp", Code::Exp},   {"log", Code::Log},   {"sqrt", Code::Sqrt},
        {"abs", Code::Abs},   {"tanh", Code::Tanh}, {"sinh", Code::Sinh},
        {"cosh", Code::Cosh},
    };
    for (const auto& [fname, code] : functions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + name);
        sum();
        if (!accept(')')) fail("expected ')'");
        return emit(code);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::vector<Expression::Op> program_;
};

}  // namespace

std::shared_ptr<const Expression> Expression::compile(const std::string& source) {
  Parser parser(source);
  auto program = parser.parse();
  return std::shared_ptr<const Expression>(new Expression(source, std::move(program)));
}

double Expression::operator()(double x) const {
  // Stack depth never exceeds the program length.
  std::vector<double> stack;
  stack.reserve(program_.size());
  auto pop = [&stack] {
    const double top = stack.back();
    stack.pop_back();
    return top;
  };
  for (const Op& op : program_) {
    switch (op.code) {
      case Code::Number: stack.push_back(op.value); break;
      case Code::Variable: stack.push_back(x); break;
      case Code::Add: { const double b = pop(); stack.back() += b; break; }
      case Code::Sub: { const double b = pop(); stack.back() -= b; break; }
      case Code::Mul: { const double b = pop(); stack.back() *= b; break; }
      case Code::Div: { const double b = pop(); stack.back() /= b; break; }
      case Code::Pow: { const double b = pop(); stack.back() = std::pow(stack.back(), b); break; }
      case Code::Neg: stack.back() = -stack.back(); break;
      case Code::Sin: stack.back() = std::sin(stack.back()); break;
      case Code::Cos: stack.back() = std::cos(stack.back()); break;
      case Code::Tan: stack.back() = std::tan(stack.back()); break;
      case Code::Exp: stack.back() = std::exp(stack.back()); break;
      case Code::Log: stack.back() = std::log(stack.back()); break;
      case Code::Sqrt: stack.back() = std::sqrt(stack.back()); break;
      case Code::Abs: stack.back() = std::abs(stack.back()); break;
      case Code::Tanh: stack.back() = std::tanh(stack.back()); break;
      case Code::Sinh: stack.back() = std::sinh(stack.back()); break;
      case Code::Cosh: stack.back() = std::cosh(stack.back()); break;
    }
  }
  return stack.back();
}

}  // namespace sgobs::profile
