#ifndef SGOBS_ERROR_HPP
#define SGOBS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sgobs {

enum class ErrorKind {
  DegenerateGrid,
  Profile,
  InadmissibleParameters,
  EpsilonRange,
  Certificate,
  Infeasible,
  Numeric,
  Divergence,
  Stiffness,
  Parse,
  Refusal,
  Io,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

// Base for every error the library raises. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::string key, int line, const std::string& message)
      : Error(ErrorKind::Parse, format(key, line, message)),
        key_(std::move(key)),
        line_(line) {}

  const std::string& key() const noexcept { return key_; }
  /// 1-based line number, 0 when the problem is not tied to a line.
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line,
                            const std::string& message) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "key '" + key + "': ";
    return out + message;
  }

  std::string key_;
  int line_;
};

class IntegrationError : public Error {
 public:
  IntegrationError(ErrorKind kind, double time, const std::string& message)
      : Error(kind, message + " (t = " + std::to_string(time) + ")"),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace sgobs

#endif  // SGOBS_ERROR_HPP
