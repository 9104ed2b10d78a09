#ifndef SGOBS_CLI_HPP
#define SGOBS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sgobs::cli {

/// Exit codes: 0 success, 1 domain error (inadmissible parameters, failed
/// bound, I/O), 2 usage or parse error.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv);

}  // namespace sgobs::cli

#endif  // SGOBS_CLI_HPP
