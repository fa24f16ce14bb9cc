#ifndef LEGALATTR_CLI_H_
#define LEGALATTR_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace legalattr {
namespace cli {

inline constexpr const char *kVersion = "0.1.0";

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitBadInput = 2,
  kExitNumerical = 3,
};

// Runs one subcommand; args[0] is the program name. Reports go to `out`,
// diagnostics to `err`.
int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

}  // namespace cli
}  // namespace legalattr

#endif  // LEGALATTR_CLI_H_
