#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rocketopt::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInvalidInput = 2,
  kStall = 3,
  kNumericFailure = 4,
};

/// Parses argv-style arguments and runs one command. Results go to `out`,
/// progress and error JSON to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace rocketopt::cli
