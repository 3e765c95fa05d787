#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hedra::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidArguments = 2,
  kInfeasible = 3,
  kNotConverged = 4,
  kIoFailure = 5,
};

inline constexpr const char* kVersion = "0.3.0";

/// Runs the `hedra` command line with explicit streams; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hedra::cli
