#pragma once

// Command-line front end: simulate, select, refine, evaluate, pipeline.

#include <iosfwd>
#include <string>
#include <vector>

namespace mpclust::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInvalidArguments = 2,
  kDataError = 3,
  kNumericFailure = 4,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpclust::cli
