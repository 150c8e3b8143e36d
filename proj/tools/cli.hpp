#pragma once

#include <iosfwd>

namespace tricluster::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadInput = 2,       // unreadable, malformed or empty input
  kIncompatible = 3,   // model does not fit the data
  kUsage = 64,         // invalid or conflicting flags
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tricluster::cli
