#pragma once

#include <iosfwd>

namespace tmm::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kInput = 3,
  kCapacity = 4,
  kInternal = 5,
};

/// Entry point of the `teammaxmin` command; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tmm::cli
