#pragma once

#include <ostream>

namespace decaycoh::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUnexpected = 1,
  kValidation = 2,
  kNumerical = 3,
  kIo = 4,
};

// Entry point of the decaycoh tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace decaycoh::cli
