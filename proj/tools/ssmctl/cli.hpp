#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ssmctl::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kUsage = 2,
  kModelError = 3,
};

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssmctl::cli
