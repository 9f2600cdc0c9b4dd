#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace segpost::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInputError = 2,
  kDegenerate = 3,
};

// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segpost::cli
