#pragma once

#include <iosfwd>

namespace hodlr::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kInputError = 2,
  kSingular = 3,
};

/// Entry point of the `hodlr` tool: subcommands bench, verify and solve.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace hodlr::cli
