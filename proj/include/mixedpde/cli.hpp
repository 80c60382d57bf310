#pragma once

#include <iosfwd>

namespace mixedpde {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitValidation = 2,
    kExitSingularWithData = 3,
    kExitNotTabulated = 4,
};

/// Entry point for the subcommands solve, denominator, eigs and verify.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixedpde
