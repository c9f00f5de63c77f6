#pragma once

#include <iosfwd>

namespace phtree {

/// Exit statuses of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitValidation = 2, kExitCapacity = 3 };

/// Entry point of the `phtree` tool with its streams injected, so tests can
/// drive it in-process. Subcommands: solve, simulate, ucp, dim.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace phtree
