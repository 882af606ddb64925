#pragma once

#include <ostream>

namespace drm {

/// Exit codes of the drmat front end.
enum ExitCode : int { kExitPass = 0, kExitVerifyFail = 1, kExitMathError = 2, kExitConfigError = 3 };

/// Runs the drmat command line (argv[0] is the program name). JSON documents
/// go to `out` unless --out is given; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace drm
