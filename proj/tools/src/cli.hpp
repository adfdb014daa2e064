#pragma once

#include <iosfwd>

namespace wmean::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

/// Parses argv, runs one subcommand and writes its reports to `out` (or the
/// --out file). Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wmean::cli
