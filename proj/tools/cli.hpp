#pragma once

#include <iosfwd>

namespace fedgame::cli {

/// Runs the `fedgame` command line. Output goes to `out` unless --out names a
/// file; failures are reported as a single `error: <kind>: <message>` line on
/// `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fedgame::cli
