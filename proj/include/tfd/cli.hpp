#pragma once

#include <iosfwd>

namespace tfd {

/// Runs the `tfd` command line. Results go to `out` (or --output), messages to `err`.
/// Returns 0 on success, 2 on bad input, 3 on numerical failure or a failed check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tfd
