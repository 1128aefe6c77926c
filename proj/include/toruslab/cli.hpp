#pragma once

#include <iosfwd>

namespace toruslab {

/// Command-line entry point. Subcommands: spectrum, homology, metric,
/// entropy, verify {a|b|bc|d|f|ca|all}, catalog.
/// Returns 0 on success (for verify: all rows hold), 1 on usage or
/// configuration errors, 2 on computational failure or a VIOLATED row,
/// 3 when only hypothesis rows fail.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toruslab
