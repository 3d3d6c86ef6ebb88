#pragma once

#include <ostream>

namespace strata::cli {

/// Exit codes of the strata command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;

/// Parses arguments, runs the evaluation and writes report.html and
/// results.json into the output directory.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace strata::cli
