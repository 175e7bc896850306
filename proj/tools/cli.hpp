// Command-line front end: simulate, phase, analyze, oracle.
#pragma once

#include <ostream>
#include <string_view>

namespace tipsy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Parses a probability written as a decimal ("0.25") or a fraction of
/// integers ("7/22"). Throws std::invalid_argument.
double parse_number(std::string_view text);

/// Entry point shared by the executable and the tests. Results go to `out`
/// (or the --output file), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace tipsy::cli
