#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcomp::cli {

inline constexpr const char* tool_version = "1.0.0";

// Runs one command line (without the program name). CSV goes to --out or to
// `out`; diagnostics go to `err`. Exit status: 0 success, 1 verification
// counterexample, 2 usage or parameter error, 3 internal failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mcomp::cli
