#pragma once

// Command-line front end: flag/JSON configuration, dispatch and CSV output.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polya/spaces.hpp"
#include "polya/weights.hpp"

namespace polya::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kConfigError = 2;

/// Runs one command; `args` excludes the program name. CSV goes to `out`
/// unless an output path is configured; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// `family:key=val,...` or `table:path`. Families that take n default it
/// to space.n().
Weight parse_weight(const std::string& text, const MatrixSpace& space);

/// Two-column CSV (x, w) with linear-in-log interpolation.
Weight load_table_weight(const std::string& path);

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::uint64_t fnv1a(const std::string& text);

}  // namespace polya::cli
