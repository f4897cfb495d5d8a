#pragma once

// Command layer behind the `zeeman` executable. Kept in a library so the
// tests can drive whole commands without spawning processes.

#include <iosfwd>
#include <string>
#include <vector>

#include "zeeman/state_opt.hpp"

namespace zeeman::cli {

/// Runs one command line (args exclude the program name). Output goes to
/// `out` unless --out names a file; diagnostics go to `err`. Returns the exit
/// status: 0 on success, including flagged estimates.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Integer lists: "5", "1,2,4", "1..5", "10..100:2" (arithmetic step),
/// "8..1024*2" (geometric factor). Items may be mixed with commas.
std::vector<int> parse_int_list(const std::string& text);

/// %.17g, with "inf" / "-inf" / "nan" spelled out.
std::string format_double(double value);

struct ScalingCsv {
  std::vector<ScalingRow> rows;
  std::string mode;
  std::string family;
};

/// Reads the scaling CSV back. Throws ValidationError on a bad header or row.
ScalingCsv read_scaling_csv(std::istream& in);

}  // namespace zeeman::cli
