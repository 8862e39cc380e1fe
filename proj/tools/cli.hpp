#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace squeezebell::cli {

/// Flat key → value table, stored as the strings the user wrote so that a
/// dumped config reproduces the run exactly.
struct RunConfig {
    std::string command;  ///< correlator | map | bell | bell-scan
    std::map<std::string, std::string> params;
};

/// Every key accepted in a config file or via a flag.
const std::vector<std::string>& known_keys();

/// Parses `key = value` lines with `#` comments. Throws std::invalid_argument
/// naming the line for malformed input or unknown keys.
RunConfig parse_config_text(std::string_view text);

/// Inverse of parse_config_text, keys in a fixed order.
std::string dump_config(const RunConfig& c);

/// Full command-line entry point; argv[0] is the program name.
/// Returns 0 on success, 1 on usage errors, 2 on numerical-domain errors.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& argv);

}  // namespace squeezebell::cli
