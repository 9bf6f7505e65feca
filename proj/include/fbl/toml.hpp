#pragma once

// A TOML subset for experiment configs: [tables] and [dotted.tables], bare,
// quoted and dotted keys, strings, integers, floats (inf/nan), booleans,
// multi-line arrays, inline tables and # comments. Dates are not supported.

#include <nlohmann/json.hpp>
#include <string_view>

namespace fbl {

/// Throws Error(config_error) with line and column on malformed input or
/// duplicate keys.
nlohmann::ordered_json parse_toml(std::string_view text);

}  // namespace fbl
