#pragma once

#include <string>

#include "json.hpp"

namespace phonojsd {

enum class FloatStyle {
  fixed6,  // "%.6f": the stable, diff-able default
  exact,   // shortest representation that round-trips
};

/// Compact JSON with object keys in byte order and a fixed float format.
/// Non-finite floats become null.
std::string canonical_dump(const nlohmann::json& value, FloatStyle style = FloatStyle::fixed6);

std::string format_fixed(double value, int decimals);
std::string format_shortest(double value);

}  // namespace phonojsd
