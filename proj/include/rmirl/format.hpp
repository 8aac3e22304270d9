#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace rmirl {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Strict whole-string parsers; throw Errc::ParseError.
double parse_double(std::string_view text);
std::size_t parse_size(std::string_view text);

}  // namespace rmirl
