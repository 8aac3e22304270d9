#include "rmirl/format.hpp"

#include <charconv>
#include <cmath>

#include "rmirl/error.hpp"

namespace rmirl {

std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw Error(Errc::InvalidArgument, "cannot format value");
  return std::string(buffer, end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Error(Errc::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t parse_size(std::string_view text) {
  std::size_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Error(Errc::ParseError, "not a non-negative integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace rmirl
