#pragma once

#include <array>
#include <charconv>
#include <string>

namespace rydsim {

/// Shortest round-trip decimal form of `value`, independent of the C locale.
inline std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

/// Fixed notation with `digits` decimals, independent of the C locale.
inline std::string format_fixed(double value, int digits) {
  std::array<char, 128> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, digits);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

}  // namespace rydsim
