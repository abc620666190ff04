#include "rydsim/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace rydsim {

namespace {

struct Suffix {
  std::string_view text;
  Dimension dim;
  double scale;
};

constexpr std::array<Suffix, 13> kSuffixes = {{
    {"ns", Dimension::Time, 1e-9},
    {"us", Dimension::Time, 1e-6},
    {"ms", Dimension::Time, 1e-3},
    {"s", Dimension::Time, 1.0},
    {"Hz", Dimension::Frequency, 1.0},
    {"kHz", Dimension::Frequency, 1e3},
    {"MHz", Dimension::Frequency, 1e6},
    {"GHz", Dimension::Frequency, 1e9},
    {"nm", Dimension::Length, 1e-9},
    {"um", Dimension::Length, 1e-6},
    {"mm", Dimension::Length, 1e-3},
    {"m", Dimension::Length, 1.0},
    {"mV", Dimension::Voltage, 1e-3},
}};

}  // namespace

std::optional<double> parse_quantity(std::string_view text, Dimension dim) {
  if (text.empty()) return std::nullopt;
  std::string_view number = text;
  if (number.front() == '+') number.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (ec != std::errc{} || end == number.data() || !std::isfinite(value)) return std::nullopt;
  const std::string_view suffix(end, static_cast<std::size_t>(number.data() + number.size() - end));
  if (suffix.empty()) return value;
  if (dim == Dimension::Voltage && suffix == "V") return value;
  for (const auto& s : kSuffixes) {
    if (s.text == suffix) {
      if (s.dim != dim) return std::nullopt;
      // Divide for sub-unit prefixes so "1.5ms" parses to exactly 0.0015.
      return s.scale < 1.0 ? value / std::round(1.0 / s.scale) : value * s.scale;
    }
  }
  return std::nullopt;
}

}  // namespace rydsim
