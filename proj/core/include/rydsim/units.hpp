#pragma once

#include <optional>
#include <string_view>

namespace rydsim {

enum class Dimension { Time, Frequency, Length, Voltage, Dimensionless };

/// Parses a decimal number with an optional unit suffix and returns it in SI
/// (s, Hz, m, V). Accepted suffixes: ns us ms s / Hz kHz MHz GHz / nm um mm m /
/// mV V. A bare number is taken as SI. Returns nullopt for malformed text or a
/// suffix of the wrong dimension.
std::optional<double> parse_quantity(std::string_view text, Dimension dim);

}  // namespace rydsim
