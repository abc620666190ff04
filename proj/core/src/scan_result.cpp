#include "rydsim/scan_result.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string_view>

#include "rydsim/errors.hpp"
#include "rydsim/format.hpp"

namespace rydsim {

bool ScanResult::is_corrected(std::size_t ion) const {
  return std::any_of(corrections.begin(), corrections.end(),
                     [&](const BackgroundCorrection& c) { return c.ion == ion; });
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  out << "detuning_hz";
  for (std::size_t i = 0; i < scan.n_ions; ++i) out << ",ion" << i << "_p,ion" << i << "_err";
  std::vector<std::size_t> corrected;
  for (std::size_t i = 0; i < scan.n_ions; ++i) {
    if (scan.is_corrected(i)) {
      corrected.push_back(i);
      out << ",ion" << i << "_p_raw";
    }
  }
  out << '\n';
  for (std::size_t k = 0; k < scan.size(); ++k) {
    out << format_double(scan.detuning[k]);
    for (std::size_t i = 0; i < scan.n_ions; ++i) {
      out << ',' << format_double(scan.p[k][i]) << ',' << format_double(scan.err[k][i]);
    }
    for (std::size_t i : corrected) out << ',' << format_double(scan.raw_p[k][i]);
    out << '\n';
  }
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_number(std::string_view text, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw InputError("scan CSV line " + std::to_string(line) + ": bad number '" +
                     std::string(text) + "'");
  }
  return v;
}

// "ion12_p" -> (12, "p")
std::optional<std::pair<std::size_t, std::string_view>> ion_column(std::string_view name) {
  if (!name.starts_with("ion")) return std::nullopt;
  name.remove_prefix(3);
  std::size_t idx = 0;
  auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), idx);
  if (ec != std::errc{} || p == name.data() || *p != '_') return std::nullopt;
  return std::make_pair(idx, std::string_view(p + 1, name.data() + name.size() - p - 1));
}

}  // namespace

ScanResult read_scan_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("scan CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.empty() || header.front() != "detuning_hz") {
    throw InputError("scan CSV must start with a detuning_hz column");
  }
  struct Col {
    std::size_t ion;
    int kind;  // 0 p, 1 err, 2 raw
  };
  std::vector<Col> cols;
  std::size_t n_ions = 0;
  std::map<std::pair<std::size_t, int>, bool> seen;
  for (std::size_t c = 1; c < header.size(); ++c) {
    auto parsed = ion_column(header[c]);
    int kind = -1;
    if (parsed) {
      if (parsed->second == "p") kind = 0;
      if (parsed->second == "err") kind = 1;
      if (parsed->second == "p_raw") kind = 2;
    }
    if (kind < 0) throw InputError("unexpected scan CSV column '" + std::string(header[c]) + "'");
    if (seen[{parsed->first, kind}]) {
      throw InputError("duplicate scan CSV column '" + std::string(header[c]) + "'");
    }
    seen[{parsed->first, kind}] = true;
    cols.push_back({parsed->first, kind});
    n_ions = std::max(n_ions, parsed->first + 1);
  }
  for (std::size_t i = 0; i < n_ions; ++i) {
    if (!seen[{i, 0}] || !seen[{i, 1}]) {
      throw InputError("scan CSV lacks ion" + std::to_string(i) + "_p or _err");
    }
  }

  ScanResult scan;
  scan.n_ions = n_ions;
  std::vector<bool> has_raw(n_ions, false);
  for (const auto& c : cols) {
    if (c.kind == 2) has_raw[c.ion] = true;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw InputError("scan CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    scan.detuning.push_back(to_number(fields[0], line_no));
    std::vector<double> p(n_ions), err(n_ions), raw(n_ions);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = to_number(fields[c + 1], line_no);
      (cols[c].kind == 0 ? p : cols[c].kind == 1 ? err : raw)[cols[c].ion] = v;
    }
    for (std::size_t i = 0; i < n_ions; ++i) {
      if (!has_raw[i]) raw[i] = p[i];
    }
    scan.p.push_back(std::move(p));
    scan.err.push_back(std::move(err));
    scan.raw_p.push_back(std::move(raw));
  }
  for (std::size_t i = 0; i < n_ions; ++i) {
    if (has_raw[i] && scan.size() > 0) {
      // 12 significant digits drop the rounding noise of p - raw
      const double diff = scan.p[0][i] - scan.raw_p[0][i];
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", diff);
      scan.corrections.push_back({i, std::strtod(buf, nullptr)});
    }
  }
  return scan;
}

}  // namespace rydsim
