#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "rydsim/coherent_dynamics.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/format.hpp"
#include "rydsim/sequence.hpp"
#include "rydsim/units.hpp"

namespace rydsim {

namespace {

struct Token {
  std::string_view text;
  std::size_t column = 0;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
           line[i] != '#') {
      ++i;
    }
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

struct Field {
  std::string_view value;
  std::size_t key_column;
  std::size_t value_column;
};

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line, std::size_t first_field)
      : tokens_(std::move(tokens)), line_(line) {
    for (std::size_t i = first_field; i < tokens_.size(); ++i) {
      const auto& tok = tokens_[i];
      const auto eq = tok.text.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        fail("expected key=value, got '" + std::string(tok.text) + "'", tok.column);
      }
      const auto key = tok.text.substr(0, eq);
      if (fields_.contains(key)) {
        fail("duplicate field '" + std::string(key) + "'", tok.column);
      }
      const auto value = tok.text.substr(eq + 1);
      if (value.empty()) fail("field '" + std::string(key) + "' has no value", tok.column);
      fields_[key] = {value, tok.column, tok.column + eq + 1};
    }
  }

  [[noreturn]] void fail(const std::string& message, std::size_t column) const {
    throw ParseError(message, line_, column);
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, field] : fields_) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        fail("unknown field '" + std::string(key) + "'", field.key_column);
      }
    }
  }

  bool has(std::string_view key) const { return fields_.contains(key); }

  const Field& require(std::string_view key) const {
    auto it = fields_.find(key);
    if (it == fields_.end()) {
      fail("missing field '" + std::string(key) + "'", tokens_.front().column);
    }
    return it->second;
  }

  double quantity(std::string_view key, Dimension dim, bool non_negative) const {
    const auto& f = require(key);
    auto v = parse_quantity(f.value, dim);
    if (!v) fail("bad value '" + std::string(f.value) + "' for '" + std::string(key) + "'",
                 f.value_column);
    if (non_negative && *v < 0.0) {
      fail("'" + std::string(key) + "' must be >= 0", f.value_column);
    }
    return *v;
  }

  double quantity_or(std::string_view key, Dimension dim, double fallback) const {
    return has(key) ? quantity(key, dim, false) : fallback;
  }

  std::size_t ion() const {
    const auto& f = require("ion");
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(f.value.data(), f.value.data() + f.value.size(), v);
    if (ec != std::errc{} || p != f.value.data() + f.value.size()) {
      fail("ion index must be a non-negative integer", f.value_column);
    }
    return v;
  }

  ZeemanState state(std::string_view key) const {
    const auto& f = require(key);
    try {
      auto s = parse_state(f.value);
      if (!s) fail("unknown state label '" + std::string(f.value) + "'", f.value_column);
      return *s;
    } catch (const DomainError& e) {
      fail(e.what(), f.value_column);
    }
  }

  std::size_t line() const { return line_; }

 private:
  std::vector<Token> tokens_;
  std::size_t line_;
  std::map<std::string_view, Field, std::less<>> fields_;
};

template <typename Pulse>
Pulse parse_pulse(const LineParser& p) {
  Pulse pulse;
  pulse.ion = p.ion();
  pulse.lower = p.state("from");
  pulse.upper = p.state("to");
  try {
    require_quadrupole_pair(pulse.lower, pulse.upper);
  } catch (const SelectionRuleError& e) {
    p.fail(e.what(), p.require("to").value_column);
  }
  return pulse;
}

Instruction parse_instruction(const std::vector<Token>& tokens, std::size_t line) {
  const auto op = tokens.front().text;
  auto sub = [&](std::string_view what) -> std::string_view {
    if (tokens.size() < 2 || tokens[1].text.find('=') != std::string_view::npos) {
      throw ParseError("'" + std::string(op) + "' needs " + std::string(what), line,
                       tokens.front().column);
    }
    return tokens[1].text;
  };

  if (op == "pulse") {
    const auto kind = sub("a pulse kind (pi or rabi)");
    LineParser p(tokens, line, 2);
    if (kind == "pi") {
      p.allow_only({"ion", "from", "to"});
      return parse_pulse<PiPulse>(p);
    }
    if (kind == "rabi") {
      p.allow_only({"ion", "from", "to", "omega", "detuning", "t"});
      auto pulse = parse_pulse<RabiPulse>(p);
      pulse.omega = p.quantity("omega", Dimension::Frequency, true);
      pulse.detuning = p.quantity_or("detuning", Dimension::Frequency, 0.0);
      pulse.t = p.quantity("t", Dimension::Time, true);
      return pulse;
    }
    throw ParseError("unknown pulse kind '" + std::string(kind) + "'", line, tokens[1].column);
  }
  if (op == "init") {
    LineParser p(tokens, line, 1);
    p.allow_only({"state"});
    Init init{p.state("state")};
    if (init.state.term() != Term::S12) {
      p.fail("init state must be an S1/2 sublevel", p.require("state").value_column);
    }
    return init;
  }
  if (op == "vuv") {
    LineParser p(tokens, line, 1);
    p.allow_only({"t", "detuning"});
    return Vuv{p.quantity("t", Dimension::Time, true),
               p.quantity_or("detuning", Dimension::Frequency, 0.0)};
  }
  if (op == "pump") {
    const auto wavelength = sub("a wavelength (397 or 393)");
    if (tokens.size() > 2) {
      throw ParseError("'pump' takes no fields", line, tokens[2].column);
    }
    if (wavelength == "397") return Pump397{};
    if (wavelength == "393") return Pump393{};
    throw ParseError("unknown pump wavelength '" + std::string(wavelength) + "'", line,
                     tokens[1].column);
  }
  if (op == "transport") {
    LineParser p(tokens, line, 1);
    p.allow_only({"dz", "dv", "t"});
    Transport tr;
    if (p.has("dz") == p.has("dv")) {
      p.fail("transport needs exactly one of dz= or dv=", tokens.front().column);
    }
    if (p.has("dz")) tr.dz = p.quantity("dz", Dimension::Length, false);
    if (p.has("dv")) tr.dv = p.quantity("dv", Dimension::Voltage, false);
    tr.t = p.quantity("t", Dimension::Time, true);
    return tr;
  }
  if (op == "detect") {
    LineParser p(tokens, line, 1);
    p.allow_only({"t", "signal", "vuv"});
    Detect d;
    d.t = p.quantity("t", Dimension::Time, true);
    if (p.has("signal")) {
      const auto& f = p.require("signal");
      if (f.value == "bright") {
        d.signal = Signal::Bright;
      } else if (f.value == "dark") {
        d.signal = Signal::Dark;
      } else {
        p.fail("signal must be 'bright' or 'dark'", f.value_column);
      }
    }
    if (p.has("vuv")) d.vuv_exposure = p.quantity("vuv", Dimension::Time, true);
    return d;
  }
  throw ParseError("unknown instruction '" + std::string(op) + "'", line,
                   tokens.front().column);
}

std::string fmt_state(const ZeemanState& s) { return s.to_string(); }

}  // namespace

std::optional<std::size_t> PulseProgram::max_ion_index() const {
  std::optional<std::size_t> out;
  for (const auto& ins : instructions) {
    std::optional<std::size_t> ion;
    if (const auto* p = std::get_if<PiPulse>(&ins)) ion = p->ion;
    if (const auto* p = std::get_if<RabiPulse>(&ins)) ion = p->ion;
    if (ion && (!out || *ion > *out)) out = ion;
  }
  return out;
}

PulseProgram parse_program(std::string_view source) {
  PulseProgram program;
  std::size_t line_no = 0;
  std::size_t last_line = 1;
  std::optional<std::size_t> detect_line;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    auto eol = source.find('\n', pos);
    if (eol == std::string_view::npos) eol = source.size();
    const auto line = source.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    last_line = line_no;
    if (detect_line) {
      if (tokens.front().text == "detect") {
        throw ParseError("duplicate detect (first on line " + std::to_string(*detect_line) + ")",
                         line_no, tokens.front().column);
      }
      throw ParseError("instruction after detect; detect must be last", line_no,
                       tokens.front().column);
    }
    auto ins = parse_instruction(tokens, line_no);
    if (std::holds_alternative<Init>(ins) && !program.instructions.empty()) {
      throw ParseError("init must be the first instruction", line_no, tokens.front().column);
    }
    if (std::holds_alternative<Detect>(ins)) detect_line = line_no;
    program.instructions.push_back(std::move(ins));
    program.source_lines.push_back(line_no);
  }
  if (!detect_line) {
    throw ParseError("program must end with a detect instruction", last_line, 1);
  }
  return program;
}

std::string to_string(const Instruction& instruction) {
  struct Printer {
    std::string operator()(const Init& i) const { return "init state=" + fmt_state(i.state); }
    std::string operator()(const PiPulse& p) const {
      return "pulse pi ion=" + std::to_string(p.ion) + " from=" + fmt_state(p.lower) +
             " to=" + fmt_state(p.upper);
    }
    std::string operator()(const RabiPulse& p) const {
      return "pulse rabi ion=" + std::to_string(p.ion) + " from=" + fmt_state(p.lower) +
             " to=" + fmt_state(p.upper) + " omega=" + format_double(p.omega) +
             " detuning=" + format_double(p.detuning) + " t=" + format_double(p.t);
    }
    std::string operator()(const Vuv& v) const {
      return "vuv t=" + format_double(v.t) + " detuning=" + format_double(v.detuning);
    }
    std::string operator()(const Pump397&) const { return "pump 397"; }
    std::string operator()(const Pump393&) const { return "pump 393"; }
    std::string operator()(const Transport& t) const {
      std::string s = "transport";
      if (t.dz) s += " dz=" + format_double(*t.dz);
      if (t.dv) s += " dv=" + format_double(*t.dv);
      return s + " t=" + format_double(t.t);
    }
    std::string operator()(const Detect& d) const {
      std::string s = "detect t=" + format_double(d.t) +
                      " signal=" + (d.signal == Signal::Dark ? "dark" : "bright");
      if (d.vuv_exposure) s += " vuv=" + format_double(*d.vuv_exposure);
      return s;
    }
  };
  return std::visit(Printer{}, instruction);
}

std::string to_string(const PulseProgram& program) {
  std::string out;
  for (const auto& ins : program.instructions) out += to_string(ins) + "\n";
  return out;
}

}  // namespace rydsim
