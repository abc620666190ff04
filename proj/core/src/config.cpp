#include "rydsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "rydsim/errors.hpp"

namespace rydsim {

using nlohmann::json;

void ExperimentConfig::validate() const {
  MagneticField check(b_field);
  (void)check;
  trap().validate();
  if (n_ions == 0) throw InputError("n_ions must be >= 1");
  if (n_ions > 64) throw InputError("n_ions must be <= 64");
  if (!(beam.waist > 0.0)) throw InputError("beam.waist_m must be > 0");
  if (!(beam.omega0 >= 0.0)) throw InputError("beam.omega0_hz must be >= 0");
  if (!std::isfinite(beam.center)) throw InputError("beam.center_m must be finite");
  for (double f : {pulse_fidelity, pump393_fidelity, pump397_fidelity}) {
    if (!(f >= 0.0 && f <= 1.0)) throw InputError("fidelities must lie in [0, 1]");
  }
  if (!(sigma > 0.0)) throw InputError("rydberg.sigma_hz must be > 0");
  rydberg.validate();
  if (!std::isfinite(kappa)) throw InputError("kappa_m_per_v must be finite");
  if (!(filter_cutoff > 0.0)) throw InputError("filter_cutoff_hz must be > 0");
}

TrapConfig ExperimentConfig::trap() const {
  TrapConfig t;
  t.omega_ax = 2.0 * std::numbers::pi * omega_ax;
  t.omega_rad = 2.0 * std::numbers::pi * omega_rad;
  return t;
}

LineShape ExperimentConfig::line_shape() const {
  return LineShape(field(), sigma, rydberg.weights);
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw InputError("config key '" + key + "': " + why);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) bad(key, "expected a number");
  return j.get<double>();
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InputError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

ZeemanState state_field(const json& j, const std::string& key) {
  if (!j.is_string()) bad(key, "expected a state literal string");
  try {
    auto s = parse_state(j.get<std::string>());
    if (!s) bad(key, "unknown state label '" + j.get<std::string>() + "'");
    return *s;
  } catch (const DomainError& e) {
    bad(key, e.what());
  }
}

ChannelWeights parse_weights(const json& j) {
  const std::string key = "rydberg.weights_mode";
  if (j.is_string()) {
    if (j.get<std::string>() == "equal") return ChannelWeights::equal();
    bad(key, "expected \"equal\" or {\"custom\": [...]}");
  }
  check_keys(j, key, {"custom"});
  if (!j.contains("custom") || !j["custom"].is_array()) bad(key, "custom table must be an array");
  std::map<Channel, double> table;
  for (const auto& entry : j["custom"]) {
    check_keys(entry, key + ".custom[]", {"from", "to", "weight"});
    if (!entry.contains("from") || !entry.contains("to") || !entry.contains("weight")) {
      bad(key, "each custom entry needs from, to and weight");
    }
    Channel ch{state_field(entry["from"], key + ".from"), state_field(entry["to"], key + ".to")};
    if (table.contains(ch)) bad(key, "channel listed twice");
    table[ch] = number(entry["weight"], key + ".weight");
  }
  try {
    return ChannelWeights::custom(std::move(table));
  } catch (const SelectionRuleError& e) {
    bad(key, e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "",
             {"b_field_t", "omega_ax_hz", "omega_rad_hz", "n_ions", "beam", "pulse_fidelity",
              "pump393_fidelity", "pump397_fidelity", "rydberg", "vuv_unswitched",
              "kappa_m_per_v", "filter_cutoff_hz"});

  ExperimentConfig cfg;
  auto opt = [&](const json& obj, const char* key, double& dst, const std::string& prefix) {
    if (obj.contains(key)) dst = number(obj[key], prefix + key);
  };
  opt(root, "b_field_t", cfg.b_field, "");
  opt(root, "omega_ax_hz", cfg.omega_ax, "");
  opt(root, "omega_rad_hz", cfg.omega_rad, "");
  opt(root, "pulse_fidelity", cfg.pulse_fidelity, "");
  opt(root, "pump393_fidelity", cfg.pump393_fidelity, "");
  opt(root, "pump397_fidelity", cfg.pump397_fidelity, "");
  opt(root, "kappa_m_per_v", cfg.kappa, "");
  opt(root, "filter_cutoff_hz", cfg.filter_cutoff, "");
  if (root.contains("n_ions")) {
    const auto& n = root["n_ions"];
    if (!n.is_number_integer() || n.get<long long>() < 1) bad("n_ions", "expected an integer >= 1");
    cfg.n_ions = n.get<std::size_t>();
  }
  if (root.contains("vuv_unswitched")) {
    if (!root["vuv_unswitched"].is_boolean()) bad("vuv_unswitched", "expected true or false");
    cfg.vuv_unswitched = root["vuv_unswitched"].get<bool>();
  }
  if (root.contains("beam")) {
    const auto& b = root["beam"];
    check_keys(b, "beam", {"waist_m", "center_m", "omega0_hz"});
    opt(b, "waist_m", cfg.beam.waist, "beam.");
    opt(b, "center_m", cfg.beam.center, "beam.");
    opt(b, "omega0_hz", cfg.beam.omega0, "beam.");
  }
  if (root.contains("rydberg")) {
    const auto& r = root["rydberg"];
    check_keys(r, "rydberg", {"r0_hz", "sigma_hz", "beta", "weights_mode"});
    opt(r, "r0_hz", cfg.rydberg.peak_rate, "rydberg.");
    opt(r, "sigma_hz", cfg.sigma, "rydberg.");
    opt(r, "beta", cfg.rydberg.branch_d32, "rydberg.");
    if (r.contains("weights_mode")) cfg.rydberg.weights = parse_weights(r["weights_mode"]);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rydsim
