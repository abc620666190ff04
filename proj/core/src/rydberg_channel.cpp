#include "rydsim/rydberg_channel.hpp"

#include <cmath>

#include "rydsim/errors.hpp"
#include "rydsim/format.hpp"

namespace rydsim {

ChannelWeights ChannelWeights::custom(std::map<Channel, double> table) {
  ChannelWeights w;
  w.custom_ = true;
  for (const auto& [channel, weight] : table) {
    if (!is_allowed(channel.from, channel.to, TransitionKind::DipoleVUV)) {
      throw SelectionRuleError("weight table lists a channel the VUV transition does not drive: " +
                               channel.from.to_string() + " -> " + channel.to.to_string());
    }
    if (!(weight >= 0.0 && weight <= 1.0)) throw InputError("channel weights must lie in [0, 1]");
  }
  w.table_ = std::move(table);
  return w;
}

double ChannelWeights::weight(const Channel& channel) const {
  if (custom_) {
    auto it = table_.find(channel);
    return it == table_.end() ? 0.0 : it->second;
  }
  return channel.to.term() == Term::F72 ? 1.0 : 0.0;
}

LineShape::LineShape(MagneticField field, double sigma, const ChannelWeights& weights,
                     const GFactors& g)
    : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("line width sigma must be > 0");
  for (const auto& from : sublevels(Term::D52)) {
    for (const auto& to : allowed_targets(from, TransitionKind::DipoleVUV)) {
      Channel ch{from, to};
      const double w = weights.weight(ch);
      if (!(w >= 0.0 && w <= 1.0)) throw InputError("channel weights must lie in [0, 1]");
      components_.push_back({ch, transition_offset(from, to, field, g), w});
    }
  }
}

std::vector<LineComponent> LineShape::components_from(const ZeemanState& from) const {
  std::vector<LineComponent> out;
  for (const auto& c : components_) {
    if (c.channel.from == from) out.push_back(c);
  }
  return out;
}

void RydbergConfig::validate() const {
  if (!(peak_rate >= 0.0) || !std::isfinite(peak_rate)) {
    throw InputError("peak excitation rate must be finite and >= 0");
  }
  if (!(branch_d32 >= 0.0 && branch_d32 <= 1.0)) {
    throw InputError("branching ratio to D3/2 must lie in [0, 1]");
  }
  if (!(rydberg_lifetime >= 0.0)) throw InputError("Rydberg lifetime must be >= 0");
}

RateBreakdown excitation_rate(const ZeemanState& from, double vuv_detuning,
                              const LineShape& shape, const RydbergConfig& cfg) {
  if (from.term() != Term::D52) {
    throw DomainError("VUV excitation starts from D5/2, not " + from.to_string());
  }
  RateBreakdown out;
  const double inv_two_var = 1.0 / (2.0 * shape.sigma() * shape.sigma());
  for (const auto& c : shape.components()) {
    if (c.channel.from != from) continue;
    const double d = vuv_detuning - c.center;
    const double r = cfg.peak_rate * c.weight * std::exp(-d * d * inv_two_var);
    out.channels.push_back({c.channel, r});
    out.total += r;
  }
  return out;
}

double survival_probability(double rate, double duration) {
  return std::exp(-rate * duration);
}

std::string RydbergEvent::to_log_line() const {
  std::string line = "t=" + format_double(time);
  if (kind == Kind::Excite) {
    line += " event=excite channel=" + from.to_string() + "->" + to.to_string();
  } else {
    line += " event=decay to=" + to.to_string();
  }
  return line;
}

void vuv_exposure(ZeemanState& state, double duration, double vuv_detuning,
                  const LineShape& shape, const RydbergConfig& cfg, Rng& rng, EventLog* log,
                  double start_time) {
  if (!(duration >= 0.0)) throw InputError("VUV exposure duration must be >= 0");
  double t = 0.0;
  while (state.term() == Term::D52) {
    const RateBreakdown rates = excitation_rate(state, vuv_detuning, shape, cfg);
    if (rates.total <= 0.0) return;
    t += rng.exponential(rates.total);
    if (t > duration) return;

    double pick = rng.uniform() * rates.total;
    const ChannelRate* chosen = &rates.channels.back();
    for (const auto& cr : rates.channels) {
      if (pick < cr.rate) {
        chosen = &cr;
        break;
      }
      pick -= cr.rate;
    }
    const ZeemanState rydberg = chosen->channel.to;
    if (log) {
      log->push_back({RydbergEvent::Kind::Excite, start_time + t, state, rydberg});
    }

    if (rng.bernoulli(cfg.branch_d32)) {
      state = ZeemanState::d32_aggregate();
    } else {
      const auto targets = allowed_targets(rydberg, TransitionKind::DipoleDecay, Term::D52);
      state = targets[rng.index(targets.size())];
    }
    if (log) {
      log->push_back({RydbergEvent::Kind::Decay, start_time + t, rydberg, state});
    }
  }
}

std::optional<double> EfficiencyRatio::ratio() const {
  if (j_changed == 0) return std::nullopt;
  return static_cast<double>(m_changed) / static_cast<double>(j_changed);
}

EfficiencyRatio detection_efficiency_ratio(const LineShape& shape, const RydbergConfig& cfg,
                                           const ZeemanState& initial, double vuv_detuning,
                                           double duration, std::uint64_t exposures,
                                           std::uint64_t seed) {
  if (initial.term() != Term::D52) {
    throw DomainError("efficiency ratio needs a D5/2 initial state");
  }
  EfficiencyRatio out;
  out.exposures = exposures;
  for (std::uint64_t i = 0; i < exposures; ++i) {
    Rng rng(derive_seed(seed, i));
    ZeemanState s = initial;
    vuv_exposure(s, duration, vuv_detuning, shape, cfg, rng);
    if (s.is_aggregate()) {
      ++out.j_changed;
    } else if (s != initial) {
      ++out.m_changed;
    } else {
      ++out.unchanged;
    }
  }
  return out;
}

double composite_center(const LineShape& shape, const ZeemanState& initial) {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : shape.components_from(initial)) {
    if (c.weight <= 0.0) continue;
    const auto decays = allowed_targets(c.channel.to, TransitionKind::DipoleDecay, Term::D52);
    const bool blind = decays.size() == 1 && decays.front() == initial;
    if (blind) continue;
    sum += c.center;
    ++n;
  }
  if (n == 0) throw InputError("no detectable channel starts at " + initial.to_string());
  return sum / n;
}

double calibrate_branching(const LineShape& shape, RydbergConfig cfg,
                           const ZeemanState& initial, double vuv_detuning, double duration,
                           double target, std::uint64_t exposures, std::uint64_t seed) {
  auto ratio_at = [&](double beta) {
    cfg.branch_d32 = beta;
    auto r = detection_efficiency_ratio(shape, cfg, initial, vuv_detuning, duration,
                                        exposures, seed);
    return r.ratio().value_or(std::numeric_limits<double>::infinity());
  };
  // ratio falls with beta
  double lo = 1e-6;
  double hi = 1.0;
  if (ratio_at(lo) < target) throw NumericError("target ratio unreachable even for beta -> 0");
  for (int i = 0; i < 60 && hi - lo > 1e-7; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ratio_at(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rydsim
