#pragma once

// Incoherent VUV excitation D5/2 -> nF followed by instantaneous decay, sampled
// as a kinetic Monte Carlo process over Zeeman channels.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rydsim/atomic_structure.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

/// One D5/2 -> F excitation channel.
struct Channel {
  ZeemanState from;
  ZeemanState to;
  auto operator<=>(const Channel&) const = default;
};

/// Relative line strengths of the excitation channels.
///
/// In Equal mode every D5/2 -> F7/2 channel has weight 1 and every D5/2 -> F5/2
/// channel weight 0. In Custom mode only listed channels are enabled.
class ChannelWeights {
 public:
  static ChannelWeights equal() { return ChannelWeights{}; }
  static ChannelWeights custom(std::map<Channel, double> table);

  bool is_custom() const { return custom_; }
  const std::map<Channel, double>& table() const { return table_; }
  double weight(const Channel& channel) const;

 private:
  bool custom_ = false;
  std::map<Channel, double> table_;
};

struct LineComponent {
  Channel channel;
  double center = 0.0;  ///< Hz, offset from the zero-field line center
  double weight = 1.0;
};

/// Gaussian components of the D5/2 -> nF resonance at a given field.
class LineShape {
 public:
  /// One component for every allowed D5/2 -> F channel, centers from
  /// transition_offset. Throws InputError for sigma <= 0 or weights outside [0, 1].
  LineShape(MagneticField field, double sigma, const ChannelWeights& weights,
            const GFactors& g = GFactors{});

  double sigma() const { return sigma_; }
  const std::vector<LineComponent>& components() const { return components_; }

  /// Components starting at `from`, in allowed_targets order (zero weights kept).
  std::vector<LineComponent> components_from(const ZeemanState& from) const;

 private:
  double sigma_;
  std::vector<LineComponent> components_;
};

struct RydbergConfig {
  double peak_rate = 200.0;                ///< R0, 1/s
  double branch_d32 = 0.0792809;           ///< beta
  double rydberg_lifetime = 200e-9;        ///< s, informational
  ChannelWeights weights = ChannelWeights::equal();

  void validate() const;
};

struct ChannelRate {
  Channel channel;
  double rate = 0.0;  ///< 1/s
};

struct RateBreakdown {
  double total = 0.0;
  std::vector<ChannelRate> channels;
};

/// R_k = R0 * w_k * exp(-(detuning - center_k)^2 / (2 sigma^2)) for each channel
/// out of `from`. Throws DomainError unless `from` is a D5/2 sublevel.
RateBreakdown excitation_rate(const ZeemanState& from, double vuv_detuning,
                              const LineShape& shape, const RydbergConfig& cfg);

/// exp(-rate * T).
double survival_probability(double rate, double duration);

struct RydbergEvent {
  enum class Kind { Excite, Decay };
  Kind kind;
  double time = 0.0;  ///< s
  ZeemanState from;
  ZeemanState to;

  /// "t=<s> event=excite channel=<from>-><to>" or "t=<s> event=decay to=<state>".
  std::string to_log_line() const;
};

using EventLog = std::vector<RydbergEvent>;

/// Exposes one ion to VUV light for `duration`. Ions outside D5/2 are left alone.
/// Event times are reported as `start_time` plus the time within the exposure.
/// Throws InputError for negative durations.
void vuv_exposure(ZeemanState& state, double duration, double vuv_detuning,
                  const LineShape& shape, const RydbergConfig& cfg, Rng& rng,
                  EventLog* log = nullptr, double start_time = 0.0);

/// Outcome counts of repeated exposures comparing the m-change detection
/// signal against the j-change (D3/2) signal.
struct EfficiencyRatio {
  std::uint64_t exposures = 0;
  std::uint64_t m_changed = 0;   ///< final state in D5/2 with m != initial m
  std::uint64_t j_changed = 0;   ///< final state D3/2
  std::uint64_t unchanged = 0;

  /// m_changed / j_changed; nullopt when no exposure ended in D3/2.
  std::optional<double> ratio() const;
};

EfficiencyRatio detection_efficiency_ratio(const LineShape& shape, const RydbergConfig& cfg,
                                           const ZeemanState& initial, double vuv_detuning,
                                           double duration, std::uint64_t exposures,
                                           std::uint64_t seed);

/// Equal-weight mean of the centers of the channels out of `initial` whose
/// decay can change m (i.e. not the stretched, detection-blind channel).
double composite_center(const LineShape& shape, const ZeemanState& initial);

/// Branching ratio beta for which detection_efficiency_ratio equals `target`,
/// by bisection on a fixed sample (common random numbers across beta).
double calibrate_branching(const LineShape& shape, RydbergConfig cfg,
                           const ZeemanState& initial, double vuv_detuning, double duration,
                           double target, std::uint64_t exposures, std::uint64_t seed);

}  // namespace rydsim
