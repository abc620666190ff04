#pragma once

// Level and Zeeman structure of 40Ca+ for the S1/2 <-> D5/2 qubit line and
// D5/2 -> nF Rydberg excitation.

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rydsim {

/// Bohr magneton over Planck's constant, Hz/T (CODATA).
inline constexpr double kBohrMagnetonOverH = 13.996245e9;

/// Exact multiple of 1/2, stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
  static constexpr HalfInt integer(int value) { return HalfInt(2 * value); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_half_odd() const { return (twice_ % 2) != 0; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
  constexpr auto operator<=>(const HalfInt&) const = default;

  /// "-5/2", "+1/2", "3", "-1" (integers print without a denominator).
  std::string to_string() const;

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

/// Parses "-5/2", "+3/2", "1/2", "2" or "-1". Returns nullopt on malformed text.
std::optional<HalfInt> parse_half_int(std::string_view text);

enum class Term { S12, D32, D52, F52, F72 };

inline constexpr std::array<Term, 5> kAllTerms = {Term::S12, Term::D32, Term::D52,
                                                   Term::F52, Term::F72};

struct TermInfo {
  std::string_view label;
  int L;
  HalfInt S;
  HalfInt J;
};

const TermInfo& term_info(Term term);
std::string_view term_label(Term term);

/// Landé g_J. Throws DomainError when J is not reachable from L and S.
double lande_g(int L, HalfInt S, HalfInt J);

/// g_J table for the modeled terms; defaults to the Landé values, entries may be
/// overridden by measured factors.
class GFactors {
 public:
  GFactors();
  double operator()(Term term) const { return g_[index(term)]; }
  GFactors& override_factor(Term term, double g);

 private:
  static std::size_t index(Term term) { return static_cast<std::size_t>(term); }
  std::array<double, kAllTerms.size()> g_{};
};

/// |term, m>. D3/2 is an aggregate level and always carries m = 0.
class ZeemanState {
 public:
  /// Throws DomainError if m is outside -J..J or has the wrong parity.
  ZeemanState(Term term, HalfInt m);
  static ZeemanState d32_aggregate();

  Term term() const { return term_; }
  HalfInt m() const { return m_; }
  bool is_aggregate() const { return term_ == Term::D32; }

  /// "S1/2:-1/2", "D5/2:+5/2", "F7/2:-7/2", "D3/2".
  std::string to_string() const;

  auto operator<=>(const ZeemanState&) const = default;

 private:
  ZeemanState(Term term, HalfInt m, bool) : term_(term), m_(m) {}
  Term term_;
  HalfInt m_;
};

/// All sublevels of a term in ascending m (one entry for the D3/2 aggregate).
std::vector<ZeemanState> sublevels(Term term);

struct MagneticField {
  /// Throws DomainError for negative or non-finite magnitudes.
  explicit MagneticField(double tesla);
  double tesla() const { return tesla_; }

 private:
  double tesla_;
};

enum class TransitionKind { Quadrupole729, DipoleVUV, DipoleDecay };

/// g_J * m * (mu_B/h) * B, in Hz.
double zeeman_shift(const ZeemanState& state, MagneticField field,
                    const GFactors& g = GFactors{});

/// True when some transition kind connects lower -> upper.
bool is_allowed(const ZeemanState& lower, const ZeemanState& upper);
bool is_allowed(const ZeemanState& lower, const ZeemanState& upper, TransitionKind kind);

/// zeeman_shift(upper) - zeeman_shift(lower). Throws SelectionRuleError for
/// pairs no transition kind connects.
double transition_offset(const ZeemanState& lower, const ZeemanState& upper,
                         MagneticField field, const GFactors& g = GFactors{});

/// Sublevels reachable from `initial` under `kind`, ascending m, F5/2 before
/// F7/2, the D3/2 aggregate last. `target` restricts the result to one term.
/// Empty when `initial` does not belong to a term the kind acts on.
std::vector<ZeemanState> allowed_targets(const ZeemanState& initial, TransitionKind kind,
                                         std::optional<Term> target = std::nullopt);

/// Parses a state literal: "S:-1/2", "S1/2:+1/2", "D5/2:-5/2", "F7/2:3/2", "D3/2".
/// Returns nullopt when the term label is unknown; throws DomainError for a
/// known term with an invalid m.
std::optional<ZeemanState> parse_state(std::string_view text);

}  // namespace rydsim
