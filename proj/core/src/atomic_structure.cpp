#include "rydsim/atomic_structure.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "rydsim/errors.hpp"

namespace rydsim {

namespace {

constexpr HalfInt kHalf = HalfInt::from_twice(1);

const std::array<TermInfo, kAllTerms.size()> kTermTable = {{
    {"S1/2", 0, kHalf, HalfInt::from_twice(1)},
    {"D3/2", 2, kHalf, HalfInt::from_twice(3)},
    {"D5/2", 2, kHalf, HalfInt::from_twice(5)},
    {"F5/2", 3, kHalf, HalfInt::from_twice(5)},
    {"F7/2", 3, kHalf, HalfInt::from_twice(7)},
}};

bool is_f(Term t) { return t == Term::F52 || t == Term::F72; }

int abs_twice_delta(const ZeemanState& a, const ZeemanState& b) {
  return std::abs(a.m().twice() - b.m().twice());
}

}  // namespace

std::string HalfInt::to_string() const {
  std::string sign = twice_ > 0 ? "+" : (twice_ < 0 ? "-" : "");
  int mag = std::abs(twice_);
  if (mag % 2 == 0) return sign + std::to_string(mag / 2);
  return sign + std::to_string(mag) + "/2";
}

std::optional<HalfInt> parse_half_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int sign = 1;
  if (text.front() == '+' || text.front() == '-') {
    sign = text.front() == '-' ? -1 : 1;
    text.remove_prefix(1);
  }
  auto slash = text.find('/');
  auto num_text = text.substr(0, slash);
  int num = 0;
  auto [p, ec] = std::from_chars(num_text.data(), num_text.data() + num_text.size(), num);
  if (ec != std::errc{} || p != num_text.data() + num_text.size() || num_text.empty()) {
    return std::nullopt;
  }
  if (slash == std::string_view::npos) return HalfInt::integer(sign * num);
  if (text.substr(slash + 1) != "2") return std::nullopt;
  return HalfInt::from_twice(sign * num);
}

const TermInfo& term_info(Term term) { return kTermTable[static_cast<std::size_t>(term)]; }

std::string_view term_label(Term term) { return term_info(term).label; }

double lande_g(int L, HalfInt S, HalfInt J) {
  const int two_l = 2 * L;
  if (L < 0 || S.twice() < 0 || J.twice() <= 0 ||
      J.twice() < std::abs(two_l - S.twice()) || J.twice() > two_l + S.twice() ||
      (J.twice() - two_l - S.twice()) % 2 != 0) {
    throw DomainError("inconsistent quantum numbers L=" + std::to_string(L) +
                      " S=" + S.to_string() + " J=" + J.to_string());
  }
  const double j = J.value();
  const double s = S.value();
  const double l = L;
  return 1.0 + (j * (j + 1) + s * (s + 1) - l * (l + 1)) / (2.0 * j * (j + 1));
}

GFactors::GFactors() {
  for (Term t : kAllTerms) {
    const auto& info = term_info(t);
    g_[index(t)] = lande_g(info.L, info.S, info.J);
  }
}

GFactors& GFactors::override_factor(Term term, double g) {
  if (!std::isfinite(g)) throw DomainError("g factor must be finite");
  g_[index(term)] = g;
  return *this;
}

ZeemanState::ZeemanState(Term term, HalfInt m) : term_(term), m_(m) {
  if (term == Term::D32) {
    if (m.twice() != 0) throw DomainError("D3/2 is modeled as a single aggregate level");
    return;
  }
  const auto J = term_info(term).J;
  if (m.is_half_odd() != J.is_half_odd() || m > J || m < -J) {
    throw DomainError("m=" + m.to_string() + " is not a sublevel of " +
                      std::string(term_label(term)));
  }
}

ZeemanState ZeemanState::d32_aggregate() { return ZeemanState(Term::D32, HalfInt{}, true); }

std::string ZeemanState::to_string() const {
  if (is_aggregate()) return std::string(term_label(term_));
  return std::string(term_label(term_)) + ":" + m_.to_string();
}

std::vector<ZeemanState> sublevels(Term term) {
  if (term == Term::D32) return {ZeemanState::d32_aggregate()};
  const int twice_j = term_info(term).J.twice();
  std::vector<ZeemanState> out;
  out.reserve(static_cast<std::size_t>(twice_j + 1));
  for (int tm = -twice_j; tm <= twice_j; tm += 2) {
    out.emplace_back(term, HalfInt::from_twice(tm));
  }
  return out;
}

MagneticField::MagneticField(double tesla) : tesla_(tesla) {
  if (!(tesla >= 0.0) || !std::isfinite(tesla)) {
    throw DomainError("magnetic field magnitude must be finite and >= 0");
  }
}

double zeeman_shift(const ZeemanState& state, MagneticField field, const GFactors& g) {
  if (state.is_aggregate()) return 0.0;
  return g(state.term()) * state.m().value() * kBohrMagnetonOverH * field.tesla();
}

bool is_allowed(const ZeemanState& lower, const ZeemanState& upper, TransitionKind kind) {
  const Term a = lower.term();
  const Term b = upper.term();
  switch (kind) {
    case TransitionKind::Quadrupole729:
      return ((a == Term::S12 && b == Term::D52) || (a == Term::D52 && b == Term::S12)) &&
             abs_twice_delta(lower, upper) <= 4;
    case TransitionKind::DipoleVUV:
      return a == Term::D52 && is_f(b) && abs_twice_delta(lower, upper) <= 2;
    case TransitionKind::DipoleDecay:
      if (!is_f(a)) return false;
      if (b == Term::D32) return true;
      return b == Term::D52 && abs_twice_delta(lower, upper) <= 2;
  }
  return false;
}

bool is_allowed(const ZeemanState& lower, const ZeemanState& upper) {
  return is_allowed(lower, upper, TransitionKind::Quadrupole729) ||
         is_allowed(lower, upper, TransitionKind::DipoleVUV) ||
         is_allowed(lower, upper, TransitionKind::DipoleDecay);
}

double transition_offset(const ZeemanState& lower, const ZeemanState& upper,
                         MagneticField field, const GFactors& g) {
  if (!is_allowed(lower, upper)) {
    throw SelectionRuleError("no transition connects " + lower.to_string() + " and " +
                             upper.to_string());
  }
  return zeeman_shift(upper, field, g) - zeeman_shift(lower, field, g);
}

std::vector<ZeemanState> allowed_targets(const ZeemanState& initial, TransitionKind kind,
                                         std::optional<Term> target) {
  std::vector<Term> terms;
  switch (kind) {
    case TransitionKind::Quadrupole729:
      if (initial.term() == Term::S12) terms = {Term::D52};
      if (initial.term() == Term::D52) terms = {Term::S12};
      break;
    case TransitionKind::DipoleVUV:
      if (initial.term() == Term::D52) terms = {Term::F52, Term::F72};
      break;
    case TransitionKind::DipoleDecay:
      if (is_f(initial.term())) terms = {Term::D52, Term::D32};
      break;
  }
  std::vector<ZeemanState> out;
  for (Term t : terms) {
    if (target && *target != t) continue;
    for (const auto& s : sublevels(t)) {
      if (is_allowed(initial, s, kind)) out.push_back(s);
    }
  }
  return out;
}

std::optional<ZeemanState> parse_state(std::string_view text) {
  auto colon = text.find(':');
  auto label = text.substr(0, colon);
  std::optional<Term> term;
  if (label == "S" || label == "S1/2") term = Term::S12;
  for (Term t : kAllTerms) {
    if (label == term_label(t)) term = t;
  }
  if (!term) return std::nullopt;
  if (*term == Term::D32) {
    if (colon != std::string_view::npos) {
      throw DomainError("D3/2 is an aggregate level and takes no m");
    }
    return ZeemanState::d32_aggregate();
  }
  if (colon == std::string_view::npos) {
    throw DomainError("state " + std::string(label) + " needs a magnetic quantum number");
  }
  auto m = parse_half_int(text.substr(colon + 1));
  if (!m) throw DomainError("malformed magnetic quantum number in '" + std::string(text) + "'");
  return ZeemanState(*term, *m);
}

}  // namespace rydsim
