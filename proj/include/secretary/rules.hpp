#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "secretary/cutoffs.hpp"
#include "secretary/params.hpp"
#include "secretary/seeding.hpp"

namespace secretary {

// What a rule sees at position t: whether the current candidate beats all
// earlier ones. Values are never exposed.
struct Observation {
  int t = 0;
  bool is_record = false;
};

enum class Decision { Reject, Accept };

// Catalog order is the canonical report order.
enum class RuleId { Exact, Odds, ExpectedRecord, Adaptive, Probabilistic, TwoPhase, RollingDp, Ensemble };

inline constexpr std::array<RuleId, 8> kAllRules{
    RuleId::Exact,         RuleId::Odds,     RuleId::ExpectedRecord, RuleId::Adaptive,
    RuleId::Probabilistic, RuleId::TwoPhase, RuleId::RollingDp,      RuleId::Ensemble};

inline constexpr std::array<RuleId, 7> kEnsembleMembers{
    RuleId::Exact,         RuleId::Odds,     RuleId::ExpectedRecord, RuleId::Adaptive,
    RuleId::Probabilistic, RuleId::TwoPhase, RuleId::RollingDp};

constexpr int catalog_index(RuleId id) noexcept { return static_cast<int>(id); }

constexpr std::string_view label(RuleId id) noexcept {
  constexpr std::array<std::string_view, 8> names{"Exact", "Odds", "ER", "AD", "PR", "TP", "DP", "VE"};
  return names[static_cast<std::size_t>(id)];
}

constexpr bool is_stochastic(RuleId id) noexcept {
  return id == RuleId::Probabilistic || id == RuleId::TwoPhase || id == RuleId::Ensemble;
}

/// Accepts the short labels (case-insensitive) and a few long aliases.
inline RuleId parse_rule(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "exact") return RuleId::Exact;
  if (s == "odds") return RuleId::Odds;
  if (s == "er" || s == "expected-record") return RuleId::ExpectedRecord;
  if (s == "ad" || s == "adaptive") return RuleId::Adaptive;
  if (s == "pr" || s == "probabilistic") return RuleId::Probabilistic;
  if (s == "tp" || s == "two-phase") return RuleId::TwoPhase;
  if (s == "dp" || s == "rolling-dp") return RuleId::RollingDp;
  if (s == "ve" || s == "ensemble") return RuleId::Ensemble;
  throw std::domain_error("unknown rule '" + std::string(text) + "'");
}

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

// Enforces the observation protocol: t = 1, 2, ..., n in order, the first
// candidate is a record, and nothing arrives after an acceptance.
class StepClock {
 public:
  StepClock() = default;
  explicit StepClock(int n) : n_(n) {}

  void advance(const Observation& obs) {
    if (accepted_) throw ContractViolation("observation after the rule already accepted");
    if (obs.t != last_t_ + 1 || obs.t > n_) {
      throw ContractViolation("out-of-order observation: expected t=" + std::to_string(last_t_ + 1) +
                              ", got t=" + std::to_string(obs.t));
    }
    if (obs.t == 1 && !obs.is_record) throw ContractViolation("the first candidate is always a record");
    last_t_ = obs.t;
  }

  Decision settle(bool accept) {
    accepted_ = accept;
    return accept ? Decision::Accept : Decision::Reject;
  }

  int n() const noexcept { return n_; }
  int t() const noexcept { return last_t_; }
  bool accepted() const noexcept { return accepted_; }

 private:
  int n_ = 0;
  int last_t_ = 0;
  bool accepted_ = false;
};

struct NoCoin {
  bool operator()(double q) const noexcept { return q >= 1.0; }
};

}  // namespace detail

// Skip r* candidates, then take the first record.
class ExactRule {
 public:
  ExactRule(const CutoffSet& c) : clock_(c.n), cutoff_(c.r_star) {}

  template <class Coin>
  Decision observe(const Observation& obs, Coin&) {
    clock_.advance(obs);
    return clock_.settle(obs.is_record && obs.t > cutoff_);
  }
  Decision observe(const Observation& obs) {
    detail::NoCoin c;
    return observe(obs, c);
  }

  int cutoff() const noexcept { return cutoff_; }
  int start_time() const noexcept { return cutoff_ + 1; }

 private:
  detail::StepClock clock_;
  int cutoff_;
};

// First record at or after the odds threshold s*.
class OddsRule {
 public:
  OddsRule(const CutoffSet& c) : clock_(c.n), threshold_(c.s_star) {}

  template <class Coin>
  Decision observe(const Observation& obs, Coin&) {
    clock_.advance(obs);
    return clock_.settle(obs.is_record && obs.t >= threshold_);
  }
  Decision observe(const Observation& obs) {
    detail::NoCoin c;
    return observe(obs, c);
  }

  int threshold() const noexcept { return threshold_; }
  int start_time() const noexcept { return threshold_; }

 private:
  detail::StepClock clock_;
  int threshold_;
};

// First record after the harmonic cutoff.
class ExpectedRecordRule {
 public:
  ExpectedRecordRule(const CutoffSet& c) : clock_(c.n), cutoff_(c.r_er) {}

  template <class Coin>
  Decision observe(const Observation& obs, Coin&) {
    clock_.advance(obs);
    return clock_.settle(obs.is_record && obs.t > cutoff_);
  }
  Decision observe(const Observation& obs) {
    detail::NoCoin c;
    return observe(obs, c);
  }

  int cutoff() const noexcept { return cutoff_; }
  int start_time() const noexcept { return cutoff_ + 1; }

 private:
  detail::StepClock clock_;
  int cutoff_;
};

/// Streaming cutoff s_t = r0 - clip(gamma (R_t - H_t), +-cap sqrt(log t)),
/// rounded half away from zero and clamped to [1, n-1]. No shift at t = 1.
inline int adaptive_cutoff(int r0, int n, int t, int records_seen, double harmonic_t, const RuleParams& p) {
  double shift = 0.0;
  if (t >= 2) {
    const double bound = p.cap * std::sqrt(std::log(static_cast<double>(t)));
    shift = std::clamp(p.gamma * (records_seen - harmonic_t), -bound, bound);
  }
  const double raw = std::round(r0 - shift);
  return static_cast<int>(std::clamp(raw, 1.0, static_cast<double>(n - 1)));
}

// Adaptive cutoff rule; the current observation is counted into R_t and
// H_t before the cutoff is evaluated.
class AdaptiveRule {
 public:
  AdaptiveRule(const CutoffSet& c, const RuleParams& p)
      : clock_(c.n), r0_(c.r0), params_(p), s_t_(c.r0) {}

  template <class Coin>
  Decision observe(const Observation& obs, Coin&) {
    clock_.advance(obs);
    const int t = obs.t;
    records_seen_ += obs.is_record ? 1 : 0;
    harmonic_t_ += 1.0 / t;
    s_t_ = adaptive_cutoff(r0_, clock_.n(), t, records_seen_, harmonic_t_, params_);
    return clock_.settle(obs.is_record && t > s_t_);
  }
  Decision observe(const Observation& obs) {
    detail::NoCoin c;
    return observe(obs, c);
  }

  int anchor() const noexcept { return r0_; }
  int records_seen() const noexcept { return records_seen_; }
  double harmonic_t() const noexcept { return harmonic_t_; }
  // Cutoff in force after the latest observation (r0 before any).
  int current_cutoff() const noexcept { return s_t_; }
  int start_time() const noexcept { return r0_; }

 private:
  detail::StepClock clock_;
  int r0_;
  RuleParams params_;
  int records_seen_ = 0;
  double harmonic_t_ = 0.0;
  int s_t_;
};

// Records before tau0 = floor(n/e) are taken with probability
// eta (t/tau0)^p; from tau0 on the first record is taken outright.
class ProbabilisticRule {
 public:
  ProbabilisticRule(const CutoffSet& c, const RuleParams& p, std::uint64_t seed)
      : clock_(c.n), tau0_(c.r0), params_(p), coin_(seed) {}

  template <class Coin>
  Decision observe(const Observation& obs, Coin& coin) {
    clock_.advance(obs);
    return clock_.settle(obs.is_record && coin(acceptance_probability(obs.t)));
  }
  Decision observe(const Observation& obs) { return observe(obs, coin_); }

  double acceptance_probability(int t) const { return early_accept_prob(t, tau0_, params_); }
  int tau0() const noexcept { return tau0_; }
  int start_time() const noexcept { return 1; }

 private:
  detail::StepClock clock_;
  int tau0_;
  RuleParams params_;
  EngineCoin coin_;
};

// Exploration up to r1, randomized relaxation on (r1, r2], then the first
// record is taken outright.
class TwoPhaseRule {
 public:
  TwoPhaseRule(const CutoffSet& c, const RuleParams& p, std::uint64_t seed)
      : clock_(c.n), r1_(c.r1), r2_(c.r2), params_(p), coin_(seed) {}

  template <class Coin>
  Decision observe(const Observation& obs, Coin& coin) {
    clock_.advance(obs);
    return clock_.settle(obs.is_record && coin(acceptance_probability(obs.t)));
  }
  Decision observe(const Observation& obs) { return observe(obs, coin_); }

  double acceptance_probability(int t) const { return two_phase_accept_prob(t, r1_, r2_, params_); }
  int r1() const noexcept { return r1_; }
  int r2() const noexcept { return r2_; }
  int start_time() const noexcept { return r1_ + 1; }

 private:
  detail::StepClock clock_;
  int r1_;
  int r2_;
  RuleParams params_;
  EngineCoin coin_;
};

// Odds threshold while more than m0 candidates remain; inside the final
// m0-window the local clock t - n + m0 is tested against r*(m) for the
// current remaining length m = n - t + 1.
class RollingDpRule {
 public:
  RollingDpRule(const CutoffSet& c, const RuleParams& p)
      : clock_(c.n), threshold_(c.s_star), m0_(p.m0), table_(c.r_star_table) {}

  template <class Coin>
  Decision observe(const Observation& obs, Coin&) {
    clock_.advance(obs);
    if (!obs.is_record) return clock_.settle(false);
    const int n = clock_.n();
    const int m = n - obs.t + 1;
    if (m > m0_) return clock_.settle(obs.t >= threshold_);
    const int t_local = obs.t - n + m0_;
    return clock_.settle(t_local > table_[static_cast<std::size_t>(m)]);
  }
  Decision observe(const Observation& obs) {
    detail::NoCoin c;
    return observe(obs, c);
  }

  int start_time() const noexcept { return threshold_; }

 private:
  detail::StepClock clock_;
  int threshold_;
  int m0_;
  std::vector<int> table_;
};

using MemberRule = std::variant<ExactRule, OddsRule, ExpectedRecordRule, AdaptiveRule, ProbabilisticRule,
                                TwoPhaseRule, RollingDpRule>;

inline MemberRule make_member(RuleId id, const CutoffSet& c, const RuleParams& p, std::uint64_t seed) {
  switch (id) {
    case RuleId::Exact: return ExactRule(c);
    case RuleId::Odds: return OddsRule(c);
    case RuleId::ExpectedRecord: return ExpectedRecordRule(c);
    case RuleId::Adaptive: return AdaptiveRule(c, p);
    case RuleId::Probabilistic: return ProbabilisticRule(c, p, seed);
    case RuleId::TwoPhase: return TwoPhaseRule(c, p, seed);
    case RuleId::RollingDp: return RollingDpRule(c, p);
    case RuleId::Ensemble: break;
  }
  throw std::domain_error("not an ensemble member: " + std::string(label(id)));
}

// Majority vote over the seven member rules, all driven by the same stream.
// A member votes at t iff it accepts exactly at t. The ensemble accepts at
// the first t >= T_common with at least ceil(K/2) votes.
//
// Fallback: once fewer than ceil(K/2) members are still running, no later
// majority can form, so the ensemble takes the current record (t >= T_common).
// Every member except AD, TP and DP accepts the first record at or after
// T_common, so this decision is reached at that very record and coincides
// with "first record at or after T_common when no majority time exists".
class EnsembleRule {
 public:
  EnsembleRule(const CutoffSet& c, const RuleParams& p, std::uint64_t seed)
      : clock_(c.n), t_common_(ensemble_common_start(c)), majority_((p.k_rules + 1) / 2) {
    for (std::size_t k = 0; k < kEnsembleMembers.size(); ++k) {
      members_.push_back(make_member(kEnsembleMembers[k], c, p, derive_seed(seed, {k})));
    }
    stop_times_.assign(members_.size(), 0);
  }

  template <class Coin>
  Decision observe(const Observation& obs, Coin& coin) {
    return step(obs, [&](MemberRule& m) {
      return std::visit([&](auto& r) { return r.observe(obs, coin); }, m);
    });
  }
  Decision observe(const Observation& obs) {
    return step(obs, [&](MemberRule& m) { return std::visit([&](auto& r) { return r.observe(obs); }, m); });
  }

  int common_start() const noexcept { return t_common_; }
  int majority() const noexcept { return majority_; }
  // Votes collected at the acceptance time (0 until the ensemble accepts).
  int votes_at_stop() const noexcept { return votes_at_stop_; }
  bool used_fallback() const noexcept { return used_fallback_; }
  // Realized member stop times in member order; 0 while a member is running.
  const std::vector<int>& member_stop_times() const noexcept { return stop_times_; }
  int start_time() const noexcept { return t_common_; }

 private:
  template <class Drive>
  Decision step(const Observation& obs, Drive&& drive) {
    clock_.advance(obs);
    int votes = 0;
    int running = 0;
    for (std::size_t k = 0; k < members_.size(); ++k) {
      if (stop_times_[k] != 0) continue;
      if (drive(members_[k]) == Decision::Accept) {
        stop_times_[k] = obs.t;
        ++votes;
      } else {
        ++running;
      }
    }
    if (obs.t < t_common_) return clock_.settle(false);
    if (votes >= majority_) {
      votes_at_stop_ = votes;
      return clock_.settle(true);
    }
    if (obs.is_record && running < majority_) {
      votes_at_stop_ = votes;
      used_fallback_ = true;
      return clock_.settle(true);
    }
    return clock_.settle(false);
  }

  detail::StepClock clock_;
  int t_common_;
  int majority_;
  std::vector<MemberRule> members_;
  std::vector<int> stop_times_;
  int votes_at_stop_ = 0;
  bool used_fallback_ = false;
};

// Type-erased online rule state. Value semantic; one instance per trial.
class Rule {
 public:
  using State = std::variant<ExactRule, OddsRule, ExpectedRecordRule, AdaptiveRule, ProbabilisticRule,
                             TwoPhaseRule, RollingDpRule, EnsembleRule>;

  Rule(RuleId id, const CutoffSet& c, const RuleParams& p, std::uint64_t seed = 0)
      : id_(id), state_(build(id, c, p, seed)) {}

  RuleId id() const noexcept { return id_; }

  Decision observe(const Observation& obs) {
    return std::visit([&](auto& r) { return r.observe(obs); }, state_);
  }

  // Routes every Bernoulli draw (including those of ensemble members)
  // through `coin`, which maps an acceptance probability to a decision.
  template <class Coin>
  Decision observe(const Observation& obs, Coin& coin) {
    return std::visit([&](auto& r) { return r.observe(obs, coin); }, state_);
  }

  int start_time() const {
    return std::visit([](const auto& r) { return r.start_time(); }, state_);
  }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&state_);
  }

 private:
  static State build(RuleId id, const CutoffSet& c, const RuleParams& p, std::uint64_t seed) {
    if (id == RuleId::Ensemble) return EnsembleRule(c, p, seed);
    return std::visit([](auto&& m) -> State { return std::move(m); }, make_member(id, c, p, seed));
  }

  RuleId id_;
  State state_;
};

/// Builds a fresh rule for horizon n. The seed only matters for PR, TP and VE.
inline Rule rule_init(RuleId id, int n, const RuleParams& params, std::uint64_t seed = 0) {
  return Rule(id, make_cutoffs(n, params), params, seed);
}

}  // namespace secretary
