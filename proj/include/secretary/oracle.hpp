#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "secretary/cutoffs.hpp"
#include "secretary/harness.hpp"
#include "secretary/rules.hpp"

namespace secretary {

using Rational = boost::rational<std::int64_t>;

inline constexpr int kOracleMaxN = 10;

// Ground truth for one rule at horizon n over all n! equally likely orderings.
struct ExactResult {
  int n = 0;
  RuleId rule = RuleId::Exact;
  // True when no ordering required a coin flip; the rationals are then exact
  // and their denominators divide n!.
  bool exact = false;
  Rational success_exact{0};
  Rational expected_stop_exact{0};
  long double success_probability = 0.0L;
  long double expected_stop = 0.0L;
};

/// Eq.-style closed form (r/n) sum_{k=r+1}^{n} 1/(k-1) as an exact fraction.
inline Rational analytic_success_exact(int n, int r) {
  if (n < 2 || r < 1 || r > n - 1) throw std::domain_error("analytic_success_exact: need 1 <= r <= n-1");
  Rational tail{0};
  for (int k = r + 1; k <= n; ++k) tail += Rational(1, k - 1);
  return Rational(r, n) * tail;
}

namespace detail {

// Replays a fixed prefix of coin outcomes, then answers "reject" to every
// new genuine flip while remembering where the unexplored branches are.
class ScriptedCoin {
 public:
  explicit ScriptedCoin(const std::vector<bool>& prefix) : prefix_(prefix) {}

  bool operator()(double q) {
    if (q <= 0.0) return false;
    if (q >= 1.0) return true;
    const bool take = pos_ < prefix_.size() ? prefix_[pos_] : false;
    if (pos_ >= prefix_.size()) fresh_.push_back(pos_);
    ++pos_;
    weight_ *= take ? q : 1.0L - q;
    return take;
  }

  long double weight() const noexcept { return weight_; }
  std::size_t flips() const noexcept { return pos_; }
  const std::vector<std::size_t>& fresh_branch_points() const noexcept { return fresh_; }

 private:
  const std::vector<bool>& prefix_;
  std::size_t pos_ = 0;
  long double weight_ = 1.0L;
  std::vector<std::size_t> fresh_;
};

struct OracleTally {
  std::int64_t wins = 0;
  std::int64_t stop_sum = 0;
  long double wins_w = 0.0L;
  long double stop_w = 0.0L;
  bool branched = false;
};

inline void tally_ordering(const Rule& prototype, const std::vector<bool>& records, int argmax,
                           OracleTally& acc) {
  const int n = static_cast<int>(records.size());
  std::vector<std::vector<bool>> pending{{}};
  while (!pending.empty()) {
    const std::vector<bool> prefix = std::move(pending.back());
    pending.pop_back();
    Rule rule = prototype;
    ScriptedCoin coin(prefix);
    int tau = n;
    for (int t = 1; t <= n; ++t) {
      if (rule.observe(Observation{t, records[static_cast<std::size_t>(t - 1)]}, coin) == Decision::Accept) {
        tau = t;
        break;
      }
    }
    // Each fresh flip defaulted to "reject"; queue the "accept" sibling.
    for (std::size_t pos : coin.fresh_branch_points()) {
      std::vector<bool> next = prefix;
      next.resize(pos, false);
      next.push_back(true);
      pending.push_back(std::move(next));
    }
    if (coin.flips() > 0) acc.branched = true;
    const bool win = tau == argmax;
    acc.wins += win ? 1 : 0;
    acc.stop_sum += tau;
    acc.wins_w += win ? coin.weight() : 0.0L;
    acc.stop_w += coin.weight() * tau;
  }
}

}  // namespace detail

/// Exhaustive success probability and expected stopping time of `rule` over
/// all n! orderings (forced stop at n included). Coin flips of stochastic
/// rules are integrated exactly by branching. Refuses n > 10.
inline ExactResult enumerate_success(RuleId rule, int n, const RuleParams& params = {}, unsigned threads = 1) {
  if (n < 2) throw std::domain_error("enumerate_success: n must be >= 2");
  if (n > kOracleMaxN) {
    throw std::domain_error("enumerate_success: n=" + std::to_string(n) + " exceeds the enumeration limit of " +
                            std::to_string(kOracleMaxN));
  }
  const Rule prototype(rule, make_cutoffs(n, params), params, 0);

  // One partition per leading element; partitions reduce by exact addition.
  std::vector<detail::OracleTally> parts(static_cast<std::size_t>(n));
  detail::parallel_for(n, threads, [&](int first) {
    std::vector<int> rest;
    for (int v = 0; v < n; ++v) {
      if (v != first) rest.push_back(v);
    }
    std::vector<bool> records(static_cast<std::size_t>(n));
    auto& acc = parts[static_cast<std::size_t>(first)];
    do {
      int best = first;
      int argmax = 1;
      records[0] = true;
      for (int i = 1; i < n; ++i) {
        const int v = rest[static_cast<std::size_t>(i - 1)];
        records[static_cast<std::size_t>(i)] = v > best;
        if (v > best) {
          best = v;
          argmax = i + 1;
        }
      }
      detail::tally_ordering(prototype, records, argmax, acc);
    } while (std::next_permutation(rest.begin(), rest.end()));
  });

  detail::OracleTally total;
  for (const auto& p : parts) {
    total.wins += p.wins;
    total.stop_sum += p.stop_sum;
    total.wins_w += p.wins_w;
    total.stop_w += p.stop_w;
    total.branched = total.branched || p.branched;
  }
  std::int64_t orderings = 1;
  for (int k = 2; k <= n; ++k) orderings *= k;

  ExactResult res;
  res.n = n;
  res.rule = rule;
  res.exact = !total.branched;
  res.success_probability = total.wins_w / orderings;
  res.expected_stop = total.stop_w / orderings;
  if (res.exact) {
    res.success_exact = Rational(total.wins, orderings);
    res.expected_stop_exact = Rational(total.stop_sum, orderings);
  }
  return res;
}

}  // namespace secretary
