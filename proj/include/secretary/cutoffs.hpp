#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "secretary/params.hpp"

namespace secretary {

namespace detail {
inline void require_horizon(int n, int min_n, const char* who) {
  if (n < min_n) {
    throw std::domain_error(std::string(who) + ": horizon n=" + std::to_string(n) +
                            " below minimum " + std::to_string(min_n));
  }
}
}  // namespace detail

/// n-th harmonic number by direct summation.
inline double harmonic(int n) {
  detail::require_horizon(n, 1, "harmonic");
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

/// Success probability of the cutoff rule that skips the first r candidates
/// and then takes the first record: (r/n) * sum_{k=r+1}^{n} 1/(k-1).
inline double analytic_success(int n, int r) {
  if (n < 2 || r < 1 || r > n - 1) {
    throw std::domain_error("analytic_success: need 1 <= r <= n-1, got n=" + std::to_string(n) +
                            " r=" + std::to_string(r));
  }
  double tail = 0.0;
  for (int k = r + 1; k <= n; ++k) tail += 1.0 / (k - 1);
  return static_cast<double>(r) / n * tail;
}

struct ExactCutoff {
  int r_star;
  double p_star;
};

/// Maximizer of analytic_success over r in [1, n-1]; ties go to the smallest r.
inline ExactCutoff exact_cutoff(int n) {
  detail::require_horizon(n, 2, "exact_cutoff");
  // tail(r) = sum_{k=r+1}^{n} 1/(k-1) = sum_{j=r}^{n-1} 1/j, built from the top down.
  std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
  for (int r = n - 1; r >= 1; --r) tail[r] = tail[r + 1] + 1.0 / r;
  ExactCutoff best{1, -1.0};
  for (int r = 1; r <= n - 1; ++r) {
    const double p = static_cast<double>(r) / n * tail[r];
    if (p > best.p_star) best = {r, p};
  }
  best.p_star = analytic_success(n, best.r_star);
  return best;
}

/// Odds-sum threshold for the classical record process (odds 1/(i-1)):
/// the largest s in [2, n] whose tail odds-sum reaches one.
inline int odds_cutoff(int n) {
  detail::require_horizon(n, 2, "odds_cutoff");
  double sum = 0.0;
  for (int s = n; s >= 2; --s) {
    sum += 1.0 / (s - 1);
    if (sum >= 1.0) return s;
  }
  return 2;
}

/// Smallest r in [0, n-1] after which at most one more record is expected.
inline int er_cutoff(int n) {
  detail::require_horizon(n, 2, "er_cutoff");
  const double hn = harmonic(n);
  double hr = 0.0;  // H_0
  for (int r = 0; r <= n - 1; ++r) {
    if (r > 0) hr += 1.0 / r;
    if (hn - hr <= 1.0) return r;
  }
  return n - 1;
}

/// floor(n / e): adaptive anchor and early-accept horizon.
inline int e_cutoff(int n) { return static_cast<int>(std::floor(n / std::numbers::e)); }

/// Record acceptance probability of the two-phase rule at position t.
inline double two_phase_accept_prob(int t, int r1, int r2, const RuleParams& params) {
  if (t <= r1) return 0.0;
  if (t > r2) return 1.0;
  const double span = std::max(1, r2 - r1);
  return params.q0 + (params.q1 - params.q0) * (t - r1) / span;
}

/// Record acceptance probability of the early-accept rule at position t.
inline double early_accept_prob(int t, int tau0, const RuleParams& params) {
  if (t >= tau0) return 1.0;
  return params.eta * std::pow(static_cast<double>(t) / tau0, params.p_exp);
}

// Every precomputed threshold a rule may need for horizon n.
struct CutoffSet {
  int n = 0;
  int r_star = 0;
  double p_star = 0.0;
  int s_star = 0;
  int r_er = 0;
  int r0 = 0;
  int r1 = 0;
  int r2 = 0;
  // r_star_table[m] for m in [1, m0]; index 0 unused. A single remaining
  // candidate has cutoff 0 (take it if it is a record).
  std::vector<int> r_star_table;
};

inline CutoffSet make_cutoffs(int n, const RuleParams& params) {
  detail::require_horizon(n, 2, "make_cutoffs");
  validate(params);
  CutoffSet c;
  c.n = n;
  const auto ex = exact_cutoff(n);
  c.r_star = ex.r_star;
  c.p_star = ex.p_star;
  c.s_star = odds_cutoff(n);
  c.r_er = er_cutoff(n);
  c.r0 = e_cutoff(n);
  c.r1 = static_cast<int>(std::floor(0.90 * c.r_star));
  c.r2 = std::min(n - 1, c.r_star + static_cast<int>(std::floor(params.c_s * std::sqrt(n))));
  c.r_star_table.assign(static_cast<std::size_t>(params.m0) + 1, 0);
  for (int m = 2; m <= params.m0; ++m) c.r_star_table[m] = exact_cutoff(m).r_star;
  return c;
}

/// Latest static start time over the seven ensemble members.
inline int ensemble_common_start(const CutoffSet& c) {
  return std::max({c.r_star + 1,  // Exact
                   c.s_star,      // Odds
                   c.r_er + 1,    // ER
                   c.r0,          // AD
                   1,             // PR
                   c.r1 + 1,      // TP
                   c.s_star});    // DP
}

inline int ensemble_common_start(int n, const RuleParams& params) {
  return ensemble_common_start(make_cutoffs(n, params));
}

}  // namespace secretary
