#pragma once

// Test-only oracles, deliberately independent of the library code paths.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/rational.hpp>

namespace bf {

using Q = boost::rational<std::int64_t>;

inline std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Calls fn(records, argmax) for every ordering of n distinct ranks.
// records[t-1] is the record indicator at position t; argmax is 1-based.
inline void for_each_ordering(int n, const std::function<void(const std::vector<bool>&, int)>& fn) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<bool> rec(static_cast<std::size_t>(n));
  do {
    int best = -1, arg = 0;
    for (int i = 0; i < n; ++i) {
      rec[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i)] > best;
      if (perm[static_cast<std::size_t>(i)] > best) {
        best = perm[static_cast<std::size_t>(i)];
        arg = i + 1;
      }
    }
    fn(rec, arg);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

// Rule that accepts the first record at a position >= start; forced at n.
struct StartRuleResult {
  Q success;
  Q expected_stop;
};

inline StartRuleResult first_record_from(int n, int start) {
  std::int64_t wins = 0, stops = 0;
  for_each_ordering(n, [&](const std::vector<bool>& rec, int arg) {
    int tau = n;
    for (int t = std::max(1, start); t <= n; ++t) {
      if (rec[static_cast<std::size_t>(t - 1)]) {
        tau = t;
        break;
      }
    }
    wins += tau == arg;
    stops += tau;
  });
  return {Q(wins, factorial(n)), Q(stops, factorial(n))};
}

// Best cutoff by exhaustive enumeration: skip r, take the first record.
inline std::pair<int, Q> best_cutoff(int n) {
  int best_r = 1;
  Q best(-1);
  for (int r = 1; r <= n - 1; ++r) {
    const Q p = first_record_from(n, r + 1).success;
    if (p > best) {
      best = p;
      best_r = r;
    }
  }
  return {best_r, best};
}

inline long double harmonic_reverse(int n) {
  long double h = 0.0L;
  for (int k = n; k >= 1; --k) h += 1.0L / k;
  return h;
}

}  // namespace bf
