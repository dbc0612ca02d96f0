#include <gtest/gtest.h>

#include <cmath>

#include "brute_force.hpp"
#include "secretary/cutoffs.hpp"

using namespace secretary;

TEST(Harmonic, SmallValues) {
  EXPECT_DOUBLE_EQ(harmonic(1), 1.0);
  EXPECT_NEAR(harmonic(4), 25.0 / 12.0, 1e-15);
}

TEST(Harmonic, MatchesReverseSummation) {
  // Frozen from the reverse-order long double oracle.
  EXPECT_NEAR(harmonic(100), 5.187377517639621, 1e-12);
  for (int n : {2, 17, 333, 5000}) EXPECT_NEAR(harmonic(n), static_cast<double>(bf::harmonic_reverse(n)), 1e-12);
}

TEST(Harmonic, RejectsZero) { EXPECT_THROW(harmonic(0), std::domain_error); }

TEST(ExactCutoff, MatchesPermutationBruteForce) {
  for (int n = 2; n <= 8; ++n) {
    const auto [r, p] = bf::best_cutoff(n);
    const auto got = exact_cutoff(n);
    EXPECT_EQ(got.r_star, r) << "n=" << n;
    EXPECT_NEAR(got.p_star, boost::rational_cast<double>(p), 1e-14) << "n=" << n;
  }
  EXPECT_EQ(exact_cutoff(3).r_star, 1);
  EXPECT_DOUBLE_EQ(exact_cutoff(3).p_star, 0.5);
  EXPECT_EQ(exact_cutoff(4).r_star, 1);
  EXPECT_NEAR(exact_cutoff(4).p_star, 11.0 / 24.0, 1e-15);
}

TEST(ExactCutoff, ApproachesOneOverE) {
  const auto c = exact_cutoff(20000);
  EXPECT_NEAR(static_cast<double>(c.r_star) / 20000, 0.3679, 5e-4);
}

TEST(ExactCutoff, ReferenceGridValues) {
  // argmax of the closed form, computed independently with exact fractions.
  EXPECT_EQ(exact_cutoff(50).r_star, 18);
  EXPECT_EQ(exact_cutoff(100).r_star, 37);
  EXPECT_EQ(exact_cutoff(200).r_star, 73);
  EXPECT_EQ(exact_cutoff(500).r_star, 184);
  EXPECT_EQ(exact_cutoff(1000).r_star, 368);
  EXPECT_NEAR(exact_cutoff(100).p_star, 0.371042778712643, 1e-12);
}

TEST(ExactCutoff, TieBreaksToSmallestR) {
  // n = 2 has a single candidate cutoff; the smallest r wins any tie.
  EXPECT_EQ(exact_cutoff(2).r_star, 1);
  EXPECT_DOUBLE_EQ(exact_cutoff(2).p_star, 0.5);
}

TEST(ExactCutoff, RejectsTinyHorizon) {
  EXPECT_THROW(exact_cutoff(1), std::domain_error);
  EXPECT_THROW(exact_cutoff(0), std::domain_error);
}

TEST(ExactCutoff, MonotoneAndNearOneOverE) {
  int prev = 0;
  for (int n = 2; n <= 200; ++n) {
    const int r = exact_cutoff(n).r_star;
    EXPECT_GE(r, prev) << "n=" << n;
    prev = r;
    if (n >= 10) {
      const double ratio = static_cast<double>(r) / n;
      EXPECT_GE(ratio, 0.30);
      EXPECT_LE(ratio, 0.45);
    }
  }
}

TEST(ExactCutoff, LocallyOptimal) {
  for (int n = 3; n <= 1000; ++n) {
    const auto c = exact_cutoff(n);
    EXPECT_DOUBLE_EQ(c.p_star, analytic_success(n, c.r_star));
    if (c.r_star > 1) {
      EXPECT_GE(c.p_star, analytic_success(n, c.r_star - 1)) << n;
    }
    if (c.r_star < n - 1) {
      EXPECT_GE(c.p_star, analytic_success(n, c.r_star + 1)) << n;
    }
  }
}

TEST(AnalyticSuccess, Examples) {
  EXPECT_NEAR(analytic_success(4, 1), 11.0 / 24.0, 1e-15);
  EXPECT_NEAR(analytic_success(3, 1), 0.5, 1e-15);
  for (int n : {2, 5, 40}) EXPECT_NEAR(analytic_success(n, n - 1), 1.0 / n, 1e-15);
  EXPECT_THROW(analytic_success(5, 0), std::domain_error);
  EXPECT_THROW(analytic_success(5, 5), std::domain_error);
}

namespace {
// Largest s with tail odds-sum >= 1, full recomputation per s.
int odds_oracle(int n) {
  int best = 2;
  for (int s = 2; s <= n; ++s) {
    long double sum = 0;
    for (int i = s; i <= n; ++i) sum += 1.0L / (i - 1);
    if (sum >= 1.0L) best = s;
  }
  return best;
}

int er_oracle(int n) {
  for (int r = 0; r < n; ++r) {
    if (bf::harmonic_reverse(n) - (r == 0 ? 0.0L : bf::harmonic_reverse(r)) <= 1.0L) return r;
  }
  return n - 1;
}
}  // namespace

TEST(OddsCutoff, Examples) {
  EXPECT_EQ(odds_cutoff(2), 2);
  EXPECT_EQ(odds_cutoff(4), 2);
  EXPECT_LE(std::abs(odds_cutoff(100) - (static_cast<int>(100 / std::exp(1.0)) + 1)), 2);
  EXPECT_EQ(odds_cutoff(100), 38);
  EXPECT_THROW(odds_cutoff(1), std::domain_error);
}

TEST(OddsCutoff, AgreesWithOracleAndExactRule) {
  for (int n = 2; n <= 600; ++n) {
    EXPECT_EQ(odds_cutoff(n), odds_oracle(n)) << n;
    // For the classical record process the odds theorem recovers the optimal rule.
    EXPECT_EQ(odds_cutoff(n), exact_cutoff(n).r_star + 1) << n;
  }
}

TEST(ErCutoff, Examples) {
  EXPECT_EQ(er_cutoff(2), 1);
  EXPECT_EQ(er_cutoff(10), 4);
  // H_100 - H_36 = 1.0128 > 1 and H_100 - H_37 = 0.9858, so the first
  // cutoff at or below one expected record is 37.
  EXPECT_EQ(er_cutoff(100), 37);
  EXPECT_THROW(er_cutoff(1), std::domain_error);
}

TEST(ErCutoff, AgreesWithOracle) {
  for (int n = 2; n <= 600; ++n) EXPECT_EQ(er_cutoff(n), er_oracle(n)) << n;
}

TEST(TwoPhaseProbability, Boundaries) {
  const RuleParams p;
  const int r1 = 33, r2 = 41;
  EXPECT_EQ(two_phase_accept_prob(r1, r1, r2, p), 0.0);
  EXPECT_EQ(two_phase_accept_prob(1, r1, r2, p), 0.0);
  EXPECT_NEAR(two_phase_accept_prob(r2, r1, r2, p), 0.30, 1e-15);
  EXPECT_EQ(two_phase_accept_prob(r2 + 1, r1, r2, p), 1.0);
  EXPECT_NEAR(two_phase_accept_prob(r1 + 1, r1, r2, p), 0.02 + 0.28 / 8, 1e-15);
  // Degenerate span uses max(1, r2 - r1).
  EXPECT_NEAR(two_phase_accept_prob(5, 4, 4, p), 1.0, 0.0);
  EXPECT_NEAR(two_phase_accept_prob(5, 4, 5, p), 0.30, 1e-15);
}

TEST(EarlyAcceptProbability, Examples) {
  const RuleParams p;
  EXPECT_NEAR(early_accept_prob(18, 36, p), 0.0125, 1e-15);
  EXPECT_EQ(early_accept_prob(36, 36, p), 1.0);
  EXPECT_EQ(early_accept_prob(90, 36, p), 1.0);
}

TEST(CutoffSet, Invariants) {
  const RuleParams p;
  for (int n = 3; n <= 500; ++n) {
    const auto c = make_cutoffs(n, p);
    EXPECT_LE(c.r1, c.r_star);
    EXPECT_LE(c.r_star, c.r2);
    EXPECT_LE(c.r2, n - 1);
    EXPECT_EQ(c.r0, static_cast<int>(std::floor(n / std::exp(1.0))));
    EXPECT_DOUBLE_EQ(c.p_star, analytic_success(n, c.r_star));
  }
  const auto c = make_cutoffs(100, p);
  ASSERT_EQ(c.r_star_table.size(), 13u);
  EXPECT_EQ(c.r_star_table[1], 0);
  for (int m = 2; m <= 12; ++m) EXPECT_EQ(c.r_star_table[m], exact_cutoff(m).r_star);
  EXPECT_EQ(c.r0, 36);
  EXPECT_EQ(c.r1, 33);  // floor(0.9 * 37)
  EXPECT_EQ(c.r2, 41);  // min(99, 37 + floor(0.4 * 10))
}

TEST(CommonStart, Examples) {
  const RuleParams p;
  EXPECT_EQ(ensemble_common_start(2, p), 2);
  const auto c = make_cutoffs(100, p);
  EXPECT_EQ(ensemble_common_start(100, p),
            std::max({c.r_star + 1, c.s_star, c.r_er + 1, 36, 1, c.r1 + 1, c.s_star}));
  EXPECT_EQ(ensemble_common_start(100, p), 38);
  for (int n = 3; n <= 300; ++n) EXPECT_LE(ensemble_common_start(n, p), n - 1) << n;
}

TEST(RuleParams, Validation) {
  RuleParams p;
  EXPECT_NO_THROW(validate(p));
  p.q0 = 0.5;
  p.q1 = 0.4;
  EXPECT_THROW(validate(p), std::domain_error);
  p = {};
  p.eta = 1.0;
  EXPECT_THROW(validate(p), std::domain_error);
  p = {};
  p.m0 = 0;
  EXPECT_THROW(validate(p), std::domain_error);
  p = {};
  p.gamma = 0;
  EXPECT_THROW(validate(p), std::domain_error);
}
