#pragma once

#include <stdexcept>
#include <string>

namespace secretary {

// Tunable constants of the heuristic rules. Defaults are the values used in
// the reference experiments.
struct RuleParams {
  double gamma = 5.0;   // adaptive adjustment strength
  double cap = 3.0;     // adaptive damping cap, scales sqrt(log t)
  double eta = 0.05;    // early-accept ceiling
  double p_exp = 2.0;   // early-accept curvature
  double c_s = 0.4;     // two-phase expansion factor
  double q0 = 0.02;     // two-phase base acceptance
  double q1 = 0.30;     // two-phase top acceptance
  int m0 = 12;          // rolling-DP local horizon
  int k_rules = 7;      // ensemble size
};

// Throws std::domain_error naming the first violated constraint.
inline void validate(const RuleParams& p) {
  auto fail = [](const std::string& what) { throw std::domain_error("RuleParams: " + what); };
  if (!(p.gamma > 0.0)) fail("gamma must be > 0");
  if (!(p.cap > 0.0)) fail("cap must be > 0");
  // eta = 0 is accepted: it collapses the early-accept rule to a plain cutoff.
  if (!(p.eta >= 0.0 && p.eta < 1.0)) fail("eta must lie in [0, 1)");
  if (!(p.p_exp > 0.0)) fail("p must be > 0");
  if (!(p.c_s > 0.0)) fail("c_s must be > 0");
  if (!(p.q0 >= 0.0 && p.q0 <= p.q1 && p.q1 <= 1.0)) fail("need 0 <= q0 <= q1 <= 1");
  if (p.m0 < 1) fail("m0 must be >= 1");
  if (p.k_rules != 7) fail("the ensemble is fixed at 7 sub-rules");
}

}  // namespace secretary
