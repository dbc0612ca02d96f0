// Runs every rule on one generated trial and prints where each stops.
#include <cstdio>
#include <cstdlib>

#include "secretary/secretary.hpp"

int main(int argc, char** argv) {
  using namespace secretary;
  const int n = argc > 1 ? std::atoi(argv[1]) : 100;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;

  const RuleParams params;
  const Trial trial = generate(Uniform01{}, n, seed);
  std::printf("n=%d records=%d best at t=%d\n", n, trial.record_count(), trial.argmax_index());

  const auto outcomes = run_trial(kAllRules, trial, params, seed);
  for (const auto& o : outcomes) {
    std::printf("%-5s tau=%-4d %s%s\n", std::string(label(o.rule)).c_str(), o.tau, o.success ? "hit" : "miss",
                o.forced ? " (forced)" : "");
  }
}
