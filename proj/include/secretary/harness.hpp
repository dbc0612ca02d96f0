#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <new>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "secretary/cutoffs.hpp"
#include "secretary/rules.hpp"
#include "secretary/seeding.hpp"
#include "secretary/seqgen.hpp"

namespace secretary {

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<SequenceModel> default_models() {
  return {Uniform01{}, StandardNormal{}, ExponentialUnitRate{}, AR1{0.5}};
}

struct ExperimentConfig {
  std::vector<int> n_list{50, 100, 200, 500, 1000};
  int reps = 10000;
  std::vector<SequenceModel> models = default_models();
  std::vector<RuleId> rules{kAllRules.begin(), kAllRules.end()};
  RuleParams params;
  std::uint64_t master_seed = 20240601;
  // Worker threads for replications; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw std::domain_error("reps must be >= 1");
  if (cfg.n_list.empty()) throw std::domain_error("n list is empty");
  for (int n : cfg.n_list) {
    if (n < 2) throw std::domain_error("every n must be >= 2, got " + std::to_string(n));
  }
  if (cfg.models.empty()) throw std::domain_error("no sequence models selected");
  if (cfg.rules.empty()) throw std::domain_error("no rules selected");
  for (const auto& m : cfg.models) validate(m);
  validate(cfg.params);
}

struct TrialOutcome {
  RuleId rule = RuleId::Exact;
  int tau = 0;
  int chosen_index = 0;
  bool success = false;
  bool forced = false;
  // Ensemble diagnostics; votes is -1 for other rules.
  int votes = -1;
  bool fallback = false;
};

struct RuleSummary {
  RuleId rule = RuleId::Exact;
  SequenceModel model;
  int n = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double success_se = 0.0;
  double avg_stop = 0.0;
  double stop_se = 0.0;
  double forced_fraction = 0.0;
  // Share of ensemble stops decided by the fallback (0 for other rules).
  double fallback_fraction = 0.0;
};

inline bool same_model(const SequenceModel& a, const SequenceModel& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<AR1>(&a)) return x->phi == std::get<AR1>(b).phi;
  return true;
}

/// Seed of replication b in cell (model, n); independent of execution order.
inline std::uint64_t replication_seed(std::uint64_t master, const SequenceModel& model, int n, int b) {
  std::uint64_t phi_bits = 0;
  if (const auto* ar = std::get_if<AR1>(&model)) phi_bits = std::bit_cast<std::uint64_t>(ar->phi);
  return derive_seed(master, {static_cast<std::uint64_t>(model.index()), phi_bits,
                              static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(b)});
}

inline std::uint64_t values_seed(std::uint64_t replication) { return derive_seed(replication, {0}); }
inline std::uint64_t rules_seed(std::uint64_t replication) { return derive_seed(replication, {1}); }

/// Per-rule sub-stream of a trial seed.
inline std::uint64_t rule_seed(std::uint64_t trial_seed, RuleId id) {
  return derive_seed(trial_seed, {static_cast<std::uint64_t>(catalog_index(id))});
}

/// Feeds the trial's record stream to `rule` until it accepts; a rule that
/// never accepts is forced to take the last candidate.
inline TrialOutcome run_rule(Rule& rule, const Trial& trial) {
  TrialOutcome out;
  out.rule = rule.id();
  const int n = trial.n();
  int tau = n;
  bool forced = true;
  for (int t = 1; t <= n; ++t) {
    if (rule.observe({t, trial.is_record(t)}) == Decision::Accept) {
      tau = t;
      forced = false;
      break;
    }
  }
  out.tau = tau;
  out.chosen_index = tau;
  out.forced = forced;
  out.success = tau == trial.argmax_index();
  if (const auto* ve = rule.as<EnsembleRule>()) {
    out.votes = ve->votes_at_stop();
    out.fallback = ve->used_fallback();
  }
  return out;
}

inline std::vector<TrialOutcome> run_trial(std::span<const RuleId> rules, const CutoffSet& cutoffs,
                                           const Trial& trial, const RuleParams& params,
                                           std::uint64_t trial_seed) {
  if (cutoffs.n != trial.n()) throw std::domain_error("run_trial: cutoffs and trial disagree on n");
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(rules.size());
  for (RuleId id : rules) {
    Rule rule(id, cutoffs, params, rule_seed(trial_seed, id));
    outcomes.push_back(run_rule(rule, trial));
  }
  return outcomes;
}

inline std::vector<TrialOutcome> run_trial(std::span<const RuleId> rules, const Trial& trial,
                                           const RuleParams& params, std::uint64_t trial_seed) {
  return run_trial(rules, make_cutoffs(trial.n(), params), trial, params, trial_seed);
}

// Per-replication outcomes for one rule, indexed by replication.
struct OutcomeColumn {
  std::vector<std::int32_t> tau;
  std::vector<std::uint8_t> success;
  std::vector<std::uint8_t> forced;
  std::vector<std::uint8_t> fallback;

  explicit OutcomeColumn(int reps)
      : tau(static_cast<std::size_t>(reps)),
        success(static_cast<std::size_t>(reps)),
        forced(static_cast<std::size_t>(reps)),
        fallback(static_cast<std::size_t>(reps)) {}
};

namespace detail {

inline RuleSummary summarize(const OutcomeColumn& col, RuleId rule, const SequenceModel& model, int n,
                             std::uint64_t seed) {
  const auto reps = static_cast<std::int64_t>(col.tau.size());
  std::int64_t wins = 0, forced = 0, fallbacks = 0, sum = 0, sum_sq = 0;
  for (std::size_t b = 0; b < col.tau.size(); ++b) {
    wins += col.success[b];
    forced += col.forced[b];
    fallbacks += col.fallback[b];
    sum += col.tau[b];
    sum_sq += static_cast<std::int64_t>(col.tau[b]) * col.tau[b];
  }
  RuleSummary s;
  s.rule = rule;
  s.model = model;
  s.n = n;
  s.reps = static_cast<int>(reps);
  s.seed = seed;
  const double B = static_cast<double>(reps);
  s.success_rate = static_cast<double>(wins) / B;
  s.success_se = std::sqrt(s.success_rate * (1.0 - s.success_rate) / B);
  s.avg_stop = static_cast<double>(sum) / B;
  if (reps > 1) {
    // Integer moments keep the reduction exact and order-free.
    const long double centered = static_cast<long double>(sum_sq) -
                                 static_cast<long double>(sum) * static_cast<long double>(sum) / reps;
    const double var = static_cast<double>(std::max(0.0L, centered / (reps - 1)));
    s.stop_se = std::sqrt(var / B);
  }
  s.forced_fraction = static_cast<double>(forced) / B;
  s.fallback_fraction = static_cast<double>(fallbacks) / B;
  return s;
}

template <class Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(1, count)));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (count + static_cast<int>(threads) - 1) / static_cast<int>(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        const int lo = static_cast<int>(w) * chunk;
        const int hi = std::min(count, lo + chunk);
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

// One (model, n) cell: per-replication outcomes plus their summaries.
struct CellRun {
  std::vector<RuleId> rules;
  std::vector<OutcomeColumn> columns;  // parallel to rules
  std::vector<RuleSummary> summaries;  // parallel to rules

  const OutcomeColumn& column(RuleId id) const {
    for (std::size_t k = 0; k < rules.size(); ++k) {
      if (rules[k] == id) return columns[k];
    }
    throw std::out_of_range("rule " + std::string(label(id)) + " not in cell");
  }
};

/// Runs one (model, n) cell with replications visited in `order` (a
/// permutation of 0..reps-1; empty means natural order). Results do not
/// depend on the order or on the thread count.
inline CellRun run_cell_outcomes(const ExperimentConfig& cfg, const SequenceModel& model, int n,
                                 std::span<const int> order = {}) {
  const CutoffSet cutoffs = make_cutoffs(n, cfg.params);
  std::vector<OutcomeColumn> columns(cfg.rules.size(), OutcomeColumn(cfg.reps));
  detail::parallel_for(cfg.reps, cfg.threads, [&](int i) {
    const int b = order.empty() ? i : order[static_cast<std::size_t>(i)];
    const std::uint64_t rep_seed = replication_seed(cfg.master_seed, model, n, b);
    const Trial trial = generate(model, n, values_seed(rep_seed));
    const auto outcomes = run_trial(cfg.rules, cutoffs, trial, cfg.params, rules_seed(rep_seed));
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      auto& col = columns[k];
      const auto idx = static_cast<std::size_t>(b);
      col.tau[idx] = outcomes[k].tau;
      col.success[idx] = outcomes[k].success;
      col.forced[idx] = outcomes[k].forced;
      col.fallback[idx] = outcomes[k].fallback;
    }
  });
  CellRun run{cfg.rules, std::move(columns), {}};
  for (std::size_t k = 0; k < cfg.rules.size(); ++k) {
    run.summaries.push_back(detail::summarize(run.columns[k], cfg.rules[k], model, n, cfg.master_seed));
  }
  return run;
}

inline std::vector<RuleSummary> run_cell(const ExperimentConfig& cfg, const SequenceModel& model, int n,
                                         std::span<const int> order = {}) {
  return run_cell_outcomes(cfg, model, n, order).summaries;
}

struct PairedDifference {
  double mean = 0.0;  // mean of tau_a - tau_b over replications
  double se = 0.0;    // standard error of that mean
  double z() const { return se > 0.0 ? mean / se : (mean == 0.0 ? 0.0 : std::copysign(HUGE_VAL, mean)); }
};

/// Stopping-time difference of two rules evaluated on the same trials.
inline PairedDifference paired_stop_difference(const CellRun& cell, RuleId a, RuleId b) {
  const auto& ta = cell.column(a).tau;
  const auto& tb = cell.column(b).tau;
  const auto reps = static_cast<std::int64_t>(ta.size());
  std::int64_t sum = 0, sum_sq = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const std::int64_t d = ta[i] - tb[i];
    sum += d;
    sum_sq += d * d;
  }
  PairedDifference out;
  out.mean = static_cast<double>(sum) / static_cast<double>(reps);
  if (reps > 1) {
    const long double centered = static_cast<long double>(sum_sq) -
                                 static_cast<long double>(sum) * static_cast<long double>(sum) / reps;
    out.se = std::sqrt(static_cast<double>(std::max(0.0L, centered / (reps - 1))) / static_cast<double>(reps));
  }
  return out;
}

/// Every (model, n, rule) summary, ordered by model, n, then rule as listed.
inline std::vector<RuleSummary> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<RuleSummary> all;
  try {
    for (const auto& model : cfg.models) {
      for (int n : cfg.n_list) {
        auto cell = run_cell(cfg, model, n);
        all.insert(all.end(), cell.begin(), cell.end());
      }
    }
  } catch (const std::bad_alloc&) {
    throw RunError("out of memory while running the experiment; no partial results kept");
  }
  return all;
}

/// Average ranks of `scores`, highest score = rank 1; ties share the mean rank.
inline std::vector<double> average_ranks(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> ranks(scores.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

struct RankRow {
  RuleId rule;
  std::vector<double> ranks;  // one per n, ascending n
  double rank_sum = 0.0;
};

struct RankTable {
  SequenceModel model;
  std::vector<int> n_values;
  std::vector<RankRow> rows;  // catalog order
};

/// Ranks rules by success rate at each n of `model` and sums ranks over n.
inline RankTable rank_table(std::span<const RuleSummary> summaries, const SequenceModel& model) {
  std::map<int, std::map<int, double>> rate;  // n -> catalog index -> success rate
  std::vector<int> rule_idx;
  for (const auto& s : summaries) {
    if (!same_model(s.model, model)) continue;
    rate[s.n][catalog_index(s.rule)] = s.success_rate;
    rule_idx.push_back(catalog_index(s.rule));
  }
  if (rate.empty()) throw ReportError("no summaries for model " + std::string(model_label(model)));
  std::sort(rule_idx.begin(), rule_idx.end());
  rule_idx.erase(std::unique(rule_idx.begin(), rule_idx.end()), rule_idx.end());

  RankTable table;
  table.model = model;
  for (int k : rule_idx) table.rows.push_back({static_cast<RuleId>(k), {}, 0.0});
  for (const auto& [n, by_rule] : rate) {
    table.n_values.push_back(n);
    std::vector<double> scores;
    for (int k : rule_idx) {
      auto it = by_rule.find(k);
      if (it == by_rule.end()) {
        throw ReportError("missing cell: rule " + std::string(label(static_cast<RuleId>(k))) + " at n=" +
                          std::to_string(n));
      }
      scores.push_back(it->second);
    }
    const auto ranks = average_ranks(scores);
    for (std::size_t r = 0; r < ranks.size(); ++r) {
      table.rows[r].ranks.push_back(ranks[r]);
      table.rows[r].rank_sum += ranks[r];
    }
  }
  return table;
}

}  // namespace secretary
