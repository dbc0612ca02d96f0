#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secretary/harness.hpp"
#include "secretary/oracle.hpp"

namespace secretary {

inline constexpr const char* kCsvHeader =
    "model,n,rule,success_rate,success_se,avg_stop,stop_se,forced_fraction,reps,seed";

namespace detail {

inline std::string printf_string(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline bool summary_less(const RuleSummary& a, const RuleSummary& b) {
  if (a.model.index() != b.model.index()) return a.model.index() < b.model.index();
  if (a.n != b.n) return a.n < b.n;
  return catalog_index(a.rule) < catalog_index(b.rule);
}

}  // namespace detail

/// Two decimals, rounding half away from zero.
inline std::string fixed2(double x) {
  const double r = std::round(x * 100.0) / 100.0;
  return detail::printf_string("%.2f", r == 0.0 ? 0.0 : r);
}

/// A rate in [0, 1] as a percentage with two decimals.
inline std::string format_percent(double rate) { return fixed2(rate * 100.0); }

inline std::vector<RuleSummary> sorted_summaries(std::vector<RuleSummary> summaries) {
  std::stable_sort(summaries.begin(), summaries.end(), detail::summary_less);
  return summaries;
}

inline void emit_csv(std::ostream& os, std::vector<RuleSummary> summaries) {
  if (summaries.empty()) throw ReportError("emit_csv: nothing to write");
  summaries = sorted_summaries(std::move(summaries));
  os << kCsvHeader << '\n';
  for (const auto& s : summaries) {
    os << model_label(s.model) << ',' << s.n << ',' << label(s.rule) << ','
       << detail::printf_string("%.6f", s.success_rate) << ',' << detail::printf_string("%.6f", s.success_se) << ','
       << detail::printf_string("%.4f", s.avg_stop) << ',' << detail::printf_string("%.4f", s.stop_se) << ','
       << detail::printf_string("%.6f", s.forced_fraction) << ',' << s.reps << ',' << s.seed << '\n';
  }
  if (!os) throw std::ios_base::failure("emit_csv: write failed");
}

inline std::string emit_csv(std::vector<RuleSummary> summaries) {
  std::ostringstream os;
  emit_csv(os, std::move(summaries));
  return os.str();
}

/// Inverse of emit_csv, to the emitted precision. AR(1) rows get `phi`.
inline std::vector<RuleSummary> parse_csv(const std::string& text, double phi = 0.5) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw ReportError("parse_csv: bad header");
  std::vector<RuleSummary> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw ReportError("parse_csv: expected 10 fields in '" + line + "'");
    RuleSummary s;
    s.model = parse_model(f[0], phi);
    s.n = std::stoi(f[1]);
    s.rule = parse_rule(f[2]);
    s.success_rate = std::stod(f[3]);
    s.success_se = std::stod(f[4]);
    s.avg_stop = std::stod(f[5]);
    s.stop_se = std::stod(f[6]);
    s.forced_fraction = std::stod(f[7]);
    s.reps = std::stoi(f[8]);
    s.seed = std::stoull(f[9]);
    out.push_back(s);
  }
  return out;
}

enum class Metric { Success, StopTime };

inline std::string model_title(const SequenceModel& model) {
  switch (model.index()) {
    case 0: return "Uniform(0,1)";
    case 1: return "Normal(0,1)";
    case 2: return "Exponential(1)";
    default: return "AR(1), phi=" + detail::printf_string("%g", std::get<AR1>(model).phi);
  }
}

namespace detail {

inline std::string bold(const std::string& s) { return "**" + s + "**"; }
inline std::string bold_underline(const std::string& s) { return "**<u>" + s + "</u>**"; }

// Top one gets bold+underline, the rest of the top three bold.
inline std::string mark_top(const std::string& cell, double rank) {
  if (rank <= 1.0) return bold_underline(cell);
  if (rank <= 3.0) return bold(cell);
  return cell;
}

}  // namespace detail

/// Markdown table in the reference layout: rules in catalog order, n
/// ascending. Success tables add the rank-sum column and mark the top
/// three per column; stopping-time tables mark each column's min and max.
inline std::string emit_table(std::span<const RuleSummary> summaries, Metric metric, const SequenceModel& model) {
  const RankTable ranks = rank_table(summaries, model);  // also rejects incomplete grids
  std::vector<const RuleSummary*> cell;
  auto find = [&](RuleId rule, int n) -> const RuleSummary& {
    for (const auto& s : summaries) {
      if (s.rule == rule && s.n == n && same_model(s.model, model)) return s;
    }
    throw ReportError("missing cell");
  };

  std::ostringstream os;
  os << (metric == Metric::Success ? "Success Rate by Rule (%) in " : "Average Stopping Time in ")
     << model_title(model) << "\n\n";
  os << "| Rule |";
  for (std::size_t j = 0; j < ranks.n_values.size(); ++j) {
    os << ' ' << (j == 0 ? "n=" : "") << ranks.n_values[j] << " |";
  }
  if (metric == Metric::Success) os << " Sum(rank) |";
  os << "\n|---|";
  for (std::size_t j = 0; j < ranks.n_values.size(); ++j) os << "---:|";
  if (metric == Metric::Success) os << "---:|";
  os << '\n';

  // Rank of each rank sum, smallest first.
  std::vector<double> neg_sums;
  for (const auto& row : ranks.rows) neg_sums.push_back(-row.rank_sum);
  const auto sum_ranks = average_ranks(neg_sums);

  // Column extremes for the stopping-time table.
  std::vector<double> col_min(ranks.n_values.size(), 1e300), col_max(ranks.n_values.size(), -1e300);
  for (const auto& row : ranks.rows) {
    for (std::size_t j = 0; j < ranks.n_values.size(); ++j) {
      const double v = find(row.rule, ranks.n_values[j]).avg_stop;
      col_min[j] = std::min(col_min[j], v);
      col_max[j] = std::max(col_max[j], v);
    }
  }

  for (std::size_t i = 0; i < ranks.rows.size(); ++i) {
    const auto& row = ranks.rows[i];
    os << "| " << catalog_index(row.rule) + 1 << ") " << label(row.rule) << " |";
    for (std::size_t j = 0; j < ranks.n_values.size(); ++j) {
      const auto& s = find(row.rule, ranks.n_values[j]);
      std::string text;
      if (metric == Metric::Success) {
        text = detail::mark_top(format_percent(s.success_rate), row.ranks[j]);
      } else {
        text = fixed2(s.avg_stop);
        if (ranks.rows.size() > 1 && (s.avg_stop == col_min[j] || s.avg_stop == col_max[j])) text = detail::bold(text);
      }
      os << ' ' << text << " |";
    }
    if (metric == Metric::Success) {
      os << ' ' << detail::mark_top(detail::printf_string("%g", row.rank_sum), sum_ranks[i]) << " |";
    }
    os << '\n';
  }
  return os.str();
}

struct AuditResult {
  std::string text;
  bool passed = true;
  double max_abs_z = 0.0;
};

inline constexpr double kAuditZLimit = 4.0;

/// Exact oracle vs Monte Carlo on Uniform(0,1) for every n in [2, n_max].
inline AuditResult oracle_audit(int n_max, const std::vector<RuleId>& rules, int reps, std::uint64_t seed,
                                const RuleParams& params = {}) {
  if (n_max < 2 || n_max > kOracleMaxN) {
    throw std::domain_error("audit: n-max must lie in [2, " + std::to_string(kOracleMaxN) + "]");
  }
  if (rules.empty()) throw std::domain_error("audit: empty rule list");
  if (reps < 1) throw std::domain_error("audit: reps must be >= 1");

  ExperimentConfig cfg;
  cfg.reps = reps;
  cfg.rules = rules;
  cfg.params = params;
  cfg.master_seed = seed;
  cfg.models = {Uniform01{}};

  AuditResult res;
  std::ostringstream os;
  os << "n,rule,exact,exact_value,monte_carlo,z\n";
  for (int n = 2; n <= n_max; ++n) {
    const auto mc = run_cell(cfg, Uniform01{}, n);
    for (std::size_t k = 0; k < rules.size(); ++k) {
      const auto ex = enumerate_success(rules[k], n, params);
      const double p = static_cast<double>(ex.success_probability);
      const double se = std::sqrt(p * (1.0 - p) / reps);
      const double diff = mc[k].success_rate - p;
      double z = 0.0;
      if (se > 0.0) {
        z = diff / se;
      } else if (std::abs(diff) > 1e-12) {
        z = HUGE_VAL;
      }
      res.max_abs_z = std::max(res.max_abs_z, std::abs(z));
      if (std::abs(z) > kAuditZLimit) res.passed = false;
      std::ostringstream exact_text;
      if (ex.exact) {
        exact_text << ex.success_exact.numerator() << '/' << ex.success_exact.denominator();
      } else {
        exact_text << "~";
      }
      os << n << ',' << label(rules[k]) << ',' << exact_text.str() << ','
         << detail::printf_string("%.6f", p) << ',' << detail::printf_string("%.6f", mc[k].success_rate) << ','
         << detail::printf_string("%.3f", z) << '\n';
    }
  }
  os << (res.passed ? "PASS" : "FAIL") << " max|z|=" << detail::printf_string("%.3f", res.max_abs_z) << " limit "
     << kAuditZLimit << '\n';
  res.text = os.str();
  return res;
}

}  // namespace secretary
