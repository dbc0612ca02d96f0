#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secretary/harness.hpp"
#include "secretary/report.hpp"

namespace secretary::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kReportError = 3,
  kAuditFailure = 4,
  kIoError = 5,
  kRunError = 6,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Table };

struct CliOptions {
  ExperimentConfig config;
  std::string out;  // empty: stdout
  Format format = Format::Csv;
  bool audit = false;
  int n_max = 0;
  int audit_reps = 100000;
  bool help = false;
  std::string help_text;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    T value{};
    if constexpr (std::is_same_v<T, double>) {
      value = std::stod(text, &used);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
      value = std::stoull(text, &used);
    } else {
      value = static_cast<T>(std::stoll(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw UsageError("invalid numeric value for " + key + ": '" + text + "'");
  }
}

// Raw settings before validation; later sources overwrite earlier ones.
struct Settings {
  std::optional<std::vector<int>> n_list;
  std::optional<int> reps;
  std::optional<std::vector<std::string>> dists;
  std::optional<double> phi;
  std::optional<std::vector<std::string>> rules;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma, cap, eta, p, cs, q0, q1;
  std::optional<int> m0;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> threads;

  void set(const std::string& key, const std::string& value) {
    if (key == "n") {
      std::vector<int> ns;
      for (const auto& s : split_list(value)) ns.push_back(parse_number<int>(key, s));
      n_list = ns;
    } else if (key == "reps") {
      reps = parse_number<int>(key, value);
    } else if (key == "dist") {
      dists = split_list(value);
    } else if (key == "phi") {
      phi = parse_number<double>(key, value);
    } else if (key == "rules") {
      rules = split_list(value);
    } else if (key == "seed") {
      seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "gamma") {
      gamma = parse_number<double>(key, value);
    } else if (key == "cap") {
      cap = parse_number<double>(key, value);
    } else if (key == "eta") {
      eta = parse_number<double>(key, value);
    } else if (key == "p") {
      p = parse_number<double>(key, value);
    } else if (key == "cs") {
      cs = parse_number<double>(key, value);
    } else if (key == "q0") {
      q0 = parse_number<double>(key, value);
    } else if (key == "q1") {
      q1 = parse_number<double>(key, value);
    } else if (key == "m0") {
      m0 = parse_number<int>(key, value);
    } else if (key == "out") {
      out = value;
    } else if (key == "format") {
      format = value;
    } else if (key == "threads") {
      threads = parse_number<unsigned>(key, value);
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline void load_config_file(const std::string& path, Settings& settings) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    settings.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline ExperimentConfig build_config(const Settings& s) {
  ExperimentConfig cfg;
  if (s.n_list) cfg.n_list = *s.n_list;
  if (s.reps) cfg.reps = *s.reps;
  if (s.seed) cfg.master_seed = *s.seed;
  if (s.threads) cfg.threads = *s.threads;
  const double phi = s.phi.value_or(0.5);
  if (!(phi > -1.0 && phi < 1.0)) throw UsageError("phi must lie in (-1, 1)");
  try {
    cfg.models.clear();
    if (s.dists) {
      for (const auto& d : *s.dists) cfg.models.push_back(parse_model(d, phi));
    } else {
      cfg.models = {Uniform01{}, StandardNormal{}, ExponentialUnitRate{}, AR1{phi}};
    }
    if (s.rules) {
      cfg.rules.clear();
      for (const auto& r : *s.rules) cfg.rules.push_back(parse_rule(r));
    }
    auto& p = cfg.params;
    if (s.gamma) p.gamma = *s.gamma;
    if (s.cap) p.cap = *s.cap;
    if (s.eta) p.eta = *s.eta;
    if (s.p) p.p_exp = *s.p;
    if (s.cs) p.c_s = *s.cs;
    if (s.q0) p.q0 = *s.q0;
    if (s.q1) p.q1 = *s.q1;
    if (s.m0) p.m0 = *s.m0;
    validate(cfg);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

}  // namespace detail

/// Command line -> options. Precedence: flags, then --config file, then
/// the built-in defaults (which reproduce the reference experiment grid).
inline CliOptions parse_config(int argc, const char* const* argv) {
  CLI::App app{"Rank-based stopping rules for the best-choice secretary problem"};
  app.set_help_all_flag("--help-all");

  std::map<std::string, std::string> flag_values;
  std::vector<std::string> dist_flags;
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "flat key=value settings file");

  auto add = [&](const std::string& name, const std::string& help) {
    app.add_option_function<std::string>(
           "--" + name, [&flag_values, name](const std::string& v) { flag_values[name] = v; }, help)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  add("n", "comma-separated horizons");
  add("reps", "replications per cell");
  app.add_option("--dist", dist_flags, "uniform|normal|exponential|ar1 (repeatable or comma list)")
      ->delimiter(',');
  add("phi", "AR(1) coefficient, |phi| < 1");
  add("rules", "comma-separated rules: exact,odds,er,ad,pr,tp,dp,ve");
  add("seed", "master seed");
  add("gamma", "adaptive adjustment strength");
  add("cap", "adaptive damping cap");
  add("eta", "early-accept ceiling");
  add("p", "early-accept curvature");
  add("cs", "two-phase expansion factor");
  add("q0", "two-phase base acceptance");
  add("q1", "two-phase top acceptance");
  add("m0", "rolling-DP horizon");
  add("out", "output path (default stdout)");
  add("format", "csv|table");
  add("threads", "worker threads (0 = all cores)");

  auto* audit = app.add_subcommand("audit", "compare the exact oracle with Monte Carlo for small n");
  int n_max = 0;
  std::optional<std::string> audit_rules;
  std::optional<int> audit_reps;
  std::optional<std::uint64_t> audit_seed;
  audit->add_option("--n-max", n_max, "largest horizon, 2..10")->required();
  audit->add_option("--rules", audit_rules, "comma-separated rules (default all)");
  audit->add_option("--reps", audit_reps, "Monte Carlo replications per n (default 100000)");
  audit->add_option("--seed", audit_seed, "master seed");

  CliOptions opts;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    opts.help = true;
    opts.help_text = app.help();
    return opts;
  } catch (const CLI::CallForAllHelp&) {
    opts.help = true;
    opts.help_text = app.help("", CLI::AppFormatMode::All);
    return opts;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  detail::Settings settings;
  if (config_path) detail::load_config_file(*config_path, settings);
  for (const auto& [k, v] : flag_values) settings.set(k, v);
  if (!dist_flags.empty()) settings.dists = dist_flags;
  if (audit->parsed()) {
    if (audit_rules) settings.rules = detail::split_list(*audit_rules);
    if (audit_seed) settings.seed = *audit_seed;
  }

  opts.config = detail::build_config(settings);
  opts.out = settings.out.value_or("");
  const std::string fmt = settings.format.value_or("csv");
  if (fmt == "csv") {
    opts.format = Format::Csv;
  } else if (fmt == "table") {
    opts.format = Format::Table;
  } else {
    throw UsageError("format must be csv or table");
  }
  if (audit->parsed()) {
    opts.audit = true;
    opts.n_max = n_max;
    if (n_max < 2 || n_max > kOracleMaxN) throw UsageError("--n-max must lie in [2, 10]");
    if (audit_rules && opts.config.rules.empty()) throw UsageError("empty rule list");
    if (audit_reps) opts.audit_reps = *audit_reps;
    if (opts.audit_reps < 1) throw UsageError("--reps must be >= 1");
  }
  return opts;
}

/// Runs the parsed command, writing results to `out` (or the --out file)
/// and diagnostics to `err`. Returns the process exit status.
inline int run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.help) {
    out << opts.help_text;
    return kOk;
  }
  std::ofstream file;
  std::ostream* sink = &out;
  if (!opts.out.empty()) {
    file.open(opts.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open '" << opts.out << "' for writing\n";
      return kIoError;
    }
    sink = &file;
  }
  try {
    if (opts.audit) {
      const auto res = oracle_audit(opts.n_max, opts.config.rules, opts.audit_reps, opts.config.master_seed,
                                    opts.config.params);
      *sink << res.text;
      sink->flush();
      if (!*sink) return kIoError;
      return res.passed ? kOk : kAuditFailure;
    }
    const auto summaries = run_experiment(opts.config);
    if (opts.format == Format::Csv) {
      emit_csv(*sink, summaries);
    } else {
      for (const auto& model : opts.config.models) {
        *sink << emit_table(summaries, Metric::Success, model) << '\n';
        *sink << emit_table(summaries, Metric::StopTime, model) << '\n';
      }
      const auto& rules = opts.config.rules;
      if (std::find(rules.begin(), rules.end(), RuleId::Ensemble) != rules.end()) {
        for (const auto& s : summaries) {
          if (s.rule == RuleId::Ensemble && s.fallback_fraction > 0.0) {
            *sink << "VE fallback " << model_label(s.model) << " n=" << s.n << ": "
                  << format_percent(s.fallback_fraction) << "%\n";
          }
        }
      }
    }
    sink->flush();
    if (!*sink) {
      err << "error: write failed\n";
      return kIoError;
    }
  } catch (const ReportError& e) {
    err << "report error: " << e.what() << '\n';
    return kReportError;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const RunError& e) {
    err << "run error: " << e.what() << '\n';
    return kRunError;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }
  return kOk;
}

}  // namespace secretary::cli
