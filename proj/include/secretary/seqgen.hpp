#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "secretary/rules.hpp"

namespace secretary {

struct Uniform01 {};
struct StandardNormal {};
struct ExponentialUnitRate {};
struct AR1 {
  double phi = 0.5;
};

using SequenceModel = std::variant<Uniform01, StandardNormal, ExponentialUnitRate, AR1>;

inline void validate(const SequenceModel& model) {
  if (const auto* ar = std::get_if<AR1>(&model)) {
    if (!(ar->phi > -1.0 && ar->phi < 1.0)) {
      throw std::domain_error("AR(1) requires |phi| < 1, got phi=" + std::to_string(ar->phi));
    }
  }
}

inline std::string_view model_label(const SequenceModel& model) {
  constexpr std::string_view names[] = {"uniform", "normal", "exponential", "ar1"};
  return names[model.index()];
}

inline SequenceModel parse_model(std::string_view text, double phi = 0.5) {
  if (text == "uniform") return Uniform01{};
  if (text == "normal") return StandardNormal{};
  if (text == "exponential") return ExponentialUnitRate{};
  if (text == "ar1") {
    SequenceModel m = AR1{phi};
    validate(m);
    return m;
  }
  throw std::domain_error("unknown distribution '" + std::string(text) + "'");
}

// Candidate values with their record indicators. Positions are 1-based in
// the public API; records[t-1] is the indicator at position t.
class Trial {
 public:
  /// Builds a trial from explicit values. Records use strict '>'; the
  /// argmax is the earliest maximal position.
  static Trial from_values(std::vector<double> values) {
    if (values.empty()) throw std::domain_error("trial needs at least one value");
    Trial tr;
    tr.records_.resize(values.size());
    double best = values[0];
    tr.records_[0] = true;
    tr.argmax_ = 1;
    for (std::size_t i = 1; i < values.size(); ++i) {
      tr.records_[i] = values[i] > best;
      if (tr.records_[i]) {
        best = values[i];
        tr.argmax_ = static_cast<int>(i) + 1;
      }
    }
    tr.values_ = std::move(values);
    return tr;
  }

  int n() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<bool>& records() const noexcept { return records_; }
  bool is_record(int t) const { return records_.at(static_cast<std::size_t>(t - 1)); }
  int argmax_index() const noexcept { return argmax_; }
  int record_count() const {
    int c = 0;
    for (bool r : records_) c += r ? 1 : 0;
    return c;
  }

 private:
  Trial() = default;
  std::vector<double> values_;
  std::vector<bool> records_;
  int argmax_ = 0;
};

/// Draws n values from `model`; fully determined by (model, n, seed).
/// AR(1) starts from its stationary law N(0, 1/(1-phi^2)).
inline Trial generate(const SequenceModel& model, int n, std::uint64_t seed) {
  if (n < 2) throw std::domain_error("generate: n must be >= 2");
  validate(model);
  std::mt19937_64 engine(seed);
  std::vector<double> values(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Uniform01>) {
          std::uniform_real_distribution<double> d(0.0, 1.0);
          for (auto& v : values) v = d(engine);
        } else if constexpr (std::is_same_v<M, StandardNormal>) {
          std::normal_distribution<double> d(0.0, 1.0);
          for (auto& v : values) v = d(engine);
        } else if constexpr (std::is_same_v<M, ExponentialUnitRate>) {
          std::exponential_distribution<double> d(1.0);
          for (auto& v : values) v = d(engine);
        } else {
          std::normal_distribution<double> noise(0.0, 1.0);
          values[0] = noise(engine) / std::sqrt(1.0 - m.phi * m.phi);
          for (std::size_t i = 1; i < values.size(); ++i) values[i] = m.phi * values[i - 1] + noise(engine);
        }
      },
      model);
  return Trial::from_values(std::move(values));
}

/// The rank-only view of a trial, in arrival order.
inline std::vector<Observation> to_observations(const Trial& trial) {
  std::vector<Observation> obs;
  obs.reserve(static_cast<std::size_t>(trial.n()));
  for (int t = 1; t <= trial.n(); ++t) obs.push_back({t, trial.is_record(t)});
  return obs;
}

}  // namespace secretary
