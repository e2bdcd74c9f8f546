#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locus/error.hpp"

namespace locus {

enum class Direction { Maximize, Minimize };

enum class PreferenceKind { Usual, UShape, VShape, Level, LinearWithIndifference, Gaussian };

inline std::string_view to_string(Direction d) { return d == Direction::Maximize ? "max" : "min"; }

inline std::string_view to_string(PreferenceKind k) {
  switch (k) {
    case PreferenceKind::Usual: return "usual";
    case PreferenceKind::UShape: return "ushape";
    case PreferenceKind::VShape: return "vshape";
    case PreferenceKind::Level: return "level";
    case PreferenceKind::LinearWithIndifference: return "linear";
    case PreferenceKind::Gaussian: return "gaussian";
  }
  return "usual";
}

// Accepts the canonical names above plus a few spellings seen in configs.
inline std::optional<PreferenceKind> parse_preference_kind(std::string_view s) {
  std::string t(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) {
    return c == '-' || c == '_' ? ' ' : static_cast<char>(std::tolower(c));
  });
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  if (t == "usual" || t == "true") return PreferenceKind::Usual;
  if (t == "ushape" || t == "quasi") return PreferenceKind::UShape;
  if (t == "vshape") return PreferenceKind::VShape;
  if (t == "level") return PreferenceKind::Level;
  if (t == "linear" || t == "linearwithindifference") return PreferenceKind::LinearWithIndifference;
  if (t == "gaussian") return PreferenceKind::Gaussian;
  return std::nullopt;
}

/// Generalized criterion: which curve maps a deviation to a preference degree,
/// and the thresholds that curve needs. Thresholds are in criterion units.
///
/// Only the parameters a kind uses are stored; build through the named
/// factories or make(), both of which validate.
class PreferenceFunctionSpec {
public:
  PreferenceFunctionSpec() = default;  // Usual

  static PreferenceFunctionSpec usual() { return {}; }
  static PreferenceFunctionSpec u_shape(double q) { return make(PreferenceKind::UShape, q, {}, {}); }
  static PreferenceFunctionSpec v_shape(double p) { return make(PreferenceKind::VShape, {}, p, {}); }
  static PreferenceFunctionSpec level(double q, double p) { return make(PreferenceKind::Level, q, p, {}); }
  static PreferenceFunctionSpec linear(double q, double p) {
    return make(PreferenceKind::LinearWithIndifference, q, p, {});
  }
  static PreferenceFunctionSpec gaussian(double s) { return make(PreferenceKind::Gaussian, {}, {}, s); }

  static PreferenceFunctionSpec make(PreferenceKind kind, std::optional<double> q, std::optional<double> p,
                                     std::optional<double> s) {
    PreferenceFunctionSpec spec;
    spec.kind_ = kind;
    const bool uses_q = kind == PreferenceKind::UShape || kind == PreferenceKind::Level ||
                        kind == PreferenceKind::LinearWithIndifference;
    const bool uses_p = kind == PreferenceKind::VShape || kind == PreferenceKind::Level ||
                        kind == PreferenceKind::LinearWithIndifference;
    const bool uses_s = kind == PreferenceKind::Gaussian;
    const std::string name(to_string(kind));
    if (uses_q) {
      if (!q) throw ValidationError(name + " preference function requires q");
      if (!std::isfinite(*q) || *q < 0) throw ValidationError(name + " preference function requires q >= 0");
      spec.q_ = q;
    }
    if (uses_p) {
      if (!p) throw ValidationError(name + " preference function requires p");
      if (!std::isfinite(*p) || *p <= 0) throw ValidationError(name + " preference function requires p > 0");
      spec.p_ = p;
    }
    if (uses_q && uses_p && !(*p > *q)) throw ValidationError(name + " preference function requires p > q");
    if (uses_s) {
      if (!s) throw ValidationError(name + " preference function requires s");
      if (!std::isfinite(*s) || *s <= 0) throw ValidationError(name + " preference function requires s > 0");
      spec.s_ = s;
    }
    return spec;
  }

  PreferenceKind kind() const { return kind_; }
  std::optional<double> q() const { return q_; }
  std::optional<double> p() const { return p_; }
  std::optional<double> s() const { return s_; }

  friend bool operator==(const PreferenceFunctionSpec&, const PreferenceFunctionSpec&) = default;

private:
  PreferenceKind kind_ = PreferenceKind::Usual;
  std::optional<double> q_;
  std::optional<double> p_;
  std::optional<double> s_;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return lo <= v && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Criterion {
  std::string id;
  std::string name;
  Direction direction = Direction::Maximize;
  double weight = 1.0;
  PreferenceFunctionSpec pref_fn;
  std::optional<Interval> feasible_interval;
  std::string category;
  std::string unit;  // annotation only; values compare in matrix units

  friend bool operator==(const Criterion&, const Criterion&) = default;
};

struct Alternative {
  std::string id;
  std::string name;
  std::vector<double> values;  // aligned with the owning matrix's criteria

  friend bool operator==(const Alternative&, const Alternative&) = default;
};

/// Alternatives x criteria evaluation table.
///
/// Construction validates the table: it is rectangular, ids are unique within
/// each axis, weights are nonnegative and every value is finite (missing cells
/// are rejected rather than imputed). Weights are kept as given; algorithms
/// divide by total_weight() so any positive scale works.
class DecisionMatrix {
public:
  DecisionMatrix(std::vector<Criterion> criteria, std::vector<Alternative> alternatives)
      : criteria_(std::move(criteria)), alternatives_(std::move(alternatives)) {
    for (std::size_t j = 0; j < criteria_.size(); ++j) {
      const Criterion& c = criteria_[j];
      if (c.id.empty()) throw ValidationError("criterion " + std::to_string(j + 1) + " has an empty id");
      if (!std::isfinite(c.weight) || c.weight < 0)
        throw ValidationError("criterion " + c.id + " has a negative or non-finite weight");
      if (c.feasible_interval && !(c.feasible_interval->lo <= c.feasible_interval->hi))
        throw ValidationError("criterion " + c.id + " has a feasible interval with lo > hi");
      if (!criterion_index_.emplace(c.id, j).second) throw ValidationError("duplicate criterion id " + c.id);
    }
    for (std::size_t i = 0; i < alternatives_.size(); ++i) {
      const Alternative& a = alternatives_[i];
      if (a.id.empty()) throw ValidationError("alternative " + std::to_string(i + 1) + " has an empty id");
      if (a.values.size() != criteria_.size())
        throw ValidationError("alternative " + a.id + " has " + std::to_string(a.values.size()) +
                              " values, expected " + std::to_string(criteria_.size()));
      for (std::size_t j = 0; j < a.values.size(); ++j)
        if (!std::isfinite(a.values[j]))
          throw ValidationError("alternative " + a.id + " has a missing or non-finite value for " + criteria_[j].id);
      if (!alternative_index_.emplace(a.id, i).second) throw ValidationError("duplicate alternative id " + a.id);
    }
  }

  const std::vector<Criterion>& criteria() const { return criteria_; }
  const std::vector<Alternative>& alternatives() const { return alternatives_; }
  std::size_t criterion_count() const { return criteria_.size(); }
  std::size_t alternative_count() const { return alternatives_.size(); }

  double value(std::size_t alternative, std::size_t criterion) const {
    return alternatives_[alternative].values[criterion];
  }

  std::size_t alternative_index(std::string_view id) const {
    auto it = alternative_index_.find(std::string(id));
    if (it == alternative_index_.end()) throw LookupError("unknown alternative id '" + std::string(id) + "'");
    return it->second;
  }

  std::size_t criterion_index(std::string_view id) const {
    auto it = criterion_index_.find(std::string(id));
    if (it == criterion_index_.end()) throw LookupError("unknown criterion id '" + std::string(id) + "'");
    return it->second;
  }

  bool has_criterion(std::string_view id) const { return criterion_index_.contains(std::string(id)); }

  std::vector<double> column(std::size_t criterion) const {
    std::vector<double> out;
    out.reserve(alternatives_.size());
    for (const auto& a : alternatives_) out.push_back(a.values[criterion]);
    return out;
  }

  double total_weight() const {
    double total = 0.0;
    for (const auto& c : criteria_) total += c.weight;
    return total;
  }

  std::vector<double> normalized_weights() const {
    const double total = total_weight();
    if (!(total > 0)) throw ValidationError("all criterion weights are zero");
    std::vector<double> w;
    w.reserve(criteria_.size());
    for (const auto& c : criteria_) w.push_back(c.weight / total);
    return w;
  }

  // Copy with one more alternative appended.
  DecisionMatrix with_alternative(Alternative extra) const {
    auto alts = alternatives_;
    alts.push_back(std::move(extra));
    return DecisionMatrix(criteria_, std::move(alts));
  }

  // Copy keeping only the listed rows, in the listed order.
  DecisionMatrix select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<Alternative> alts;
    alts.reserve(rows.size());
    for (std::size_t r : rows) alts.push_back(alternatives_.at(r));
    return DecisionMatrix(criteria_, std::move(alts));
  }

  friend bool operator==(const DecisionMatrix& a, const DecisionMatrix& b) {
    return a.criteria_ == b.criteria_ && a.alternatives_ == b.alternatives_;
  }

private:
  std::vector<Criterion> criteria_;
  std::vector<Alternative> alternatives_;
  std::unordered_map<std::string, std::size_t> criterion_index_;
  std::unordered_map<std::string, std::size_t> alternative_index_;
};

// Positive means a is better than b on criterion j, whatever the direction.
inline double oriented_deviation(const DecisionMatrix& m, std::size_t a, std::size_t b, std::size_t j) {
  const double diff = m.value(a, j) - m.value(b, j);
  return m.criteria()[j].direction == Direction::Maximize ? diff : -diff;
}

inline double oriented_deviation(const DecisionMatrix& m, std::string_view a, std::string_view b,
                                 std::string_view j) {
  return oriented_deviation(m, m.alternative_index(a), m.alternative_index(b), m.criterion_index(j));
}

inline DecisionMatrix normalize_weights(const DecisionMatrix& m) {
  const auto w = m.normalized_weights();
  auto criteria = m.criteria();
  for (std::size_t j = 0; j < criteria.size(); ++j) criteria[j].weight = w[j];
  return DecisionMatrix(std::move(criteria), m.alternatives());
}

}  // namespace locus
