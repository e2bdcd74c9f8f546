#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "locus/core_model.hpp"
#include "locus/error.hpp"

namespace locus::screening {

enum class ConditionKind { Interval, AtLeast, AtMost };

// Closed on both ends.
struct Condition {
  ConditionKind kind = ConditionKind::Interval;
  double lo = 0.0;
  double hi = 0.0;

  static Condition interval(double lo, double hi) {
    if (!(lo <= hi)) throw ValidationError("condition interval has lo > hi");
    return {ConditionKind::Interval, lo, hi};
  }
  static Condition at_least(double x) { return {ConditionKind::AtLeast, x, 0.0}; }
  static Condition at_most(double x) { return {ConditionKind::AtMost, 0.0, x}; }

  bool has_lower() const { return kind != ConditionKind::AtMost; }
  bool has_upper() const { return kind != ConditionKind::AtLeast; }

  // Distance to the nearest violated bound, 0 when satisfied.
  double gap(double v) const {
    if (has_lower() && v < lo) return lo - v;
    if (has_upper() && v > hi) return v - hi;
    return 0.0;
  }
  bool satisfied(double v) const { return !(has_lower() && v < lo) && !(has_upper() && v > hi); }

  Interval as_interval() const {
    Interval i;
    if (has_lower()) i.lo = lo;
    if (has_upper()) i.hi = hi;
    return i;
  }

  friend bool operator==(const Condition&, const Condition&) = default;
};

// "[1,9]", ">=4", "<=240", bounds in %.6g.
inline std::string to_string(const Condition& c) {
  auto g = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  switch (c.kind) {
    case ConditionKind::Interval: return "[" + g(c.lo) + "," + g(c.hi) + "]";
    case ConditionKind::AtLeast: return ">=" + g(c.lo);
    case ConditionKind::AtMost: return "<=" + g(c.hi);
  }
  return {};
}

// Criterion id -> condition. Criteria without an entry are unconstrained.
struct ConditionSet {
  std::vector<std::pair<std::string, Condition>> entries;

  const Condition* find(std::string_view criterion) const {
    for (const auto& [id, c] : entries)
      if (id == criterion) return &c;
    return nullptr;
  }
  bool empty() const { return entries.empty(); }
  void set(std::string id, Condition c) {
    for (auto& e : entries)
      if (e.first == id) {
        e.second = c;
        return;
      }
    entries.emplace_back(std::move(id), c);
  }
};

struct ViolationEntry {
  std::string criterion;
  double value;
  Condition condition;
  double gap;
  friend bool operator==(const ViolationEntry&, const ViolationEntry&) = default;
};

struct AlternativeScreen {
  std::string id;
  bool feasible = true;
  std::vector<ViolationEntry> violations;
  friend bool operator==(const AlternativeScreen&, const AlternativeScreen&) = default;
};

struct ScreeningReport {
  std::vector<AlternativeScreen> alternatives;

  const AlternativeScreen& of(std::string_view id) const {
    for (const auto& a : alternatives)
      if (a.id == id) return a;
    throw LookupError("unknown alternative id '" + std::string(id) + "'");
  }
  std::vector<std::string> feasible_ids() const {
    std::vector<std::string> out;
    for (const auto& a : alternatives)
      if (a.feasible) out.push_back(a.id);
    return out;
  }
  friend bool operator==(const ScreeningReport&, const ScreeningReport&) = default;
};

inline void validate(const ConditionSet& conds, const DecisionMatrix& m) {
  for (const auto& [id, c] : conds.entries) {
    if (!m.has_criterion(id)) throw LookupError("condition references unknown criterion id '" + id + "'");
    if (c.kind == ConditionKind::Interval && !(c.lo <= c.hi))
      throw ValidationError("condition on " + id + " has lo > hi");
  }
}

// Conditions carried on the criteria themselves (feasible_interval).
inline ConditionSet conditions_from_criteria(const DecisionMatrix& m) {
  ConditionSet out;
  for (const auto& c : m.criteria()) {
    if (!c.feasible_interval) continue;
    const auto& i = *c.feasible_interval;
    const bool lower = std::isfinite(i.lo), upper = std::isfinite(i.hi);
    if (lower && upper)
      out.set(c.id, Condition::interval(i.lo, i.hi));
    else if (lower)
      out.set(c.id, Condition::at_least(i.lo));
    else if (upper)
      out.set(c.id, Condition::at_most(i.hi));
  }
  return out;
}

/// Checks every alternative against every condition. Violations are listed in
/// the matrix's criterion order.
inline ScreeningReport screen(const DecisionMatrix& m, const ConditionSet& conds) {
  validate(conds, m);
  ScreeningReport report;
  report.alternatives.reserve(m.alternative_count());
  for (std::size_t a = 0; a < m.alternative_count(); ++a) {
    AlternativeScreen row{m.alternatives()[a].id, true, {}};
    for (std::size_t j = 0; j < m.criterion_count(); ++j) {
      const Condition* c = conds.find(m.criteria()[j].id);
      if (!c) continue;
      const double v = m.value(a, j);
      if (!c->satisfied(v)) row.violations.push_back({m.criteria()[j].id, v, *c, c->gap(v)});
    }
    row.feasible = row.violations.empty();
    report.alternatives.push_back(std::move(row));
  }
  return report;
}

inline DecisionMatrix feasible_subset(const DecisionMatrix& m, const ScreeningReport& report) {
  std::vector<std::size_t> rows;
  for (std::size_t a = 0; a < m.alternative_count(); ++a)
    if (report.of(m.alternatives()[a].id).feasible) rows.push_back(a);
  return m.select_rows(rows);
}

}  // namespace locus::screening
