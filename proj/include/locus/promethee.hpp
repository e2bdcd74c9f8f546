#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "locus/core_model.hpp"
#include "locus/error.hpp"

namespace locus::promethee {

// Two flows closer than this are the same score for ranking and preorders.
// Mathematically equal flows can differ by a few ulp depending on summation
// order, and rankings must not depend on input order.
inline constexpr double kTieTolerance = 1e-9;

/// Preference degree in [0,1] for a deviation d (positive = first action better).
inline double preference_value(const PreferenceFunctionSpec& spec, double d) {
  if (!(d > 0)) return 0.0;
  switch (spec.kind()) {
    case PreferenceKind::Usual:
      return 1.0;
    case PreferenceKind::UShape:
      return d > *spec.q() ? 1.0 : 0.0;
    case PreferenceKind::VShape:
      return std::min(d / *spec.p(), 1.0);
    case PreferenceKind::Level:
      if (d <= *spec.q()) return 0.0;
      return d <= *spec.p() ? 0.5 : 1.0;
    case PreferenceKind::LinearWithIndifference: {
      const double q = *spec.q(), p = *spec.p();
      if (d <= q) return 0.0;
      if (d > p) return 1.0;
      return (d - q) / (p - q);
    }
    case PreferenceKind::Gaussian: {
      const double s = *spec.s();
      return -std::expm1(-(d * d) / (2.0 * s * s));
    }
  }
  return 0.0;
}

/// Square table of pairwise preference indices Pi(a,b), diagonal zero.
class PreferenceIndexMatrix {
public:
  PreferenceIndexMatrix(std::vector<std::string> ids, std::vector<double> values)
      : ids_(std::move(ids)), values_(std::move(values)) {
    const std::size_t n = ids_.size();
    if (values_.size() != n * n)
      throw ValidationError("preference index matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double v = values_[a * n + b];
        if (a == b && v != 0.0)
          throw ValidationError("preference index diagonal entry for " + ids_[a] + " must be 0");
        if (!(v >= 0.0 && v <= 1.0))
          throw ValidationError("preference index (" + ids_[a] + ", " + ids_[b] + ") = " + std::to_string(v) +
                                " is outside [0,1]");
      }
    }
    std::vector<std::string> sorted = ids_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("preference index matrix has duplicate labels");
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  double at(std::size_t a, std::size_t b) const { return values_[a * ids_.size() + b]; }

  friend bool operator==(const PreferenceIndexMatrix&, const PreferenceIndexMatrix&) = default;

private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

struct FlowRow {
  std::string id;
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  double phi_net = 0.0;

  friend bool operator==(const FlowRow&, const FlowRow&) = default;
};

// Rows follow the alternative order of the source matrix. Tables computed by
// flows() satisfy every invariant; tables loaded from printed sources may not,
// which is what check_flow_table() is for.
struct FlowTable {
  std::vector<FlowRow> rows;

  const FlowRow& row(std::string_view id) const {
    for (const auto& r : rows)
      if (r.id == id) return r;
    throw LookupError("unknown alternative id '" + std::string(id) + "'");
  }

  friend bool operator==(const FlowTable&, const FlowTable&) = default;
};

struct RankedEntry {
  std::string id;
  int rank = 0;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

// Best first. Ties share a rank (competition numbering 1,2,2,4) and are listed by id.
struct RankedOrder {
  std::vector<RankedEntry> entries;

  int rank_of(std::string_view id) const {
    for (const auto& e : entries)
      if (e.id == id) return e.rank;
    throw LookupError("unknown alternative id '" + std::string(id) + "'");
  }

  friend bool operator==(const RankedOrder&, const RankedOrder&) = default;
};

enum class PartialRelation { Preferred, Outranked, Indifferent, Incomparable };

inline std::string_view to_string(PartialRelation r) {
  switch (r) {
    case PartialRelation::Preferred: return "P";
    case PartialRelation::Outranked: return "P-";
    case PartialRelation::Indifferent: return "I";
    case PartialRelation::Incomparable: return "R";
  }
  return "R";
}

// relation(a,b) == Preferred means a is preferred to b; the mirrored entry
// relation(b,a) is then Outranked.
class PartialPreorder {
public:
  PartialPreorder(std::vector<std::string> ids, std::vector<PartialRelation> relations)
      : ids_(std::move(ids)), relations_(std::move(relations)) {}

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  PartialRelation relation(std::size_t a, std::size_t b) const { return relations_[a * ids_.size() + b]; }

  friend bool operator==(const PartialPreorder&, const PartialPreorder&) = default;

private:
  std::vector<std::string> ids_;
  std::vector<PartialRelation> relations_;
};

// Pi(a,b) = sum_j w_j F_j(d_j(a,b)) / sum_j w_j. Dividing once at the end keeps
// equal integer weights exact (k/m) and makes a full coalition exactly 1.
inline double preference_index(const DecisionMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) throw ValidationError("preference index is undefined on the diagonal (" + m.alternatives()[a].id + ")");
  const double total = m.total_weight();
  if (!(total > 0)) throw ValidationError("all criterion weights are zero");
  double sum = 0.0;
  const auto& criteria = m.criteria();
  for (std::size_t j = 0; j < criteria.size(); ++j)
    sum += criteria[j].weight * preference_value(criteria[j].pref_fn, oriented_deviation(m, a, b, j));
  return std::min(sum / total, 1.0);
}

inline double preference_index(const DecisionMatrix& m, std::string_view a, std::string_view b) {
  return preference_index(m, m.alternative_index(a), m.alternative_index(b));
}

inline PreferenceIndexMatrix preference_index_matrix(const DecisionMatrix& m) {
  const std::size_t n = m.alternative_count();
  if (n < 2) throw ValidationError("PROMETHEE needs at least 2 alternatives, got " + std::to_string(n));
  std::vector<double> values(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) values[a * n + b] = preference_index(m, a, b);
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& alt : m.alternatives()) ids.push_back(alt.id);
  return PreferenceIndexMatrix(std::move(ids), std::move(values));
}

/// Leaving (row mean) and entering (column mean) flows over the n-1 other
/// alternatives, and their difference.
inline FlowTable flows(const PreferenceIndexMatrix& pi) {
  const std::size_t n = pi.size();
  if (n < 2) throw ValidationError("flows need at least 2 alternatives, got " + std::to_string(n));
  const double others = static_cast<double>(n - 1);
  FlowTable table;
  table.rows.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    double out = 0.0, in = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (x == a) continue;
      out += pi.at(a, x);
      in += pi.at(x, a);
    }
    FlowRow row{pi.ids()[a], out / others, in / others, 0.0};
    row.phi_net = row.phi_plus - row.phi_minus;
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline FlowTable flows(const DecisionMatrix& m) { return flows(preference_index_matrix(m)); }

// Violations of the FlowTable invariants, empty when the table is consistent.
inline std::vector<std::string> check_flow_table(const FlowTable& t, double tolerance = 1e-12) {
  std::vector<std::string> problems;
  double net = 0.0, plus = 0.0, minus = 0.0;
  for (const auto& r : t.rows) {
    if (r.phi_net != r.phi_plus - r.phi_minus) problems.push_back(r.id + ": phi_net != phi_plus - phi_minus");
    if (r.phi_plus < 0 || r.phi_plus > 1) problems.push_back(r.id + ": phi_plus outside [0,1]");
    if (r.phi_minus < 0 || r.phi_minus > 1) problems.push_back(r.id + ": phi_minus outside [0,1]");
    net += r.phi_net;
    plus += r.phi_plus;
    minus += r.phi_minus;
  }
  if (std::abs(net) > tolerance) problems.push_back("net flows do not sum to 0");
  if (std::abs(plus - minus) > tolerance) problems.push_back("sum of phi_plus differs from sum of phi_minus");
  return problems;
}

/// Descending total order by score with shared ranks for ties.
inline RankedOrder rank_by_score(std::vector<std::pair<std::string, double>> scores,
                                 double tie_tolerance = kTieTolerance) {
  std::sort(scores.begin(), scores.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  // Tie groups are formed on the sorted sequence, then listed by id.
  RankedOrder order;
  order.entries.reserve(scores.size());
  std::size_t group_start = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i > 0 && scores[i - 1].second - scores[i].second > tie_tolerance) group_start = i;
    order.entries.push_back({scores[i].first, static_cast<int>(group_start + 1), scores[i].second});
  }
  std::stable_sort(order.entries.begin(), order.entries.end(), [](const RankedEntry& x, const RankedEntry& y) {
    if (x.rank != y.rank) return x.rank < y.rank;
    return x.id < y.id;
  });
  return order;
}

inline RankedOrder rank_promethee_ii(const FlowTable& flow, double tie_tolerance = kTieTolerance) {
  std::vector<std::pair<std::string, double>> scores;
  scores.reserve(flow.rows.size());
  for (const auto& r : flow.rows) scores.emplace_back(r.id, r.phi_net);
  return rank_by_score(std::move(scores), tie_tolerance);
}

// a is preferred to b when both flows agree (phi+ not lower, phi- not higher,
// one strictly); crossed flows are incomparable.
inline PartialPreorder rank_promethee_i(const FlowTable& flow, double tie_tolerance = kTieTolerance) {
  const std::size_t n = flow.rows.size();
  std::vector<PartialRelation> rel(n * n, PartialRelation::Indifferent);
  auto cmp = [tie_tolerance](double x, double y) {
    if (std::abs(x - y) <= tie_tolerance) return 0;
    return x > y ? 1 : -1;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const int plus = cmp(flow.rows[a].phi_plus, flow.rows[b].phi_plus);
      const int minus = -cmp(flow.rows[a].phi_minus, flow.rows[b].phi_minus);  // lower phi- is better
      PartialRelation r;
      if (plus == 0 && minus == 0)
        r = PartialRelation::Indifferent;
      else if (plus >= 0 && minus >= 0)
        r = PartialRelation::Preferred;
      else if (plus <= 0 && minus <= 0)
        r = PartialRelation::Outranked;
      else
        r = PartialRelation::Incomparable;
      rel[a * n + b] = r;
    }
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& r : flow.rows) ids.push_back(r.id);
  return PartialPreorder(std::move(ids), std::move(rel));
}

}  // namespace locus::promethee
