#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "locus/core_model.hpp"
#include "locus/error.hpp"

namespace locus::electre {

// s is the concordance level, v the veto level on range-normalized gaps.
struct ElectreThresholds {
  double s = 0.7;
  double v = 0.3;
};

// Admissible concordance levels are [0.5, 1 - min_j w_j] for normalized weights.
inline void validate(const ElectreThresholds& t, const DecisionMatrix& m) {
  if (!(t.v >= 0.0 && t.v <= 1.0))
    throw ValidationError("veto level v = " + std::to_string(t.v) + " is outside [0,1]");
  const auto w = m.normalized_weights();
  const double upper = 1.0 - *std::min_element(w.begin(), w.end());
  constexpr double slack = 1e-12;
  if (!(t.s >= 0.5 - slack && t.s <= upper + slack))
    throw ValidationError("concordance level s = " + std::to_string(t.s) + " is outside the admissible range [0.5, " +
                          std::to_string(upper) + "]");
}

enum class Relation {
  PreferredFirst,   // aPb
  PreferredSecond,  // bPa
  Indifferent,      // aIb
  Incomparable,     // aRb
};

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::PreferredFirst: return "P+";
    case Relation::PreferredSecond: return "P-";
    case Relation::Indifferent: return "I";
    case Relation::Incomparable: return "R";
  }
  return "R";
}

struct PairRelation {
  std::string a;
  std::string b;
  Relation relation;
  friend bool operator==(const PairRelation&, const PairRelation&) = default;
};

// One entry per unordered pair, a before b in matrix order.
struct OutrankingRelationTable {
  std::vector<PairRelation> pairs;

  Relation between(std::string_view a, std::string_view b) const {
    for (const auto& p : pairs) {
      if (p.a == a && p.b == b) return p.relation;
      if (p.a == b && p.b == a) {
        switch (p.relation) {
          case Relation::PreferredFirst: return Relation::PreferredSecond;
          case Relation::PreferredSecond: return Relation::PreferredFirst;
          default: return p.relation;
        }
      }
    }
    throw LookupError("no relation recorded for pair (" + std::string(a) + ", " + std::string(b) + ")");
  }

  friend bool operator==(const OutrankingRelationTable&, const OutrankingRelationTable&) = default;
};

// Weight of the criteria on which a is at least as good as b. Ties belong to
// both coalitions.
inline double concordance(const DecisionMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) throw ValidationError("concordance needs two distinct alternatives");
  const double total = m.total_weight();
  if (!(total > 0)) throw ValidationError("all criterion weights are zero");
  double sum = 0.0;
  for (std::size_t j = 0; j < m.criterion_count(); ++j)
    if (oriented_deviation(m, a, b, j) >= 0) sum += m.criteria()[j].weight;
  return sum / total;
}

inline double concordance(const DecisionMatrix& m, std::string_view a, std::string_view b) {
  return concordance(m, m.alternative_index(a), m.alternative_index(b));
}

// max - min of every column over the whole matrix.
inline std::vector<double> criterion_ranges(const DecisionMatrix& m) {
  std::vector<double> ranges(m.criterion_count(), 0.0);
  for (std::size_t j = 0; j < m.criterion_count(); ++j) {
    const auto col = m.column(j);
    if (col.empty()) continue;
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    ranges[j] = *hi - *lo;
  }
  return ranges;
}

namespace detail {

inline double discordance(const DecisionMatrix& m, std::size_t a, std::size_t b, const std::vector<double>& ranges) {
  double worst = 0.0;
  for (std::size_t j = 0; j < m.criterion_count(); ++j) {
    const double d = oriented_deviation(m, a, b, j);
    if (!(d < 0)) continue;
    if (!(ranges[j] > 0))
      throw ValidationError("criterion " + m.criteria()[j].id + " has zero range; discordance is undefined");
    worst = std::max(worst, -d / ranges[j]);
  }
  return std::min(worst, 1.0);
}

inline bool outranks(const DecisionMatrix& m, std::size_t a, std::size_t b, const ElectreThresholds& t,
                     const std::vector<double>& ranges) {
  return concordance(m, a, b) >= t.s && discordance(m, a, b, ranges) <= t.v;
}

}  // namespace detail

// Strongest opposition to aSb: the largest gap in b's favour, divided by that
// criterion's observed range so the veto level is scale free.
inline double discordance(const DecisionMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) throw ValidationError("discordance needs two distinct alternatives");
  return detail::discordance(m, a, b, criterion_ranges(m));
}

inline double discordance(const DecisionMatrix& m, std::string_view a, std::string_view b) {
  return discordance(m, m.alternative_index(a), m.alternative_index(b));
}

inline bool outranks(const DecisionMatrix& m, std::size_t a, std::size_t b, const ElectreThresholds& t) {
  if (a == b) throw ValidationError("outranking needs two distinct alternatives");
  return detail::outranks(m, a, b, t, criterion_ranges(m));
}

inline bool outranks(const DecisionMatrix& m, std::string_view a, std::string_view b, const ElectreThresholds& t) {
  return outranks(m, m.alternative_index(a), m.alternative_index(b), t);
}

inline OutrankingRelationTable classify(const DecisionMatrix& m, const ElectreThresholds& t) {
  const std::size_t n = m.alternative_count();
  if (n < 2) throw ValidationError("ELECTRE needs at least 2 alternatives, got " + std::to_string(n));
  const auto ranges = criterion_ranges(m);
  OutrankingRelationTable table;
  table.pairs.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const bool ab = detail::outranks(m, a, b, t, ranges);
      const bool ba = detail::outranks(m, b, a, t, ranges);
      Relation r = ab ? (ba ? Relation::Indifferent : Relation::PreferredFirst)
                      : (ba ? Relation::PreferredSecond : Relation::Incomparable);
      table.pairs.push_back({m.alternatives()[a].id, m.alternatives()[b].id, r});
    }
  }
  return table;
}

}  // namespace locus::electre
