#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "locus/data_io.hpp"
#include "locus/electre.hpp"
#include "locus/error.hpp"
#include "locus/ga_hybrid.hpp"
#include "locus/objectives.hpp"
#include "locus/promethee.hpp"
#include "locus/screening.hpp"

// Report writers. Every writer is a pure function of its input, so the same
// result always produces the same bytes. Reals are printed with six decimals
// (round-half-even on the exact binary value); negative zero prints as zero.
namespace locus::io {

enum class Format { Table, Csv, Json };

inline std::optional<Format> parse_format(std::string_view s) {
  if (s == "table") return Format::Table;
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

inline constexpr int kPrecision = 6;

inline std::string format_fixed(double v, int precision = kPrecision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s(buf);
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// The double nearest to the printed value, for JSON output.
inline double rounded(double v, int precision = kPrecision) { return *parse_double(format_fixed(v, precision)); }

namespace detail {

using Row = std::vector<std::string>;

inline std::string render_table(const Row& header, const std::vector<Row>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const Row& r) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  };
  widen(header);
  for (const auto& r : rows) widen(r);
  auto line = [&](const Row& r) {
    std::string out;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& cell = c < r.size() ? r[c] : std::string();
      const std::string pad(width[c] - cell.size(), ' ');
      if (c > 0) out += "  ";
      out += c == 0 ? cell + pad : pad + cell;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

inline std::string render_csv(const Row& header, const std::vector<Row>& rows) {
  auto line = [](const Row& r) {
    std::string out;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += ",";
      out += csv_escape(r[c]);
    }
    return out + "\n";
  };
  std::string out = line(header);
  for (const auto& r : rows) out += line(r);
  return out;
}

inline std::string render(Format f, const Row& header, const std::vector<Row>& rows) {
  return f == Format::Csv ? render_csv(header, rows) : render_table(header, rows);
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

// Flows in the table's own row order.
inline std::string write_report(const promethee::FlowTable& t, Format f) {
  if (f == Format::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : t.rows)
      arr.push_back({{"alternative", r.id},
                     {"phi_plus", rounded(r.phi_plus)},
                     {"phi_minus", rounded(r.phi_minus)},
                     {"phi_net", rounded(r.phi_net)}});
    return detail::dump({{"flows", arr}});
  }
  std::vector<detail::Row> rows;
  for (const auto& r : t.rows)
    rows.push_back({r.id, format_fixed(r.phi_plus), format_fixed(r.phi_minus), format_fixed(r.phi_net)});
  return detail::render(f, {"alternative", "phi_plus", "phi_minus", "phi_net"}, rows);
}

inline std::string write_report(const promethee::RankedOrder& o, Format f) {
  if (f == Format::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : o.entries) arr.push_back({{"rank", e.rank}, {"alternative", e.id}, {"score", rounded(e.score)}});
    return detail::dump({{"ranking", arr}});
  }
  std::vector<detail::Row> rows;
  for (const auto& e : o.entries) rows.push_back({std::to_string(e.rank), e.id, format_fixed(e.score)});
  return detail::render(f, {"rank", "alternative", "score"}, rows);
}

/// PROMETHEE II result: flows plus rank, listed best first. The CSV form has
/// the columns load_flow_table() reads back.
inline std::string write_report(const promethee::FlowTable& t, const promethee::RankedOrder& o, Format f) {
  if (f == Format::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : o.entries) {
      const auto& r = t.row(e.id);
      arr.push_back({{"alternative", r.id},
                     {"phi_plus", rounded(r.phi_plus)},
                     {"phi_minus", rounded(r.phi_minus)},
                     {"phi_net", rounded(r.phi_net)},
                     {"rank", e.rank}});
    }
    return detail::dump({{"promethee_ii", arr}});
  }
  std::vector<detail::Row> rows;
  for (const auto& e : o.entries) {
    const auto& r = t.row(e.id);
    rows.push_back({r.id, format_fixed(r.phi_plus), format_fixed(r.phi_minus), format_fixed(r.phi_net),
                    std::to_string(e.rank)});
  }
  return detail::render(f, {"alternative", "phi_plus", "phi_minus", "phi_net", "rank"}, rows);
}

// Ordered pairs a != b with the PROMETHEE I relation of a to b.
inline std::string write_report(const promethee::PartialPreorder& p, Format f) {
  if (f == Format::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b)
        if (a != b)
          arr.push_back({{"a", p.ids()[a]}, {"b", p.ids()[b]}, {"relation", promethee::to_string(p.relation(a, b))}});
    return detail::dump({{"promethee_i", arr}});
  }
  if (f == Format::Csv) {
    std::vector<detail::Row> rows;
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b)
        if (a != b) rows.push_back({p.ids()[a], p.ids()[b], std::string(promethee::to_string(p.relation(a, b)))});
    return detail::render_csv({"a", "b", "relation"}, rows);
  }
  detail::Row header{""};
  for (const auto& id : p.ids()) header.push_back(id);
  std::vector<detail::Row> rows;
  for (std::size_t a = 0; a < p.size(); ++a) {
    detail::Row r{p.ids()[a]};
    for (std::size_t b = 0; b < p.size(); ++b)
      r.push_back(a == b ? "-" : std::string(promethee::to_string(p.relation(a, b))));
    rows.push_back(std::move(r));
  }
  return detail::render_table(header, rows);
}

inline std::string write_report(const electre::OutrankingRelationTable& t, Format f) {
  if (f == Format::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : t.pairs) arr.push_back({{"a", p.a}, {"b", p.b}, {"relation", electre::to_string(p.relation)}});
    return detail::dump({{"outranking", arr}});
  }
  std::vector<detail::Row> rows;
  for (const auto& p : t.pairs) rows.push_back({p.a, p.b, std::string(electre::to_string(p.relation))});
  return detail::render(f, {"a", "b", "relation"}, rows);
}

/// One row per violation; a feasible alternative gets a single row with the
/// violation columns empty.
inline std::string write_report(const screening::ScreeningReport& s, Format f) {
  if (f == Format::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& a : s.alternatives) {
      auto v = nlohmann::ordered_json::array();
      for (const auto& x : a.violations)
        v.push_back({{"criterion", x.criterion},
                     {"value", rounded(x.value)},
                     {"condition", screening::to_string(x.condition)},
                     {"gap", rounded(x.gap)}});
      arr.push_back({{"alternative", a.id}, {"feasible", a.feasible}, {"violations", v}});
    }
    return detail::dump({{"screening", arr}});
  }
  std::vector<detail::Row> rows;
  for (const auto& a : s.alternatives) {
    if (a.violations.empty()) rows.push_back({a.id, a.feasible ? "yes" : "no", "", "", "", ""});
    for (const auto& x : a.violations)
      rows.push_back({a.id, a.feasible ? "yes" : "no", x.criterion, format_fixed(x.value),
                      screening::to_string(x.condition), format_fixed(x.gap)});
  }
  return detail::render(f, {"alternative", "feasible", "criterion", "value", "condition", "gap"}, rows);
}

/// GA summary: best fitness and cache counters, per-generation history, the
/// ranked final population and the best profile by criterion. Table and CSV
/// forms separate the blocks with a blank line.
inline std::string write_report(const ga::GAReport& r, Format f) {
  if (f == Format::Json) {
    auto history = nlohmann::ordered_json::array();
    for (const auto& h : r.history)
      history.push_back({{"generation", h.generation}, {"best", rounded(h.best)}, {"mean", rounded(h.mean)}});
    auto ranking = nlohmann::ordered_json::array();
    for (const auto& e : r.final_ranking.entries)
      ranking.push_back({{"rank", e.rank}, {"candidate", e.id}, {"net_flow", rounded(e.score)}});
    auto profile = nlohmann::ordered_json::object();
    for (const auto& [id, v] : r.best_profile) profile[id] = rounded(v);
    nlohmann::ordered_json j;
    j["best_fitness"] = r.history.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(rounded(r.best_fitness));
    j["best_profile"] = profile;
    j["cache"] = {{"hits", r.cache.hits}, {"misses", r.cache.misses}};
    j["history"] = history;
    j["final_ranking"] = ranking;
    return detail::dump(j);
  }
  std::string out;
  out += detail::render(f, {"best_fitness", "cache_hits", "cache_misses"},
                        {{r.history.empty() ? std::string() : format_fixed(r.best_fitness),
                          std::to_string(r.cache.hits), std::to_string(r.cache.misses)}});
  out += "\n";
  std::vector<detail::Row> hist;
  for (const auto& h : r.history) hist.push_back({std::to_string(h.generation), format_fixed(h.best), format_fixed(h.mean)});
  out += detail::render(f, {"generation", "best", "mean"}, hist);
  out += "\n";
  std::vector<detail::Row> ranking;
  for (const auto& e : r.final_ranking.entries) ranking.push_back({e.id, format_fixed(e.score), std::to_string(e.rank)});
  out += detail::render(f, {"candidate", "net_flow", "rank"}, ranking);
  out += "\n";
  std::vector<detail::Row> profile;
  for (const auto& [id, v] : r.best_profile) profile.push_back({id, format_fixed(v)});
  out += detail::render(f, {"criterion", "best_value"}, profile);
  return out;
}

struct PortfolioEvaluation {
  std::vector<double> weights;
  double expected_return = 0.0;
  double variance = 0.0;
  std::vector<objectives::Violation> violations;
};

inline PortfolioEvaluation evaluate_portfolio(std::span<const double> w, const objectives::PortfolioSpec& p) {
  return {std::vector<double>(w.begin(), w.end()), objectives::expected_return(w, p),
          objectives::portfolio_variance(w, p), objectives::validate(w, p)};
}

inline std::string write_report(const PortfolioEvaluation& e, Format f) {
  if (f == Format::Json) {
    auto w = nlohmann::ordered_json::array();
    for (double x : e.weights) w.push_back(rounded(x));
    auto v = nlohmann::ordered_json::array();
    for (const auto& x : e.violations) {
      nlohmann::ordered_json item{{"constraint", objectives::to_string(x.kind)}};
      item["index"] = x.index ? nlohmann::ordered_json(*x.index) : nlohmann::ordered_json(nullptr);
      item["magnitude"] = rounded(x.magnitude);
      v.push_back(item);
    }
    return detail::dump({{"weights", w},
                         {"expected_return", rounded(e.expected_return)},
                         {"variance", rounded(e.variance)},
                         {"feasible", e.violations.empty()},
                         {"violations", v}});
  }
  std::string weights;
  for (std::size_t i = 0; i < e.weights.size(); ++i) weights += (i ? " " : "") + format_fixed(e.weights[i]);
  std::string out = detail::render(f, {"weights", "expected_return", "variance", "feasible"},
                                   {{weights, format_fixed(e.expected_return), format_fixed(e.variance),
                                     e.violations.empty() ? "yes" : "no"}});
  out += "\n";
  std::vector<detail::Row> rows;
  for (const auto& x : e.violations)
    rows.push_back({std::string(objectives::to_string(x.kind)), x.index ? std::to_string(*x.index) : "",
                    format_fixed(x.magnitude)});
  out += detail::render(f, {"constraint", "index", "magnitude"}, rows);
  return out;
}

/// Computed versus printed flows, one CSV row for every alternative whose
/// phi_plus differs from the printed value by more than `tolerance`. Deltas
/// are computed minus printed.
inline std::string flow_delta_report(const promethee::FlowTable& computed, const promethee::FlowTable& printed,
                                     double tolerance) {
  std::vector<detail::Row> rows;
  for (const auto& c : computed.rows) {
    const auto& p = printed.row(c.id);
    if (std::abs(c.phi_plus - p.phi_plus) <= tolerance) continue;
    rows.push_back({c.id, format_fixed(c.phi_plus), format_fixed(p.phi_plus), format_fixed(c.phi_plus - p.phi_plus),
                    format_fixed(c.phi_minus), format_fixed(p.phi_minus), format_fixed(c.phi_minus - p.phi_minus),
                    format_fixed(c.phi_net), format_fixed(p.phi_net), format_fixed(c.phi_net - p.phi_net)});
  }
  return detail::render_csv({"alternative", "phi_plus_computed", "phi_plus_printed", "phi_plus_delta",
                             "phi_minus_computed", "phi_minus_printed", "phi_minus_delta", "phi_net_computed",
                             "phi_net_printed", "phi_net_delta"},
                            rows);
}

}  // namespace locus::io
