#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "locus/core_model.hpp"
#include "locus/error.hpp"
#include "locus/objectives.hpp"
#include "locus/promethee.hpp"
#include "locus/screening.hpp"

// File formats:
//   decision matrix   CSV; first column alternative name, remaining columns
//                     criterion ids; dot decimal separator; UTF-8
//   criteria config   JSON {"criteria": [{id, name, direction "max"|"min",
//                     weight, preference {kind, q, p, s}, condition {lo, hi} |
//                     {min} | {max}}]}
//   Pi matrix         CSV; header row of labels, one row per label; blank or
//                     "-" on the diagonal
//   flow table        CSV with alternative, phi_plus, phi_minus, phi_net
//   portfolio         JSON {mu, cov, target_return?, variance_budget?}
namespace locus::io {

struct CsvTable {
  std::string source;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  std::string where(std::size_t row, std::size_t col) const {
    return source + ":" + std::to_string(lines[row]) + ":" + std::to_string(col + 1);
  }
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temporary, then rename over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp.string() + ": cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(tmp.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(path.string() + ": cannot replace file");
  }
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// RFC 4180-style reader: quoted fields may hold commas, doubled quotes and
/// newlines. Unquoted fields are trimmed. Blank lines are skipped.
inline CsvTable parse_csv(std::string_view text, std::string source) {
  CsvTable t;
  t.source = std::move(source);
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, in_quotes = false, row_has_content = false;
  std::size_t line = 1, row_line = 1;
  auto end_field = [&] {
    row.push_back(quoted ? field : trim(field));
    field.clear();
    quoted = false;
  };
  auto end_row = [&] {
    end_field();
    if (row_has_content) {
      t.rows.push_back(std::move(row));
      t.lines.push_back(row_line);
    }
    row.clear();
    row_has_content = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = quoted = row_has_content = true;
    } else if (c == ',') {
      row_has_content = true;
      end_field();
    } else if (c == '\n') {
      end_row();
      row_line = ++line;
    } else if (c != '\r') {
      if (c != ' ' && c != '\t') row_has_content = true;
      field += c;
    }
  }
  if (in_quotes) throw ParseError(t.source + ":" + std::to_string(row_line) + ": unterminated quoted field");
  end_row();
  return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Shortest text that parses back to the same double.
inline std::string format_roundtrip(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct CriteriaConfig {
  std::vector<Criterion> criteria;
  screening::ConditionSet conditions;
};

namespace detail {

inline double json_number(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + " must be a number");
  return j.get<double>();
}

inline std::optional<double> json_optional_number(const nlohmann::json& obj, const char* key,
                                                  const std::string& what) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  return json_number(obj[key], what + "." + key);
}

}  // namespace detail

/// Parses a criteria config. `default_pref` applies to criteria that do not
/// name a preference function; missing weights default to 1 (equal weights).
inline CriteriaConfig parse_criteria_config(std::string_view text, const std::string& source,
                                            const PreferenceFunctionSpec& default_pref = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": invalid JSON: " + e.what());
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("criteria")) throw ParseError(source + ": missing \"criteria\" array");
    list = &doc["criteria"];
  }
  if (!list->is_array() || list->empty()) throw ParseError(source + ": \"criteria\" must be a non-empty array");

  CriteriaConfig cfg;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& item = (*list)[i];
    const std::string where = source + ": criteria[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError(where + " must be an object");
    if (!item.contains("id") || !item["id"].is_string()) throw ParseError(where + " needs a string \"id\"");
    Criterion c;
    c.id = item["id"].get<std::string>();
    if (c.id.empty()) throw ParseError(where + " has an empty id");
    if (!seen.insert(c.id).second) throw ParseError(where + ": duplicate criterion id " + c.id);
    const std::string at = source + ": criterion " + c.id;
    c.name = item.value("name", c.id);
    c.category = item.value("category", "");
    c.unit = item.value("unit", "");
    const std::string dir = item.value("direction", "max");
    if (dir == "max" || dir == "Max" || dir == "maximize")
      c.direction = Direction::Maximize;
    else if (dir == "min" || dir == "Min" || dir == "minimize")
      c.direction = Direction::Minimize;
    else
      throw ParseError(at + ": direction must be \"max\" or \"min\", got \"" + dir + "\"");
    if (item.contains("weight")) {
      c.weight = detail::json_number(item["weight"], at + ".weight");
      if (!(c.weight >= 0)) throw ParseError(at + ": weight must be nonnegative");
    }
    c.pref_fn = default_pref;
    if (item.contains("preference")) {
      const auto& pf = item["preference"];
      std::string kind_name;
      if (pf.is_string()) {
        kind_name = pf.get<std::string>();
      } else if (pf.is_object() && pf.contains("kind") && pf["kind"].is_string()) {
        kind_name = pf["kind"].get<std::string>();
      } else {
        throw ParseError(at + ": preference must be a kind name or an object with \"kind\"");
      }
      const auto kind = parse_preference_kind(kind_name);
      if (!kind) throw ParseError(at + ": unknown preference kind \"" + kind_name + "\"");
      const nlohmann::json empty = nlohmann::json::object();
      const auto& params = pf.is_object() ? pf : empty;
      try {
        c.pref_fn = PreferenceFunctionSpec::make(*kind, detail::json_optional_number(params, "q", at),
                                                 detail::json_optional_number(params, "p", at),
                                                 detail::json_optional_number(params, "s", at));
      } catch (const ValidationError& e) {
        throw ParseError(at + ": " + e.what());
      }
    }
    if (item.contains("condition") && !item["condition"].is_null()) {
      const auto& cond = item["condition"];
      if (!cond.is_object()) throw ParseError(at + ": condition must be an object");
      const auto lo = detail::json_optional_number(cond, "lo", at + ".condition");
      const auto hi = detail::json_optional_number(cond, "hi", at + ".condition");
      const auto mn = detail::json_optional_number(cond, "min", at + ".condition");
      const auto mx = detail::json_optional_number(cond, "max", at + ".condition");
      screening::Condition parsed;
      if (lo || hi) {
        if (!lo || !hi || mn || mx) throw ParseError(at + ": interval condition needs exactly lo and hi");
        if (!(*lo <= *hi)) throw ParseError(at + ": condition has lo > hi");
        parsed = screening::Condition::interval(*lo, *hi);
      } else if (mn && !mx) {
        parsed = screening::Condition::at_least(*mn);
      } else if (mx && !mn) {
        parsed = screening::Condition::at_most(*mx);
      } else if (mn && mx) {
        if (!(*mn <= *mx)) throw ParseError(at + ": condition has min > max");
        parsed = screening::Condition::interval(*mn, *mx);
      } else {
        throw ParseError(at + ": condition needs {lo, hi}, {min} or {max}");
      }
      c.feasible_interval = parsed.as_interval();
      cfg.conditions.set(c.id, parsed);
    }
    cfg.criteria.push_back(std::move(c));
  }
  return cfg;
}

inline CriteriaConfig load_criteria_config(const std::filesystem::path& path,
                                           const PreferenceFunctionSpec& default_pref = {}) {
  return parse_criteria_config(read_file(path), path.string(), default_pref);
}

/// Decision matrix from CSV. Columns may come in any order; the result uses
/// the config's criterion order and the file's row order.
inline DecisionMatrix parse_matrix(std::string_view text, const std::string& source, const CriteriaConfig& config) {
  const CsvTable t = parse_csv(text, source);
  if (t.rows.empty()) throw ParseError(source + ": empty file");
  const auto& header = t.rows.front();
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw ParseError(t.where(0, c) + ": empty column header");
    if (!column_of.emplace(header[c], c).second)
      throw ParseError(t.where(0, c) + ": duplicate column '" + header[c] + "'");
  }
  std::vector<std::size_t> source_col;
  for (const auto& crit : config.criteria) {
    auto it = column_of.find(crit.id);
    if (it == column_of.end()) throw ParseError(source + ": missing column for criterion '" + crit.id + "'");
    source_col.push_back(it->second);
    column_of.erase(it);
  }
  if (!column_of.empty()) {
    const auto extra = std::min_element(column_of.begin(), column_of.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    throw ParseError(t.where(0, extra->second) + ": column '" + extra->first + "' is not a configured criterion");
  }
  if (t.rows.size() < 2) throw ParseError(source + ": no alternatives");

  std::vector<Alternative> alts;
  std::unordered_set<std::string> names;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() != header.size())
      throw ParseError(source + ":" + std::to_string(t.lines[r]) + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(row.size()));
    Alternative a;
    a.id = a.name = row[0];
    if (a.id.empty()) throw ParseError(t.where(r, 0) + ": missing alternative name");
    if (!names.insert(a.id).second) throw ParseError(t.where(r, 0) + ": duplicate alternative '" + a.id + "'");
    for (std::size_t j = 0; j < source_col.size(); ++j) {
      const std::string& cell = row[source_col[j]];
      const auto v = parse_double(cell);
      if (!v || !std::isfinite(*v))
        throw ParseError(t.where(r, source_col[j]) + ": row '" + a.id + "', column '" + config.criteria[j].id +
                         "': " + (cell.empty() ? std::string("missing value") : "'" + cell + "' is not a number"));
      a.values.push_back(*v);
    }
    alts.push_back(std::move(a));
  }
  return DecisionMatrix(config.criteria, std::move(alts));
}

inline DecisionMatrix load_matrix(const std::filesystem::path& path, const CriteriaConfig& config) {
  return parse_matrix(read_file(path), path.string(), config);
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos && trim(s) == s) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Values in shortest round-trip form, so loading the text gives back the
// same matrix.
inline std::string format_matrix_csv(const DecisionMatrix& m, std::string_view first_header = "alternative") {
  std::string out(first_header);
  for (const auto& c : m.criteria()) out += "," + csv_escape(c.id);
  out += "\n";
  for (const auto& a : m.alternatives()) {
    out += csv_escape(a.id);
    for (double v : a.values) out += "," + format_roundtrip(v);
    out += "\n";
  }
  return out;
}

inline promethee::PreferenceIndexMatrix parse_pi_matrix(std::string_view text, const std::string& source) {
  const CsvTable t = parse_csv(text, source);
  if (t.rows.empty()) throw ParseError(source + ": empty file");
  const auto& header = t.rows.front();
  const std::size_t n = header.size() - 1;
  if (n < 1) throw ParseError(source + ": header has no alternative labels");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw ParseError(t.where(0, c) + ": empty column label");
    if (!index.emplace(header[c], c - 1).second)
      throw ParseError(t.where(0, c) + ": duplicate column label '" + header[c] + "'");
  }
  if (t.rows.size() - 1 != n)
    throw ParseError(source + ": matrix is not square: " + std::to_string(t.rows.size() - 1) + " rows, " +
                     std::to_string(n) + " columns");
  std::vector<double> values(n * n, 0.0);
  std::vector<bool> row_seen(n, false);
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() != header.size())
      throw ParseError(source + ":" + std::to_string(t.lines[r]) + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(row.size()));
    if (row[0].empty()) throw ParseError(t.where(r, 0) + ": missing row label");
    auto it = index.find(row[0]);
    if (it == index.end()) throw ParseError(t.where(r, 0) + ": row label '" + row[0] + "' has no matching column");
    const std::size_t a = it->second;
    if (row_seen[a]) throw ParseError(t.where(r, 0) + ": duplicate row label '" + row[0] + "'");
    row_seen[a] = true;
    for (std::size_t c = 1; c < row.size(); ++c) {
      const std::size_t b = c - 1;
      const std::string& cell = row[c];
      if (a == b) {
        if (cell.empty() || cell == "-") continue;
        const auto v = parse_double(cell);
        if (!v || *v != 0.0) throw ParseError(t.where(r, c) + ": diagonal entry must be blank, '-' or 0");
        continue;
      }
      const auto v = parse_double(cell);
      if (!v) throw ParseError(t.where(r, c) + ": '" + cell + "' is not a number");
      if (!(*v >= 0.0 && *v <= 1.0))
        throw ParseError(t.where(r, c) + ": entry " + cell + " is outside [0,1]");
      values[a * n + b] = *v;
    }
  }
  std::vector<std::string> ids(header.begin() + 1, header.end());
  return promethee::PreferenceIndexMatrix(std::move(ids), std::move(values));
}

inline promethee::PreferenceIndexMatrix load_pi_matrix(const std::filesystem::path& path) {
  return parse_pi_matrix(read_file(path), path.string());
}

/// Flow table as printed (e.g. a published results table). The phi_net
/// identity is not enforced here since printed tables are rounded; use
/// promethee::check_flow_table to audit.
inline promethee::FlowTable parse_flow_table(std::string_view text, const std::string& source) {
  const CsvTable t = parse_csv(text, source);
  if (t.rows.empty()) throw ParseError(source + ": empty file");
  const auto& header = t.rows.front();
  auto find = [&](std::string_view name) -> std::size_t {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    throw ParseError(source + ": missing column '" + std::string(name) + "'");
  };
  const std::size_t cid = find("alternative"), cp = find("phi_plus"), cm = find("phi_minus"),
                    cn = find("phi_net");
  promethee::FlowTable table;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() != header.size())
      throw ParseError(source + ":" + std::to_string(t.lines[r]) + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(row.size()));
    auto num = [&](std::size_t c) {
      const auto v = parse_double(row[c]);
      if (!v) throw ParseError(t.where(r, c) + ": '" + row[c] + "' is not a number");
      return *v;
    };
    if (row[cid].empty()) throw ParseError(t.where(r, cid) + ": missing alternative name");
    if (!seen.insert(row[cid]).second) throw ParseError(t.where(r, cid) + ": duplicate alternative '" + row[cid] + "'");
    table.rows.push_back({row[cid], num(cp), num(cm), num(cn)});
  }
  if (table.rows.empty()) throw ParseError(source + ": no alternatives");
  return table;
}

inline promethee::FlowTable load_flow_table(const std::filesystem::path& path) {
  return parse_flow_table(read_file(path), path.string());
}

inline objectives::PortfolioSpec parse_portfolio(std::string_view text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("mu") || !doc.contains("cov"))
    throw ParseError(source + ": portfolio needs \"mu\" and \"cov\"");
  try {
    auto mu = doc["mu"].get<std::vector<double>>();
    auto cov = doc["cov"].get<std::vector<std::vector<double>>>();
    return objectives::PortfolioSpec(std::move(mu), std::move(cov),
                                     detail::json_optional_number(doc, "target_return", source),
                                     detail::json_optional_number(doc, "variance_budget", source));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline objectives::PortfolioSpec load_portfolio(const std::filesystem::path& path) {
  return parse_portfolio(read_file(path), path.string());
}

}  // namespace locus::io
