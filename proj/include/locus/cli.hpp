#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locus/core_model.hpp"
#include "locus/data_io.hpp"
#include "locus/electre.hpp"
#include "locus/error.hpp"
#include "locus/ga_hybrid.hpp"
#include "locus/objectives.hpp"
#include "locus/promethee.hpp"
#include "locus/report.hpp"
#include "locus/screening.hpp"

// locus-mcda command line. Exit codes: 0 success, 1 data or validation
// error, 2 usage error.
namespace locus::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnv = "LOCUS_MCDA_SEED";

class UsageError : public Error {
public:
  using Error::Error;
};

namespace detail {

struct Inputs {
  std::string matrix;
  std::string config;
  std::string format = "table";
  std::string out;
  bool screen = false;
  std::string pref_fn = "usual";
  std::optional<double> pref_q, pref_p, pref_s;
};

inline void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--matrix", in.matrix, "Decision matrix CSV (first column alternative, then criterion ids)");
  cmd->add_option("--config", in.config, "Criteria config JSON (directions, weights, preference functions, conditions)");
  cmd->add_option("--format", in.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
  cmd->add_option("--out", in.out, "Write the report to this file instead of standard output");
  cmd->add_flag("--screen", in.screen, "Drop alternatives that violate the config's conditions before ranking");
  cmd->add_option("--pref-fn", in.pref_fn,
                  "Preference function for criteria whose config names none "
                  "(usual, ushape, vshape, level, linear, gaussian)");
  cmd->add_option("--pref-q", in.pref_q, "Indifference threshold q for --pref-fn");
  cmd->add_option("--pref-p", in.pref_p, "Strict preference threshold p for --pref-fn");
  cmd->add_option("--pref-s", in.pref_s, "Gaussian spread s for --pref-fn");
}

inline io::Format format_of(const Inputs& in) { return *io::parse_format(in.format); }

inline PreferenceFunctionSpec default_pref(const Inputs& in) {
  const auto kind = parse_preference_kind(in.pref_fn);
  if (!kind) throw UsageError("--pref-fn: unknown preference function '" + in.pref_fn + "'");
  try {
    return PreferenceFunctionSpec::make(*kind, in.pref_q, in.pref_p, in.pref_s);
  } catch (const ValidationError& e) {
    throw UsageError(std::string("--pref-fn: ") + e.what());
  }
}

inline void require_matrix(const Inputs& in, std::string_view command) {
  if (in.matrix.empty() || in.config.empty())
    throw UsageError(std::string(command) + " needs --matrix and --config");
}

struct Loaded {
  io::CriteriaConfig config;
  DecisionMatrix matrix;
};

inline Loaded load(const Inputs& in) {
  auto config = io::load_criteria_config(in.config, default_pref(in));
  auto matrix = io::load_matrix(in.matrix, config);
  if (in.screen) {
    const auto report = screening::screen(matrix, config.conditions);
    matrix = screening::feasible_subset(matrix, report);
  }
  return {std::move(config), std::move(matrix)};
}

inline void emit(const Inputs& in, const std::string& text, std::ostream& out) {
  if (in.out.empty())
    out << text;
  else
    io::write_file_atomic(in.out, text);
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw UsageError(std::string(kSeedEnv) + ": '" + env + "' is not an unsigned integer");
    return v;
  }
  return kDefaultSeed;
}

struct GaFlags {
  std::optional<std::uint64_t> seed;
  std::size_t pop = 50;
  std::size_t gens = 200;
  double cx = 0.9;
  double mut = 0.05;
  std::size_t elite = 2;
  std::size_t dup_attempts = 16;
  bool no_cache = false;
};

inline void add_ga_flags(CLI::App* cmd, GaFlags& g) {
  cmd->add_option("--seed", g.seed, std::string("Random seed (fallback: $") + kSeedEnv + ", then 42)");
  cmd->add_option("--pop", g.pop, "Population size")->check(CLI::PositiveNumber);
  cmd->add_option("--gens", g.gens, "Generations")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cx", g.cx, "Crossover rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mut", g.mut, "Per-gene mutation rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--elite", g.elite, "Elites carried over each generation")->check(CLI::NonNegativeNumber);
  cmd->add_option("--dup-attempts", g.dup_attempts, "Redraws of duplicate initial chromosomes")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-cache", g.no_cache, "Disable fitness memoization");
}

inline ga::GAConfig ga_config(const GaFlags& g) {
  ga::GAConfig cfg;
  cfg.population_size = g.pop;
  cfg.generations = g.gens;
  cfg.crossover_rate = g.cx;
  cfg.mutation_rate = g.mut;
  cfg.elitism_count = g.elite;
  cfg.seed = resolve_seed(g.seed);
  cfg.duplicate_rejection_attempts = g.dup_attempts;
  cfg.use_cache = !g.no_cache;
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

// Two reports in one output: blank-line separated, or one merged JSON object.
inline std::string combine(io::Format f, const std::string& first, const std::string& second) {
  if (f != io::Format::Json) return first + "\n" + second;
  auto merged = nlohmann::ordered_json::parse(first);
  merged.update(nlohmann::ordered_json::parse(second));
  return merged.dump(2) + "\n";
}

inline std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = io::parse_double(io::trim(item));
    if (!v) throw UsageError("--weights: '" + item + "' is not a number");
    w.push_back(*v);
  }
  if (w.empty()) throw UsageError("--weights: no values given");
  return w;
}

}  // namespace detail

/// Runs one invocation. Reports go to `out` (or --out), diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"locus-mcda: multi-criteria location ranking (PROMETHEE, ELECTRE) and net-flow genetic search"};
  app.name("locus-mcda");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(0, 1);

  detail::Inputs screen_in, prom_in, electre_in, opt_in;
  std::string pi_path, flows_path;
  bool partial = false;
  electre::ElectreThresholds thresholds;
  detail::GaFlags opt_ga, obj_ga;
  bool no_penalty = false;

  auto* screen_cmd = app.add_subcommand("screen", "Check every alternative against the config's conditions");
  detail::add_inputs(screen_cmd, screen_in);

  auto* prom_cmd = app.add_subcommand("rank-promethee", "PROMETHEE flows and PROMETHEE II ranking");
  detail::add_inputs(prom_cmd, prom_in);
  prom_cmd->add_option("--pi", pi_path, "Precomputed preference index matrix CSV (skips --matrix/--config)");
  prom_cmd->add_option("--flows", flows_path,
                       "Flow table CSV (alternative, phi_plus, phi_minus, phi_net) to rank as given");
  prom_cmd->add_flag("--partial", partial, "Also print the PROMETHEE I partial preorder");

  auto* electre_cmd = app.add_subcommand("rank-electre", "ELECTRE concordance/discordance pair classification");
  detail::add_inputs(electre_cmd, electre_in);
  electre_cmd->add_option("--s", thresholds.s, "Concordance level, in [0.5, 1 - min weight]");
  electre_cmd->add_option("--v", thresholds.v, "Veto level on range-normalized gaps, in [0,1]");

  auto* opt_cmd = app.add_subcommand("optimize", "Genetic search for the best-compromise criterion profile");
  detail::add_inputs(opt_cmd, opt_in);
  detail::add_ga_flags(opt_cmd, opt_ga);
  opt_cmd->add_flag("--no-penalty", no_penalty, "Do not penalize profiles that break the config's conditions");

  std::string portfolio_path, weights_text, obj_format = "table", obj_out;
  bool obj_optimize = false;
  double penalty = objectives::kDefaultPenalty;
  auto* obj_cmd = app.add_subcommand("objectives", "Mean-variance return, variance and weight constraints");
  obj_cmd->add_option("--portfolio", portfolio_path, "Portfolio JSON {mu, cov, target_return?, variance_budget?}");
  obj_cmd->add_option("--weights", weights_text, "Comma-separated weights to evaluate");
  obj_cmd->add_flag("--optimize", obj_optimize, "Search weights with the genetic algorithm (penalized objective)");
  obj_cmd->add_option("--penalty", penalty, "Penalty per unit of constraint violation")->check(CLI::NonNegativeNumber);
  obj_cmd->add_option("--format", obj_format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
  obj_cmd->add_option("--out", obj_out, "Write the report to this file instead of standard output");
  detail::add_ga_flags(obj_cmd, obj_ga);

  CLI::App* active = &app;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (app.get_subcommands().empty()) throw UsageError("a command is required");
    active = app.get_subcommands().front();

    if (active == screen_cmd) {
      detail::require_matrix(screen_in, "screen");
      auto config = io::load_criteria_config(screen_in.config, detail::default_pref(screen_in));
      auto matrix = io::load_matrix(screen_in.matrix, config);
      const auto report = screening::screen(matrix, config.conditions);
      detail::emit(screen_in, io::write_report(report, detail::format_of(screen_in)), out);
    } else if (active == prom_cmd) {
      const int sources = !pi_path.empty() + !flows_path.empty() + !prom_in.matrix.empty();
      if (sources > 1) throw UsageError("use only one of --pi, --flows or --matrix");
      if ((!pi_path.empty() || !flows_path.empty()) && prom_in.screen)
        throw UsageError("--screen needs --matrix and --config");
      promethee::FlowTable flow;
      if (!flows_path.empty()) {
        flow = io::load_flow_table(flows_path);
      } else if (!pi_path.empty()) {
        flow = promethee::flows(io::load_pi_matrix(pi_path));
      } else {
        detail::require_matrix(prom_in, "rank-promethee");
        flow = promethee::flows(promethee::preference_index_matrix(detail::load(prom_in).matrix));
      }
      const auto order = promethee::rank_promethee_ii(flow);
      const auto fmt = detail::format_of(prom_in);
      std::string text = io::write_report(flow, order, fmt);
      if (partial) text = detail::combine(fmt, text, io::write_report(promethee::rank_promethee_i(flow), fmt));
      detail::emit(prom_in, text, out);
    } else if (active == electre_cmd) {
      detail::require_matrix(electre_in, "rank-electre");
      const auto loaded = detail::load(electre_in);
      electre::validate(thresholds, loaded.matrix);
      const auto table = electre::classify(loaded.matrix, thresholds);
      detail::emit(electre_in, io::write_report(table, detail::format_of(electre_in)), out);
    } else if (active == opt_cmd) {
      detail::require_matrix(opt_in, "optimize");
      const auto cfg = detail::ga_config(opt_ga);
      const auto loaded = detail::load(opt_in);
      const auto bounds = ga::default_bounds(loaded.matrix, loaded.config.conditions);
      const auto report =
          ga::run(cfg, loaded.matrix, bounds, no_penalty ? screening::ConditionSet{} : loaded.config.conditions);
      detail::emit(opt_in, io::write_report(report, detail::format_of(opt_in)), out);
    } else if (active == obj_cmd) {
      if (portfolio_path.empty()) throw UsageError("objectives needs --portfolio");
      if (weights_text.empty() == !obj_optimize) throw UsageError("objectives needs exactly one of --weights or --optimize");
      const auto portfolio = io::load_portfolio(portfolio_path);
      const auto fmt = *io::parse_format(obj_format);
      std::string text;
      if (obj_optimize) {
        const auto cfg = detail::ga_config(obj_ga);
        ga::GeneBounds bounds{std::vector<Interval>(portfolio.size(), Interval{0.0, 1.0})};
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < portfolio.size(); ++i) labels.push_back("w" + std::to_string(i + 1));
        const auto report = ga::run(
            cfg, bounds,
            [&](std::span<const double> w) { return objectives::penalized_fitness(w, portfolio, penalty); }, labels);
        text = detail::combine(fmt, io::write_report(report, fmt),
                               io::write_report(io::evaluate_portfolio(report.best_chromosome.genes, portfolio), fmt));
      } else {
        const auto w = detail::parse_weights(weights_text);
        text = io::write_report(io::evaluate_portfolio(w, portfolio), fmt);
      }
      detail::Inputs sink;
      sink.out = obj_out;
      detail::emit(sink, text, out);
    }
  } catch (const UsageError& e) {
    err << "locus-mcda: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "locus-mcda: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace locus::cli
