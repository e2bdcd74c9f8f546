#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locus/core_model.hpp"
#include "locus/error.hpp"
#include "locus/promethee.hpp"
#include "locus/screening.hpp"

// Genetic search over candidate criterion profiles. A chromosome is one real
// gene per criterion; its fitness is the PROMETHEE net flow it earns when
// inserted among the reference alternatives.
namespace locus::ga {

/// Seeded 64-bit generator. Draws are derived from the raw mt19937_64 stream
/// so sequences are identical across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    if (lo == hi) return lo;
    return std::min(hi, lo + uniform01() * (hi - lo));
  }

private:
  std::mt19937_64 engine_;
};

struct Chromosome {
  std::vector<double> genes;
  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

using Population = std::vector<Chromosome>;

struct GeneBounds {
  std::vector<Interval> intervals;

  std::size_t size() const { return intervals.size(); }

  void validate() const {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const auto& iv = intervals[i];
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo <= iv.hi))
        throw ValidationError("gene bounds " + std::to_string(i + 1) + " must be a finite interval with lo <= hi");
    }
  }

  bool contains(const Chromosome& c) const {
    if (c.genes.size() != intervals.size()) return false;
    for (std::size_t i = 0; i < intervals.size(); ++i)
      if (!intervals[i].contains(c.genes[i])) return false;
    return true;
  }
};

struct GAConfig {
  std::size_t population_size = 50;
  std::size_t generations = 200;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;
  std::size_t elitism_count = 2;
  std::uint64_t seed = 42;
  std::size_t duplicate_rejection_attempts = 16;
  bool use_cache = true;

  void validate() const {
    if (population_size == 0) throw ValidationError("population size must be positive");
    if (!(crossover_rate >= 0 && crossover_rate <= 1)) throw ValidationError("crossover rate must be in [0,1]");
    if (!(mutation_rate >= 0 && mutation_rate <= 1)) throw ValidationError("mutation rate must be in [0,1]");
    if (elitism_count >= population_size) throw ValidationError("elitism count must be below the population size");
    if (duplicate_rejection_attempts == 0) throw ValidationError("duplicate rejection attempts must be positive");
  }
};

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  friend bool operator==(const CacheStats&, const CacheStats&) = default;
};

struct GAReport {
  Chromosome best_chromosome;
  double best_fitness = -std::numeric_limits<double>::infinity();
  std::vector<GenerationStats> history;
  promethee::RankedOrder final_ranking;  // final population, scored by fitness
  std::vector<std::pair<std::string, double>> best_profile;  // criterion id -> gene
  CacheStats cache;

  // Equality of everything the search produced; cache counters excluded.
  bool same_outcome(const GAReport& o) const {
    return best_chromosome == o.best_chromosome && best_fitness == o.best_fitness && history == o.history &&
           final_ranking == o.final_ranking && best_profile == o.best_profile;
  }
  friend bool operator==(const GAReport&, const GAReport&) = default;
};

/// Memo table keyed on the exact bit pattern of the genes. Safe for
/// concurrent lookups and inserts.
class FitnessCache {
public:
  std::optional<double> lookup(std::span<const double> genes) {
    std::lock_guard lock(mutex_);
    auto it = table_.find(key(genes));
    if (it == table_.end()) {
      ++stats_.misses;
      return std::nullopt;
    }
    ++stats_.hits;
    return it->second;
  }

  void insert(std::span<const double> genes, double value) {
    std::lock_guard lock(mutex_);
    table_.emplace(key(genes), value);
  }

  CacheStats stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
  }
  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return table_.size();
  }

private:
  using Key = std::vector<std::uint64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (std::uint64_t x : k) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return static_cast<std::size_t>(h);
    }
  };
  static Key key(std::span<const double> genes) {
    Key k;
    k.reserve(genes.size());
    for (double g : genes) k.push_back(std::bit_cast<std::uint64_t>(g));
    return k;
  }

  mutable std::mutex mutex_;
  std::unordered_map<Key, double, KeyHash> table_;
  CacheStats stats_;
};

/// Net flow of a candidate profile ranked against the reference alternatives,
/// minus `penalty_per_violation` for every condition the profile breaks.
///
/// Only the candidate's own row and column of the augmented preference index
/// matrix are needed, so evaluation is O(n m) rather than O(n^2 m).
class NetFlowFitness {
public:
  explicit NetFlowFitness(DecisionMatrix reference, screening::ConditionSet conditions = {},
                          double penalty_per_violation = 2.0)
      : reference_(std::move(reference)), conditions_(std::move(conditions)), penalty_(penalty_per_violation) {
    if (reference_.alternative_count() < 1) throw ValidationError("fitness needs at least one reference alternative");
    if (!(reference_.total_weight() > 0)) throw ValidationError("all criterion weights are zero");
    screening::validate(conditions_, reference_);
    for (const auto& c : reference_.criteria()) condition_of_.push_back(conditions_.find(c.id));
  }

  NetFlowFitness(const NetFlowFitness& o)
      : NetFlowFitness(o.reference_, o.conditions_, o.penalty_) {}
  NetFlowFitness& operator=(const NetFlowFitness&) = delete;

  const DecisionMatrix& reference() const { return reference_; }
  std::size_t gene_count() const { return reference_.criterion_count(); }

  double operator()(std::span<const double> genes) const {
    const std::size_t m = reference_.criterion_count();
    if (genes.size() != m)
      throw ValidationError("chromosome has " + std::to_string(genes.size()) + " genes, expected " +
                            std::to_string(m));
    const auto& criteria = reference_.criteria();
    const double total = reference_.total_weight();
    const std::size_t n = reference_.alternative_count();
    double out = 0.0, in = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      double pref_cb = 0.0, pref_bc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double diff = genes[j] - reference_.value(b, j);
        if (criteria[j].direction == Direction::Minimize) diff = -diff;
        pref_cb += criteria[j].weight * promethee::preference_value(criteria[j].pref_fn, diff);
        pref_bc += criteria[j].weight * promethee::preference_value(criteria[j].pref_fn, -diff);
      }
      out += std::min(pref_cb / total, 1.0);
      in += std::min(pref_bc / total, 1.0);
    }
    const double others = static_cast<double>(n);
    double fitness = out / others - in / others;
    std::size_t violated = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (condition_of_[j] && !condition_of_[j]->satisfied(genes[j])) ++violated;
    if (violated) fitness -= penalty_ * static_cast<double>(violated);
    return fitness;
  }

private:
  DecisionMatrix reference_;
  screening::ConditionSet conditions_;
  double penalty_;
  std::vector<const screening::Condition*> condition_of_;
};

// Candidate net flow in the augmented (n+1)-alternative matrix, memoized.
inline double fitness(const Chromosome& c, const DecisionMatrix& reference, FitnessCache* cache = nullptr) {
  if (cache)
    if (auto hit = cache->lookup(c.genes)) return *hit;
  const double f = NetFlowFitness(reference)(c.genes);
  if (cache) cache->insert(c.genes, f);
  return f;
}

/// Per criterion: the condition's interval when one exists, otherwise the
/// observed [min, max] of the column. A one-sided condition takes its open
/// side from the observed column.
inline GeneBounds default_bounds(const DecisionMatrix& m, const screening::ConditionSet& conds = {}) {
  if (m.alternative_count() == 0) throw ValidationError("cannot derive gene bounds from an empty matrix");
  screening::validate(conds, m);
  GeneBounds bounds;
  for (std::size_t j = 0; j < m.criterion_count(); ++j) {
    const auto col = m.column(j);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    Interval iv{*mn, *mx};
    if (const auto* c = conds.find(m.criteria()[j].id)) {
      switch (c->kind) {
        case screening::ConditionKind::Interval: iv = {c->lo, c->hi}; break;
        case screening::ConditionKind::AtLeast: iv = {c->lo, std::max(c->lo, *mx)}; break;
        case screening::ConditionKind::AtMost: iv = {std::min(c->hi, *mn), c->hi}; break;
      }
    }
    bounds.intervals.push_back(iv);
  }
  return bounds;
}

inline Chromosome random_chromosome(const GeneBounds& bounds, Rng& rng) {
  Chromosome c;
  c.genes.reserve(bounds.size());
  for (const auto& iv : bounds.intervals) c.genes.push_back(rng.uniform(iv.lo, iv.hi));
  return c;
}

// Exact duplicates are re-drawn up to cfg.duplicate_rejection_attempts times,
// then kept.
inline Population init_population(const GAConfig& cfg, const GeneBounds& bounds, Rng& rng) {
  if (cfg.population_size == 0) throw ValidationError("population size must be positive");
  bounds.validate();
  Population pop;
  pop.reserve(cfg.population_size);
  while (pop.size() < cfg.population_size) {
    Chromosome c = random_chromosome(bounds, rng);
    for (std::size_t attempt = 0;
         attempt < cfg.duplicate_rejection_attempts && std::find(pop.begin(), pop.end(), c) != pop.end(); ++attempt)
      c = random_chromosome(bounds, rng);
    pop.push_back(std::move(c));
  }
  return pop;
}

inline Population init_population(const GAConfig& cfg, const GeneBounds& bounds) {
  Rng rng(cfg.seed);
  return init_population(cfg, bounds, rng);
}

/// Biased-wheel selection with replacement. Fitnesses are shifted by their
/// minimum plus 1e-6 of their range so net flows (which can be negative)
/// give positive slot widths; equal fitnesses give a uniform wheel.
inline std::vector<std::size_t> select_roulette(std::span<const double> fitnesses, std::size_t count, Rng& rng) {
  const std::size_t n = fitnesses.size();
  if (n == 0) throw ValidationError("cannot select from an empty population");
  if (count == 0) throw ValidationError("selection count must be at least 1");
  for (double f : fitnesses)
    if (!std::isfinite(f)) throw ValidationError("selection needs finite fitnesses");
  const auto [mn, mx] = std::minmax_element(fitnesses.begin(), fitnesses.end());
  const double range = *mx - *mn;
  std::vector<std::size_t> picks;
  picks.reserve(count);
  if (!(range > 0)) {
    for (std::size_t k = 0; k < count; ++k)
      picks.push_back(std::min(n - 1, static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n))));
    return picks;
  }
  const double eps = 1e-6 * range;
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += fitnesses[i] - *mn + eps;
    cumulative[i] = acc;
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double x = rng.uniform01() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    picks.push_back(std::min(n - 1, static_cast<std::size_t>(it - cumulative.begin())));
  }
  return picks;
}

/// Uniform crossover. One draw decides whether to cross (u < rate); when it
/// does, one draw per gene swaps that gene when below 0.5.
inline std::pair<Chromosome, Chromosome> crossover(const Chromosome& p1, const Chromosome& p2, double rate, Rng& rng) {
  if (p1.genes.size() != p2.genes.size())
    throw ValidationError("crossover parents have " + std::to_string(p1.genes.size()) + " and " +
                          std::to_string(p2.genes.size()) + " genes");
  std::pair<Chromosome, Chromosome> kids{p1, p2};
  if (!(rng.uniform01() < rate)) return kids;
  for (std::size_t i = 0; i < p1.genes.size(); ++i)
    if (rng.uniform01() < 0.5) std::swap(kids.first.genes[i], kids.second.genes[i]);
  return kids;
}

// Each gene is redrawn uniformly inside its interval with probability rate.
inline Chromosome mutate(Chromosome c, double rate, const GeneBounds& bounds, Rng& rng) {
  if (c.genes.size() != bounds.size())
    throw ValidationError("chromosome has " + std::to_string(c.genes.size()) + " genes, bounds have " +
                          std::to_string(bounds.size()));
  for (std::size_t i = 0; i < c.genes.size(); ++i) {
    if (rng.uniform01() < rate) c.genes[i] = rng.uniform(bounds.intervals[i].lo, bounds.intervals[i].hi);
  }
  return c;
}

namespace detail {

template <class Fitness>
std::vector<double> evaluate(const Population& pop, Fitness& f, FitnessCache* cache) {
  std::vector<double> out;
  out.reserve(pop.size());
  for (const auto& c : pop) {
    if (cache) {
      if (auto hit = cache->lookup(c.genes)) {
        out.push_back(*hit);
        continue;
      }
    }
    const double v = f(std::span<const double>(c.genes));
    if (cache) cache->insert(c.genes, v);
    out.push_back(v);
  }
  return out;
}

// Indices by descending fitness; earlier index wins ties.
inline std::vector<std::size_t> order_by_fitness(std::span<const double> fit) {
  std::vector<std::size_t> idx(fit.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
  return idx;
}

inline GenerationStats stats(std::size_t generation, std::span<const double> fit) {
  GenerationStats s{generation, -std::numeric_limits<double>::infinity(), 0.0};
  double sum = 0.0;
  for (double f : fit) {
    s.best = std::max(s.best, f);
    sum += f;
  }
  s.mean = sum / static_cast<double>(fit.size());
  return s;
}

}  // namespace detail

/// One full search. Each generation: keep the elites, draw parents from the
/// wheel, cross them pairwise, mutate the children, then keep the best
/// population_size of elites plus children. All random draws happen in that
/// fixed order from a single generator seeded with cfg.seed.
///
/// `fitness` is any callable double(std::span<const double>). `seeds` replace
/// the first chromosomes of the random initial population.
template <class Fitness>
GAReport run(const GAConfig& cfg, const GeneBounds& bounds, Fitness&& fitness,
             const std::vector<std::string>& gene_labels = {}, const Population& seeds = {}) {
  cfg.validate();
  bounds.validate();
  if (seeds.size() > cfg.population_size) throw ValidationError("more seed chromosomes than population slots");
  for (const auto& s : seeds)
    if (!bounds.contains(s)) throw ValidationError("seed chromosome lies outside the gene bounds");

  Rng rng(cfg.seed);
  FitnessCache cache;
  FitnessCache* cache_ptr = cfg.use_cache ? &cache : nullptr;

  Population pop = init_population(cfg, bounds, rng);
  std::copy(seeds.begin(), seeds.end(), pop.begin());
  std::vector<double> fit = detail::evaluate(pop, fitness, cache_ptr);

  GAReport report;
  auto track_best = [&](const Population& p, const std::vector<double>& f) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (f[i] > report.best_fitness) {
        report.best_fitness = f[i];
        report.best_chromosome = p[i];
      }
  };
  track_best(pop, fit);
  report.history.push_back(detail::stats(0, fit));

  const std::size_t n = cfg.population_size;
  const std::size_t child_count = n + (n % 2);
  for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
    const auto ranked = detail::order_by_fitness(fit);

    const auto parents = select_roulette(fit, child_count, rng);
    Population children;
    children.reserve(child_count);
    for (std::size_t k = 0; k + 1 < parents.size(); k += 2) {
      auto [c1, c2] = crossover(pop[parents[k]], pop[parents[k + 1]], cfg.crossover_rate, rng);
      children.push_back(std::move(c1));
      children.push_back(std::move(c2));
    }
    for (auto& c : children) c = mutate(std::move(c), cfg.mutation_rate, bounds, rng);
    const auto child_fit = detail::evaluate(children, fitness, cache_ptr);

    Population merged;
    std::vector<double> merged_fit;
    merged.reserve(cfg.elitism_count + children.size());
    for (std::size_t e = 0; e < cfg.elitism_count; ++e) {
      merged.push_back(pop[ranked[e]]);
      merged_fit.push_back(fit[ranked[e]]);
    }
    for (std::size_t c = 0; c < children.size(); ++c) {
      merged.push_back(std::move(children[c]));
      merged_fit.push_back(child_fit[c]);
    }
    const auto keep = detail::order_by_fitness(merged_fit);
    Population next;
    std::vector<double> next_fit;
    next.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      next.push_back(merged[keep[i]]);
      next_fit.push_back(merged_fit[keep[i]]);
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    track_best(pop, fit);
    report.history.push_back(detail::stats(gen, fit));
  }

  const auto order = detail::order_by_fitness(fit);
  const int width = static_cast<int>(std::to_string(n).size());
  std::vector<std::pair<std::string, double>> scores;
  for (std::size_t r = 0; r < order.size(); ++r) {
    char id[32];
    std::snprintf(id, sizeof id, "candidate-%0*zu", width, r + 1);
    scores.emplace_back(id, fit[order[r]]);
  }
  report.final_ranking = promethee::rank_by_score(std::move(scores));
  for (std::size_t j = 0; j < report.best_chromosome.genes.size(); ++j) {
    std::string label = j < gene_labels.size() ? gene_labels[j] : "gene-" + std::to_string(j + 1);
    report.best_profile.emplace_back(std::move(label), report.best_chromosome.genes[j]);
  }
  report.cache = cache.stats();
  return report;
}

// The hybrid: net-flow fitness against `reference`, optional condition penalty.
inline GAReport run(const GAConfig& cfg, const DecisionMatrix& reference, const GeneBounds& bounds,
                    const screening::ConditionSet& conditions = {}, const Population& seeds = {}) {
  if (bounds.size() != reference.criterion_count())
    throw ValidationError("gene bounds have " + std::to_string(bounds.size()) + " intervals, matrix has " +
                          std::to_string(reference.criterion_count()) + " criteria");
  NetFlowFitness f(reference, conditions);
  std::vector<std::string> labels;
  for (const auto& c : reference.criteria()) labels.push_back(c.id);
  return run(cfg, bounds, f, labels, seeds);
}

}  // namespace locus::ga
