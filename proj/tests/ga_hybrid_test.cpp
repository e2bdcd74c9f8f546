#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "locus/ga_hybrid.hpp"
#include "test_helpers.hpp"

namespace locus::ga {
namespace {

using testing::alt;
using testing::crit;

GeneBounds unit_bounds(std::size_t genes) { return GeneBounds{std::vector<Interval>(genes, Interval{0.0, 1.0})}; }

// Observed bounds widened by one unit so strictly dominating profiles are reachable.
GeneBounds widened(const DecisionMatrix& m) {
  auto b = default_bounds(m);
  for (auto& iv : b.intervals) {
    iv.lo -= 1;
    iv.hi += 1;
  }
  return b;
}

Chromosome dominating(const DecisionMatrix& m, double margin) {
  const auto b = default_bounds(m);
  Chromosome c;
  for (std::size_t j = 0; j < m.criterion_count(); ++j)
    c.genes.push_back(m.criteria()[j].direction == Direction::Maximize ? b.intervals[j].hi + margin
                                                                      : b.intervals[j].lo - margin);
  return c;
}

TEST(DefaultBounds, ConditionIntervalOrObservedRange) {
  const auto m = testing::med10();
  const auto b = default_bounds(m, testing::med10_config().conditions);
  const auto infra1 = m.criterion_index("C_Infra1"), soc1 = m.criterion_index("C_Soc1"),
             econ1 = m.criterion_index("C_Econ1");
  EXPECT_EQ(b.intervals[infra1].lo, 828.7);
  EXPECT_EQ(b.intervals[infra1].hi, 7429.2);
  EXPECT_EQ(b.intervals[soc1].lo, 1.0);
  EXPECT_EQ(b.intervals[soc1].hi, 9.0);
  EXPECT_EQ(b.intervals[econ1].lo, 4.0);
  EXPECT_EQ(b.intervals[econ1].hi, 16.03);
}

TEST(DefaultBounds, SingleAlternativeIsDegenerate) {
  DecisionMatrix m({crit("c1"), crit("c2")}, {alt("a", {3, -1})});
  const auto b = default_bounds(m);
  EXPECT_EQ(b.intervals[0].lo, 3.0);
  EXPECT_EQ(b.intervals[0].hi, 3.0);
  EXPECT_EQ(b.intervals[1].lo, -1.0);
}

TEST(InitPopulation, DeterministicAndInBounds) {
  GAConfig cfg;
  cfg.population_size = 40;
  cfg.seed = 7;
  const auto b = unit_bounds(5);
  const auto p1 = init_population(cfg, b), p2 = init_population(cfg, b);
  EXPECT_EQ(p1, p2);
  ASSERT_EQ(p1.size(), 40u);
  for (const auto& c : p1) EXPECT_TRUE(b.contains(c));
}

TEST(InitPopulation, DegenerateBoundsGiveIdenticalChromosomes) {
  GAConfig cfg;
  cfg.population_size = 5;
  GeneBounds b{{Interval{2.0, 2.0}, Interval{-1.0, -1.0}}};
  const auto pop = init_population(cfg, b);
  ASSERT_EQ(pop.size(), 5u);
  for (const auto& c : pop) EXPECT_EQ(c, (Chromosome{{2.0, -1.0}}));
}

TEST(InitPopulation, ZeroSizeIsAnError) {
  GAConfig cfg;
  cfg.population_size = 0;
  EXPECT_THROW(init_population(cfg, unit_bounds(1)), ValidationError);
}

TEST(InitPopulation, UniformMean) {
  GAConfig cfg;
  cfg.population_size = 10000;
  cfg.seed = 99;
  const auto pop = init_population(cfg, unit_bounds(1));
  double sum = 0;
  for (const auto& c : pop) sum += c.genes[0];
  EXPECT_NEAR(sum / 10000.0, 0.5, 0.02);
}

TEST(Roulette, SingleIndividualAlwaysChosen) {
  Rng rng(1);
  const std::vector<double> f{0.3};
  for (auto i : select_roulette(f, 100, rng)) EXPECT_EQ(i, 0u);
}

TEST(Roulette, EqualFitnessesAreUniform) {
  Rng rng(2);
  const std::vector<double> f{0.1, 0.1, 0.1, 0.1};
  const auto picks = select_roulette(f, 10000, rng);
  std::vector<int> counts(4, 0);
  for (auto i : picks) ++counts[i];
  const double sigma = std::sqrt(10000 * 0.25 * 0.75);
  for (int c : counts) EXPECT_NEAR(c, 2500.0, 3 * sigma);
}

TEST(Roulette, ShiftedProportions) {
  Rng rng(3);
  const std::vector<double> two{0.2, 0.6};
  // Slot widths eps : 0.4 + eps with eps = 1e-6 * 0.4, so the low one is
  // picked with probability about 1e-6.
  const auto picks = select_roulette(two, 100000, rng);
  const auto low = std::count(picks.begin(), picks.end(), 0u);
  EXPECT_LE(low, 3);

  const std::vector<double> three{0.0, 1.0, 3.0};
  const double eps = 3e-6, total = 4.0 + 3 * eps;
  const auto p3 = select_roulette(three, 100000, rng);
  for (std::size_t i = 1; i < 3; ++i) {
    const double p = (three[i] + eps) / total;
    const double sigma = std::sqrt(100000 * p * (1 - p));
    EXPECT_NEAR(static_cast<double>(std::count(p3.begin(), p3.end(), i)), 100000 * p, 3 * sigma);
  }
}

TEST(Roulette, Errors) {
  Rng rng(4);
  const std::vector<double> none, some{1.0};
  EXPECT_THROW(select_roulette(none, 1, rng), ValidationError);
  EXPECT_THROW(select_roulette(some, 0, rng), ValidationError);
}

TEST(Crossover, RateZeroCopiesParents) {
  Rng rng(5);
  const Chromosome a{{1, 2, 3}}, b{{4, 5, 6}};
  const auto [c1, c2] = crossover(a, b, 0.0, rng);
  EXPECT_EQ(c1, a);
  EXPECT_EQ(c2, b);
}

TEST(Crossover, IdenticalParents) {
  Rng rng(6);
  const Chromosome a{{1, 2, 3}};
  for (int i = 0; i < 20; ++i) {
    const auto [c1, c2] = crossover(a, a, 1.0, rng);
    EXPECT_EQ(c1, a);
    EXPECT_EQ(c2, a);
  }
}

TEST(Crossover, ReplaysSeededMask) {
  const Chromosome a{{1, 2, 3, 4, 5, 6, 7, 8}}, b{{-1, -2, -3, -4, -5, -6, -7, -8}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed), replay(seed);
    const auto [c1, c2] = crossover(a, b, 1.0, rng);
    replay.uniform01();  // the crossover decision
    for (std::size_t i = 0; i < a.genes.size(); ++i) {
      const bool swap = replay.uniform01() < 0.5;
      EXPECT_EQ(c1.genes[i], swap ? b.genes[i] : a.genes[i]);
      EXPECT_EQ(c2.genes[i], swap ? a.genes[i] : b.genes[i]);
    }
  }
}

TEST(Crossover, LengthMismatch) {
  Rng rng(7);
  EXPECT_THROW(crossover(Chromosome{{1}}, Chromosome{{1, 2}}, 1.0, rng), ValidationError);
}

TEST(Mutate, RateZeroAndDegenerateBoundsLeaveGenes) {
  Rng rng(8);
  const Chromosome c{{0.3, 0.7}};
  EXPECT_EQ(mutate(c, 0.0, unit_bounds(2), rng), c);
  GeneBounds fixed{{Interval{0.3, 0.3}, Interval{0.7, 0.7}}};
  EXPECT_EQ(mutate(c, 1.0, fixed, rng), c);
}

TEST(Mutate, MutatedFraction) {
  Rng rng(9);
  const Chromosome c{std::vector<double>(100, 0.5)};
  int changed = 0;
  for (int t = 0; t < 100; ++t) {
    const auto m = mutate(c, 0.1, unit_bounds(100), rng);
    for (double g : m.genes) changed += g != 0.5;
  }
  EXPECT_NEAR(changed / 10000.0, 0.1, 0.01);
}

TEST(Fitness, DominanceGivesPlusMinusOne) {
  const auto m = testing::med10();
  EXPECT_EQ(fitness(dominating(m, 1.0), m), 1.0);
  EXPECT_EQ(fitness(dominating(m, -1e9), m), -1.0);
}

TEST(Fitness, CloneMatchesAugmentedFlows) {
  const auto m = testing::med10();
  const auto france = m.alternatives()[m.alternative_index("France")];
  auto clone = france;
  clone.id = clone.name = "candidate";
  const auto t = promethee::flows(m.with_alternative(clone));
  const double f = fitness(Chromosome{france.values}, m);
  EXPECT_NEAR(f, t.row("candidate").phi_net, 1e-12);
  EXPECT_NEAR(f, t.row("France").phi_net, 1e-12);
}

TEST(Fitness, CacheReturnsIdenticalValues) {
  const auto m = testing::med10();
  FitnessCache cache;
  const Chromosome c{m.alternatives()[0].values};
  const double a = fitness(c, m, &cache), b = fitness(c, m, &cache), plain = fitness(c, m);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, plain);
  EXPECT_EQ(cache.stats().hits, 1u);
  EXPECT_EQ(cache.stats().misses, 1u);
}

TEST(Fitness, DimensionMismatch) {
  const auto m = testing::med10();
  EXPECT_THROW(fitness(Chromosome{{1, 2}}, m), ValidationError);
}

TEST(Fitness, ConditionPenalty) {
  DecisionMatrix m({crit("c1"), crit("c2")}, {alt("a", {1, 1}), alt("b", {2, 2})});
  screening::ConditionSet conds;
  conds.set("c1", screening::Condition::at_most(1.5));
  const NetFlowFitness plain(m), penalized(m, conds);
  const std::vector<double> genes{3, 3};
  EXPECT_EQ(plain(genes), 1.0);
  EXPECT_EQ(penalized(genes), -1.0);
}

TEST(Run, ZeroGenerationsReportsInitialBest) {
  const auto m = testing::med10();
  GAConfig cfg;
  cfg.population_size = 10;
  cfg.generations = 0;
  const auto b = default_bounds(m);
  const auto r = run(cfg, m, b);
  ASSERT_EQ(r.history.size(), 1u);
  const auto pop = init_population(cfg, b);
  double best = -10;
  for (const auto& c : pop) best = std::max(best, fitness(c, m));
  EXPECT_EQ(r.best_fitness, best);
  EXPECT_EQ(r.history[0].best, best);
}

TEST(Run, SeededDominatingProfileStaysBest) {
  const auto m = testing::med10();
  GAConfig cfg;
  cfg.population_size = 12;
  cfg.generations = 30;
  const auto r = run(cfg, m, widened(m), {}, {dominating(m, 0.5)});
  for (const auto& g : r.history) EXPECT_EQ(g.best, 1.0);
  EXPECT_EQ(r.best_fitness, 1.0);
}

TEST(Run, BestIsNondecreasingWithElitism) {
  const auto m = testing::med10();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GAConfig cfg;
    cfg.population_size = 16;
    cfg.generations = 60;
    cfg.elitism_count = 1;
    cfg.seed = seed;
    const auto r = run(cfg, m, default_bounds(m));
    for (std::size_t g = 1; g < r.history.size(); ++g) EXPECT_GE(r.history[g].best, r.history[g - 1].best);
  }
}

TEST(Run, CacheDoesNotChangeOutcome) {
  const auto m = testing::med10();
  GAConfig cfg;
  cfg.population_size = 20;
  cfg.generations = 40;
  auto off = cfg;
  off.use_cache = false;
  const auto b = default_bounds(m, testing::med10_config().conditions);
  const auto with = run(cfg, m, b, testing::med10_config().conditions);
  const auto without = run(off, m, b, testing::med10_config().conditions);
  EXPECT_TRUE(with.same_outcome(without));
  EXPECT_GT(with.cache.hits, 0u);
  EXPECT_EQ(without.cache.hits + without.cache.misses, 0u);
}

TEST(Run, SameSeedSameReport) {
  const auto m = testing::med10();
  GAConfig cfg;
  cfg.population_size = 15;
  cfg.generations = 25;
  cfg.seed = 1234;
  EXPECT_EQ(run(cfg, m, default_bounds(m)), run(cfg, m, default_bounds(m)));
}

TEST(Run, EveryGenerationRespectsBounds) {
  // A recording fitness sees every evaluated chromosome.
  const GeneBounds b{{Interval{-2, 3}, Interval{10, 11}, Interval{0, 0}}};
  GAConfig cfg;
  cfg.population_size = 9;
  cfg.generations = 20;
  cfg.use_cache = false;
  std::size_t evaluated = 0;
  bool all_inside = true;
  auto f = [&](std::span<const double> g) {
    ++evaluated;
    all_inside = all_inside && b.contains(Chromosome{{g.begin(), g.end()}});
    return g[0] + g[1];
  };
  const auto r = run(cfg, b, f);
  EXPECT_TRUE(all_inside);
  EXPECT_EQ(evaluated, 9u + 20u * 10u);  // odd population breeds one extra child
  EXPECT_EQ(r.final_ranking.entries.size(), 9u);
  EXPECT_EQ(r.final_ranking.entries.front().id, "candidate-1");
  EXPECT_EQ(r.best_profile.front().first, "gene-1");
}

TEST(Run, ConfigValidation) {
  GAConfig cfg;
  cfg.elitism_count = cfg.population_size;
  EXPECT_THROW(run(cfg, unit_bounds(1), [](std::span<const double>) { return 0.0; }), ValidationError);
  cfg = {};
  cfg.mutation_rate = 1.5;
  EXPECT_THROW(run(cfg, unit_bounds(1), [](std::span<const double>) { return 0.0; }), ValidationError);
}

}  // namespace
}  // namespace locus::ga
