#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "pareto_tas/learner.hpp"

using namespace pareto_tas;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

BanditInstance one_dim(double a, double b) { return BanditInstance::unit_variance(Matrix{{a}, {b}}); }

}  // namespace

TEST(Hedge, StartsUniform) {
  const Hedge h(4);
  for (double w : h.weights()) EXPECT_DOUBLE_EQ(w, 0.25);
  EXPECT_THROW(Hedge(0), std::invalid_argument);
}

TEST(Hedge, ZeroGradientKeepsWeights) {
  Hedge h(3);
  h.update(std::vector<double>{0.3, 0.1, 0.0});
  const auto before = h.weights();
  h.update(std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_EQ(h.weights(), before);
}

TEST(Hedge, OneStepClosedForm) {
  Hedge h(2);
  h.update(std::vector<double>{1.0, 0.0});
  const double eta = std::sqrt(std::log(2.0) / 2.0);
  EXPECT_DOUBLE_EQ(h.learning_rate(), eta);
  EXPECT_NEAR(h.weights()[0], 0.6430679600112766, 1e-15);
  EXPECT_NEAR(h.weights()[1], 1.0 / (1.0 + std::exp(eta)), 1e-15);
}

TEST(Hedge, ConstantGradientConcentratesOnTheLargestCoordinate) {
  Hedge h(3);
  for (int t = 0; t < 10'000; ++t) h.update(std::vector<double>{0.2, 1.0, 0.5});
  EXPECT_GT(h.weights()[1], 0.99);
}

TEST(Hedge, StaysInTheOpenSimplex) {
  Hedge h(5);
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1e-3);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> g(5);
    for (double& x : g) x = e(rng);
    g[t % 5] *= 100.0;
    h.update(g);
    EXPECT_NEAR(sum(h.weights()), 1.0, 1e-12);
    for (double w : h.weights()) EXPECT_GT(w, 0.0);
  }
}

TEST(Hedge, RejectsBadGradients) {
  Hedge h(2);
  EXPECT_THROW(h.update(std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(h.update(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(h.update(std::vector<double>{INFINITY, 0.0}), std::invalid_argument);
}

TEST(ChooseArm, ColdStartPicksArmZero) {
  const LearnerState s(4, 2);
  EXPECT_EQ(choose_arm(s), 0u);
}

TEST(ChooseArm, ForcedExplorationTrigger) {
  LearnerState s(2, 1);
  s.t = 100;
  s.counts = {100, 0};
  s.target = {100.0, 0.0};
  EXPECT_EQ(choose_arm(s), 1u);
}

TEST(ChooseArm, StarvedArmsLeastSampledFirst) {
  LearnerState s(4, 1);
  s.t = 400;  // threshold sqrt(400) - 2 = 18
  s.counts = {370, 12, 3, 15};
  s.target = {0, 0, 0, 400};
  EXPECT_EQ(choose_arm(s), 2u);
}

TEST(ChooseArm, TrackingFollowsTheLargestDeficitAndBreaksTiesLow) {
  LearnerState s(3, 1);
  s.t = 30;
  s.counts = {10, 10, 10};
  s.target = {10.0, 10.0, 10.0};
  EXPECT_EQ(choose_arm(s), 0u);
  s.target = {9.0, 12.5, 8.5};
  EXPECT_EQ(choose_arm(s), 1u);
}

TEST(Stopping, ThresholdValue) {
  EXPECT_NEAR(stopping_threshold(10'000, 0.1), 4.522922756122173, 1e-12);
}

TEST(Stopping, NotReadyBeforeEveryArmIsSampled) {
  LearnerState s(2, 1);
  s.observe(0, std::vector<double>{1.0});
  const StoppingCheck c = stopping_statistic(s, std::vector<double>{1.0}, 0.1);
  EXPECT_FALSE(c.ready);
  EXPECT_FALSE(c.stop());
}

TEST(Stopping, TwoArmStatisticIsQuarterOfCount) {
  for (std::uint64_t n : {1u, 7u, 40u, 250u}) {
    LearnerState s(2, 1);
    s.t = 2 * n;
    s.counts = {n, n};
    s.sums(0, 0) = 0.0;
    s.sums(1, 0) = static_cast<double>(n);
    const StoppingCheck c = stopping_statistic(s, std::vector<double>{1.0}, 0.1);
    ASSERT_TRUE(c.ready);
    EXPECT_NEAR(c.statistic, n / 4.0, 1e-12 * n);
    const double beta = std::log(std::log(1.0 + 2.0 * n) / 0.1);
    EXPECT_EQ(c.stop(), n / 4.0 > beta);
  }
}

TEST(Stopping, NearTieDoesNotStop) {
  LearnerState s(2, 1);
  s.t = 20;
  s.counts = {10, 10};
  s.sums(0, 0) = 10.0;
  s.sums(1, 0) = 10.01;
  EXPECT_FALSE(stopping_statistic(s, std::vector<double>{1.0}, 0.1).stop());
}

TEST(Stopping, StatisticIsHomogeneousInCounts) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> n(1, 500);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    LearnerState s(5, 2);
    for (std::size_t k = 0; k < 5; ++k) {
      s.counts[k] = n(rng);
      s.t += s.counts[k];
      for (std::size_t j = 0; j < 2; ++j) s.sums(k, j) = g(rng) * static_cast<double>(s.counts[k]);
    }
    const std::vector<double> var{0.7, 1.3};
    const double z = stopping_statistic(s, var, 0.1).statistic;
    BanditInstance est;
    est.means = s.empirical_means();
    est.variances = var;
    std::vector<double> freq(5);
    for (std::size_t k = 0; k < 5; ++k) freq[k] = static_cast<double>(s.counts[k]) / static_cast<double>(s.t);
    EXPECT_NEAR(z, static_cast<double>(s.t) * min_alt_cost(est, freq).cost, 1e-12 * z);
  }
}

TEST(LearnerConfig, Validation) {
  LearnerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.delta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.delta = 0.1;
  c.gradient_period = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.gradient_period = 10;
  c.max_steps = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Run, SingleArmHasNoAlternative) {
  EXPECT_THROW(run(BanditInstance::unit_variance(Matrix{{1.0, 2.0}}), LearnerConfig{}), AltEmptyError);
}

TEST(Run, WideGapIsSolvedQuicklyAndCorrectly) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    LearnerConfig cfg;
    cfg.seed = seed;
    const RunRecord r = run(one_dim(0.0, 5.0), cfg);
    EXPECT_TRUE(r.correct);
    EXPECT_FALSE(r.aborted);
    EXPECT_LE(r.tau, 200u);
    EXPECT_EQ(r.answer.indices, (std::vector<std::size_t>{1}));
    EXPECT_EQ(std::accumulate(r.counts.begin(), r.counts.end(), std::uint64_t{0}), r.tau);
  }
}

TEST(Run, Deterministic) {
  BanditInstance inst;
  inst.means = Matrix{{1.0, 0.2}, {0.4, 1.1}, {0.3, 0.1}, {0.9, 0.9}};
  inst.variances = {0.5, 0.8};
  LearnerConfig cfg;
  cfg.seed = 99;
  const RunRecord a = run(inst, cfg);
  const RunRecord b = run(inst, cfg);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.answer, b.answer);
}

TEST(Run, AbortsAtTheStepCap) {
  LearnerConfig cfg;
  cfg.max_steps = 100;
  const RunRecord r = run(one_dim(0.0, 1e-3), cfg);
  EXPECT_TRUE(r.aborted);
  EXPECT_FALSE(r.correct);
  EXPECT_EQ(r.tau, 100u);
}

TEST(Run, ForcedExplorationKeepsEveryArmGrowing) {
  // The sampling loop of run(), instrumented.
  BanditInstance inst;
  inst.means = Matrix{{1.0, 0.0}, {0.0, 1.0}, {0.2, 0.2}, {0.5, 0.4}, {0.45, 0.5}};
  inst.variances = {1.0, 1.0};
  const std::size_t K = 5;
  LearnerState s(K, 2);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  BanditInstance est;
  est.variances = inst.variances;
  for (int step = 0; step < 20'000; ++step) {
    for (std::size_t k = 0; k < K; ++k) s.target[k] += s.hedge.weights()[k];
    const std::size_t arm = choose_arm(s);
    s.observe(arm, std::vector<double>{inst.means(arm, 0) + noise(rng), inst.means(arm, 1) + noise(rng)});
    ASSERT_EQ(std::accumulate(s.counts.begin(), s.counts.end(), std::uint64_t{0}), s.t);
    if (s.t >= K * K) {
      const double floor = std::sqrt(static_cast<double>(s.t)) - K / 2.0 - 1.0;
      ASSERT_GE(static_cast<double>(*std::min_element(s.counts.begin(), s.counts.end())), floor) << s.t;
    }
    if (!s.all_sampled()) continue;
    if (!s.last_oracle || s.t % 10 == 0) {
      est.means = s.empirical_means();
      s.last_oracle = min_alt_cost(est, s.hedge.weights());
    }
    s.hedge.update(s.last_oracle->gradient);
    ASSERT_NEAR(sum(s.hedge.weights()), 1.0, 1e-12);
  }
}

TEST(SolveTStar, TwoArmClosedForm) {
  // value(w) = w0 w1 / (2 (w0 + w1)) peaks at 1/8 for w = (1/2, 1/2).
  const TStarResult r = solve_t_star(one_dim(0.0, 1.0), 200'000, 1e-3);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.t_star, 8.0, 8.0 * 1e-3);
  EXPECT_GE(r.t_star, 8.0 - 1e-9);
  EXPECT_LE(r.lower, 0.125 + 1e-15);
  EXPECT_GE(r.upper, 0.125 - 1e-15);
  EXPECT_NEAR(r.weights[0], 0.5, 0.02);
}

TEST(SolveTStar, BoundsBracketTheValueOfTheReturnedWeights) {
  BanditInstance inst;
  inst.means = Matrix{{1.0, 0.0}, {0.0, 1.0}, {0.3, 0.4}};
  inst.variances = {1.0, 2.0};
  const TStarResult r = solve_t_star(inst, 20'000, 0.0);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 20'000u);
  EXPECT_NEAR(min_alt_cost(inst, r.weights).cost, r.lower, 1e-15);
  EXPECT_LE(r.lower, r.upper);
}
