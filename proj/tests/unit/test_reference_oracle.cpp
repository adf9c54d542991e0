#include <gtest/gtest.h>

#include <vector>

#include "pareto_tas/generators.hpp"
#include "pareto_tas/testing/reference_oracle.hpp"

using namespace pareto_tas;
using namespace pareto_tas::testing;

namespace {

const Matrix kTwoPointsAndOrigin{{1, 2}, {2, 1}, {0, 0}};
const std::vector<double> kUnit3{1, 1, 1};

}  // namespace

TEST(ExhaustiveAdd, TwoPointsAndOrigin) {
  const OracleReport r = exhaustive_add(kTwoPointsAndOrigin, kUnit3, pareto_set(kTwoPointsAndOrigin));
  EXPECT_DOUBLE_EQ(r.cost, 0.5);
  EXPECT_EQ(r.argmin, "k0=2 phi=(0,1)");
}

TEST(ExhaustiveAdd, AgreesWithTheDenseGrid) {
  const OracleReport grid = grid_minimize_g(kTwoPointsAndOrigin, kUnit3, 2, Box{{-1, -1}, {3, 3}}, 1e-3);
  const OracleReport ex = exhaustive_add(kTwoPointsAndOrigin, kUnit3, pareto_set(kTwoPointsAndOrigin));
  EXPECT_GE(grid.cost, ex.cost - 1e-12);
  EXPECT_LE(grid.cost - ex.cost, 10 * 1e-3);
}

TEST(ExhaustiveAdd, EmptyFrontCostsNothing) {
  const Matrix mu{{0.3, 0.7}};
  const OracleReport r = exhaustive_add(mu, std::vector<double>{1.0}, ParetoSet{});
  EXPECT_EQ(r.cost, 0.0);
}

TEST(ExhaustiveAdd, OneObjectiveTwoArms) {
  const Matrix mu{{0}, {1}};
  EXPECT_DOUBLE_EQ(exhaustive_add(mu, std::vector<double>{1, 1}, pareto_set(mu)).cost, 0.25);
}

TEST(ExhaustiveAdd, NoDominatedArmIsInfinite) {
  const Matrix mu{{0, 1}, {1, 0}};
  EXPECT_TRUE(std::isinf(exhaustive_add(mu, std::vector<double>{1, 1}, pareto_set(mu)).cost));
}

TEST(ExhaustiveAdd, RefusesPastTheBudget) {
  std::mt19937_64 rng(1);
  const Matrix front = generators::sphere_quadrant_plus_origin(13, 3, rng);  // 3^13 > 10^6
  EXPECT_THROW(exhaustive_add(front, std::vector<double>(14, 1.0), pareto_set(front)), BudgetExceeded);
}

TEST(ExhaustiveAdd, GridUpperBoundsAndTracksIt) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    Matrix mu = generators::uniform_means(4, 2, rng, 0.0, 2.0);
    mu(3, 0) = 0.0;
    mu(3, 1) = 0.0;
    const std::vector<double> w = generators::simplex_weights(4, rng);
    const ParetoSet p = pareto_set(mu);
    const OracleReport ex = exhaustive_add(mu, w, p);
    const OracleReport grid = grid_minimize_g(mu, w, 3, Box{{-1, -1}, {3, 3}}, 2e-3);
    // Only arm 3 is guaranteed dominated; other dominated arms can only lower ex.
    EXPECT_GE(grid.cost, ex.cost - 1e-12);
    if (p.size() == 3) { EXPECT_LE(grid.cost - ex.cost, 10 * 2e-3); }
  }
}

TEST(ExhaustiveRemove, MatchesClosedForm) {
  const Matrix mu{{2, 0}, {0, 2}};
  const OracleReport r = exhaustive_remove(mu, std::vector<double>{1, 3}, pareto_set(mu));
  EXPECT_DOUBLE_EQ(r.cost, 1.5);
}

TEST(ExhaustiveMinAlt, TwoPointsAndOrigin) {
  EXPECT_DOUBLE_EQ(exhaustive_min_alt(kTwoPointsAndOrigin, kUnit3).cost, 0.25);
}

TEST(BellmanFord, Examples) {
  // lambda^1 - lambda^0 <= 1 and lambda^0 - lambda^1 <= -1: zero cycle.
  EXPECT_TRUE(bellman_ford_feasible(2, std::vector<Edge>{{0, 1, 1.0}, {1, 0, -1.0}}));
  EXPECT_FALSE(bellman_ford_feasible(2, std::vector<Edge>{{0, 1, -1.0}, {1, 0, -1.0}}));
  EXPECT_TRUE(bellman_ford_feasible(3, std::vector<Edge>{}));
  EXPECT_THROW(bellman_ford_feasible(2, std::vector<Edge>(10'001, Edge{0, 1, 0.0})), BudgetExceeded);
}

TEST(BellmanFord, AllPairsOnAChain) {
  const AllPairs ap = bellman_ford_all_pairs(3, std::vector<Edge>{{0, 1, 2.0}, {1, 2, -0.5}});
  EXPECT_TRUE(ap.reachable(0, 2));
  EXPECT_DOUBLE_EQ(ap.distance(0, 2), 1.5);
  EXPECT_FALSE(ap.reachable(2, 0));
  EXPECT_TRUE(ap.reachable(1, 1));
  EXPECT_EQ(ap.distance(1, 1), 0.0);
}

TEST(GridMinimize, UndominatedArmStaysPut) {
  const Matrix mu{{1, 0}, {0, 1}};
  const OracleReport r = grid_minimize_g(mu, std::vector<double>{1, 1}, 0, Box{{0, -1}, {2, 1}}, 0.5);
  EXPECT_EQ(r.cost, 0.0);
}

TEST(GridMinimize, FreeArmVanishesAsTheBoxGrows) {
  const std::vector<double> w{1, 1, 0};
  double previous = INFINITY;
  for (double hi : {1.0, 1.5, 2.0, 3.0}) {
    const double c = grid_minimize_g(kTwoPointsAndOrigin, w, 2, Box{{0, 0}, {hi, hi}}, 0.25).cost;
    EXPECT_LE(c, previous);
    previous = c;
  }
  EXPECT_EQ(previous, 0.0);
}

TEST(GridMinimize, RefusesPastTheBudget) {
  EXPECT_THROW(grid_minimize_g(kTwoPointsAndOrigin, kUnit3, 2, Box{{0, 0}, {100, 100}}, 1e-3), BudgetExceeded);
  EXPECT_THROW(grid_minimize_g(kTwoPointsAndOrigin, kUnit3, 2, Box{{0}, {1}}, 0.1), std::invalid_argument);
}
