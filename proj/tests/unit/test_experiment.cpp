#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pareto_tas/datasets.hpp"
#include "pareto_tas/experiment.hpp"
#include "pareto_tas/generators.hpp"
#include "pareto_tas/instance_io.hpp"

using namespace pareto_tas;

namespace {

BanditInstance small_instance() {
  BanditInstance inst;
  inst.means = Matrix{{1.0, 0.0}, {0.0, 1.0}, {0.2, 0.1}};
  inst.variances = {1.0, 1.0};
  return inst;
}

std::string csv_of(std::size_t workers) {
  LearnerConfig cfg;
  const auto records = simulate(small_instance(), cfg, 12, 7, workers);
  std::ostringstream out;
  write_runs_csv(out, records, 3);
  return out.str();
}

RunRecord record(std::uint64_t tau, bool correct) {
  RunRecord r;
  r.tau = tau;
  r.correct = correct;
  return r;
}

}  // namespace

TEST(Simulate, CsvIsIndependentOfWorkerCount) {
  const std::string one = csv_of(1);
  EXPECT_EQ(one, csv_of(3));
  EXPECT_EQ(one.rfind("seed,tau,correct,n0,n1,n2\n", 0), 0u);
  EXPECT_EQ(std::count(one.begin(), one.end(), '\n'), 13);
}

TEST(Simulate, RejectsZeroRuns) {
  EXPECT_THROW(simulate(small_instance(), LearnerConfig{}, 0, 1, 1), std::invalid_argument);
}

TEST(Workers, EnvironmentOverrideWins) {
  ::setenv("PARETO_TAS_THREADS", "3", 1);
  EXPECT_EQ(resolve_workers(8), 3u);
  ::unsetenv("PARETO_TAS_THREADS");
  EXPECT_EQ(resolve_workers(8), 8u);
  EXPECT_GE(resolve_workers(0), 1u);
}

TEST(Workers, ParallelForRethrows) {
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 4) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(Summary, QuantilesAndRates) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
  EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);

  const SimulationSummary s = summarize({record(10, true), record(20, false), record(30, true), record(40, true)});
  EXPECT_EQ(s.runs, 4u);
  EXPECT_DOUBLE_EQ(s.mean_tau, 25.0);
  EXPECT_NEAR(s.std_tau, std::sqrt(500.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(s.error_rate, 0.25);
  ASSERT_EQ(s.quantiles.size(), 5u);
  EXPECT_DOUBLE_EQ(s.quantiles[2].second, 25.0);

  const auto j = summary_json(s, 0.1, 100.0);
  EXPECT_DOUBLE_EQ(j.at("log_inv_delta_t_star").get<double>(), std::log(10.0) * 100.0);
  EXPECT_FALSE(summary_json(s, 0.1).contains("t_star"));
}

TEST(InstanceIo, CovidRoundTripIsExact) {
  const BanditInstance covid = datasets::covid();
  const BanditInstance back = parse_instance(dump_instance(covid));
  EXPECT_EQ(back.means, covid.means);
  EXPECT_EQ(back.variances, covid.variances);
  EXPECT_EQ(back.labels, covid.labels);
}

TEST(InstanceIo, RejectsMalformedInput) {
  EXPECT_THROW(parse_instance(R"({"means": [[1, 2]]})"), std::invalid_argument);
  EXPECT_THROW(parse_instance(R"({"means": [[1, 2], [3]], "variances": [1, 1]})"), std::invalid_argument);
  EXPECT_THROW(parse_instance(R"({"means": [[1]], "variances": [-1]})"), std::invalid_argument);
  EXPECT_THROW(read_instance_file("/nonexistent/instance.json"), std::runtime_error);

  const auto path = std::filesystem::temp_directory_path() / "pareto_tas_bad_instance.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(read_instance_file(path.string()), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(InstanceIo, LoadsByNameOrPath) {
  EXPECT_EQ(load_instance("covid").num_arms(), datasets::covid().num_arms());
  const auto path = std::filesystem::temp_directory_path() / "pareto_tas_small_instance.json";
  std::ofstream(path) << dump_instance(small_instance());
  EXPECT_EQ(load_instance(path.string()).means, small_instance().means);
  std::filesystem::remove(path);
}

TEST(Bench, LogLogSlopeOfAPowerLaw) {
  std::vector<BenchRow> rows;
  for (std::size_t p : {4u, 8u, 16u, 32u}) rows.push_back({p, 2, 1e-6 * std::pow(p, 2.5), 0.0});
  EXPECT_NEAR(loglog_slope(rows), 2.5, 1e-12);
  EXPECT_THROW(loglog_slope({rows[0]}), std::invalid_argument);
}

TEST(Bench, PointProducesPositiveTimings) {
  const BenchRow r = bench_point(4, 2, 3, 1, OraclePath::Generic, generators::Geometry::SphereQuadrantPlusOrigin);
  EXPECT_EQ(r.p, 4u);
  EXPECT_GT(r.mean_seconds, 0.0);
}

TEST(Generators, FrontRowsAreExactlyTheParetoSet) {
  std::mt19937_64 rng(9);
  for (auto g : {generators::Geometry::SphereQuadrantPlusOrigin, generators::Geometry::Staircase2d}) {
    for (std::size_t p = 1; p <= 20; ++p) {
      const Matrix mu = generators::generate(g, p, 2, rng);
      ASSERT_EQ(mu.rows(), p + 1);
      std::vector<std::size_t> expected(p);
      std::iota(expected.begin(), expected.end(), 0);
      EXPECT_EQ(pareto_set(mu).indices, expected);
    }
  }
  EXPECT_THROW(generators::parse_geometry("torus"), std::invalid_argument);
}

TEST(Verify, PassesCleanAndCatchesTheInjectedFault) {
  EXPECT_TRUE(verify_all(30, 5).passed());
  OracleOptions faulty;
  faulty.inject_remove_sign_fault = true;
  EXPECT_FALSE(verify_all(100, 5, faulty).passed());
  const VerifyReport empty = verify_all(0, 5);
  EXPECT_TRUE(empty.vacuous);
}
