#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pareto_tas/best_response.hpp"
#include "pareto_tas/cell_tree.hpp"
#include "pareto_tas/generators.hpp"
#include "pareto_tas/learner.hpp"
#include "pareto_tas/model.hpp"
#include "pareto_tas/testing/reference_oracle.hpp"

namespace pareto_tas {

// PARETO_TAS_THREADS wins over the requested count; 0 means hardware concurrency.
inline std::size_t resolve_workers(std::size_t requested) {
  if (const char* env = std::getenv("PARETO_TAS_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Runs job(i) for i in [0, n) on a pool; the first exception is rethrown.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

/**
 * Independent identification runs; run i uses seed master_seed + i so the
 * records never depend on the worker count. Records come back in run order.
 */
inline std::vector<RunRecord> simulate(const BanditInstance& instance, const LearnerConfig& base,
                                       std::size_t runs, std::uint64_t master_seed, std::size_t workers) {
  if (runs == 0) throw std::invalid_argument("simulate: run count must be at least 1");
  instance.validate();
  base.validate();
  std::vector<RunRecord> records(runs);
  parallel_for(runs, resolve_workers(workers), [&](std::size_t i) {
    LearnerConfig cfg = base;
    cfg.seed = master_seed + i;
    records[i] = run(instance, cfg);
  });
  return records;
}

// seed,tau,correct,n0..n{K-1}; LF line endings.
inline void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records, std::size_t num_arms) {
  out << "seed,tau,correct";
  for (std::size_t k = 0; k < num_arms; ++k) out << ",n" << k;
  out << '\n';
  for (const RunRecord& r : records) {
    out << r.seed << ',' << r.tau << ',' << (r.correct ? 1 : 0);
    for (std::uint64_t n : r.counts) out << ',' << n;
    out << '\n';
  }
}

// Linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct SimulationSummary {
  std::size_t runs = 0;
  double mean_tau = 0.0;
  double std_tau = 0.0;  // sample standard deviation
  double error_rate = 0.0;
  std::size_t aborted = 0;
  std::vector<std::pair<double, double>> quantiles;  // (q, tau_q)
};

inline SimulationSummary summarize(const std::vector<RunRecord>& records) {
  SimulationSummary s;
  s.runs = records.size();
  if (records.empty()) return s;
  std::vector<double> taus;
  std::size_t wrong = 0;
  for (const RunRecord& r : records) {
    taus.push_back(static_cast<double>(r.tau));
    if (!r.correct) ++wrong;
    if (r.aborted) ++s.aborted;
  }
  const double n = static_cast<double>(taus.size());
  for (double t : taus) s.mean_tau += t;
  s.mean_tau /= n;
  if (taus.size() > 1) {
    double ss = 0.0;
    for (double t : taus) ss += (t - s.mean_tau) * (t - s.mean_tau);
    s.std_tau = std::sqrt(ss / (n - 1.0));
  }
  s.error_rate = static_cast<double>(wrong) / n;
  for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) s.quantiles.emplace_back(q, quantile(taus, q));
  return s;
}

inline nlohmann::json summary_json(const SimulationSummary& s, double delta,
                                   std::optional<double> t_star = std::nullopt) {
  nlohmann::json j;
  j["runs"] = s.runs;
  j["delta"] = delta;
  j["mean_tau"] = s.mean_tau;
  j["std_tau"] = s.std_tau;
  j["error_rate"] = s.error_rate;
  j["aborted"] = s.aborted;
  nlohmann::json q = nlohmann::json::object();
  for (const auto& [level, value] : s.quantiles) {
    std::ostringstream key;
    key << level;
    q[key.str()] = value;
  }
  j["quantiles"] = q;
  if (t_star) {
    j["t_star"] = *t_star;
    j["log_inv_delta_t_star"] = std::log(1.0 / delta) * *t_star;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Timing

enum class OraclePath { Auto, Generic, Fast2d };

struct BenchRow {
  std::size_t p = 0;
  std::size_t d = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
};

struct RatioRow {
  std::size_t p = 0;
  double t2 = 0.0;
  double tn = 0.0;
  double ratio = 0.0;
};

namespace detail {

// Per-call seconds, repeating short calls until the batch is long enough to time.
template <typename Call>
double time_call(Call&& call, double min_batch_seconds = 2e-4) {
  using clock = std::chrono::steady_clock;
  for (std::size_t reps = 1;; reps *= 2) {
    const auto start = clock::now();
    for (std::size_t r = 0; r < reps; ++r) call();
    const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    if (elapsed >= min_batch_seconds || reps >= (1u << 20)) return elapsed / static_cast<double>(reps);
  }
}

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0};
}

inline volatile double bench_sink = 0.0;

}  // namespace detail

/**
 * Oracle-only timing on fresh instances of the given geometry (K = p + 1)
 * with fresh simplex weights per sample.
 */
inline BenchRow bench_point(std::size_t p, std::size_t d, std::size_t samples, std::uint64_t seed,
                            OraclePath path, generators::Geometry geometry) {
  if (samples == 0) throw std::invalid_argument("bench_point: samples must be positive");
  std::mt19937_64 rng(seed);
  OracleOptions opts;
  opts.use_2d_fast_path = path != OraclePath::Generic;
  std::vector<double> times;
  times.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const UnitScaling scaled{generators::generate(geometry, p, d, rng), std::vector<double>(d, 1.0)};
    const std::vector<double> w = generators::simplex_weights(p + 1, rng);
    times.push_back(detail::time_call([&] { detail::bench_sink = min_alt_cost(scaled, w, opts).cost; }));
  }
  const auto [m, sd] = detail::mean_std(times);
  return {p, d, m, sd};
}

inline std::vector<BenchRow> bench(const std::vector<std::pair<std::size_t, std::size_t>>& grid,
                                   std::size_t samples, std::uint64_t seed, OraclePath path) {
  std::vector<BenchRow> rows;
  for (const auto& [p, d] : grid) {
    rows.push_back(bench_point(p, d, samples, seed + 1000003ULL * p + d, path,
                               generators::Geometry::SphereQuadrantPlusOrigin));
  }
  return rows;
}

// 2D staircase instances: fast path versus generic path on the same draws.
inline std::vector<RatioRow> bench_ratio_2d(const std::vector<std::size_t>& ps, std::size_t samples,
                                            std::uint64_t seed) {
  std::vector<RatioRow> rows;
  for (std::size_t p : ps) {
    const BenchRow fast = bench_point(p, 2, samples, seed + p, OraclePath::Fast2d, generators::Geometry::Staircase2d);
    const BenchRow gen = bench_point(p, 2, samples, seed + p, OraclePath::Generic, generators::Geometry::Staircase2d);
    rows.push_back({p, fast.mean_seconds, gen.mean_seconds, gen.mean_seconds / fast.mean_seconds});
  }
  return rows;
}

// Least-squares slope of log(mean_seconds) against log(p).
inline double loglog_slope(const std::vector<BenchRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(rows.size());
  for (const BenchRow& r : rows) {
    const double x = std::log(static_cast<double>(r.p));
    const double y = std::log(r.mean_seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "p,d,mean_seconds,std_seconds\n";
  out.precision(9);
  for (const BenchRow& r : rows) out << r.p << ',' << r.d << ',' << r.mean_seconds << ',' << r.std_seconds << '\n';
}

inline void write_ratio_csv(std::ostream& out, const std::vector<RatioRow>& rows) {
  out << "p,t2,tn,ratio\n";
  out.precision(9);
  for (const RatioRow& r : rows) out << r.p << ',' << r.t2 << ',' << r.tn << ',' << r.ratio << '\n';
}

// ---------------------------------------------------------------------------
// Verification sweeps against the brute-force references

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest observed discrepancy
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

namespace detail {

inline void record(SuiteResult& s, double gap, double tol, const std::string& what) {
  ++s.cases;
  s.worst = std::max(s.worst, gap);
  if (!(gap <= tol)) {
    if (s.failures == 0) s.first_failure = what;
    ++s.failures;
  }
}

inline std::string case_label(std::uint64_t seed, std::size_t i) {
  return "seed " + std::to_string(seed) + " case " + std::to_string(i);
}

// Random unit-variance instance with 2 <= K <= 8, p <= 5, d <= 3; half of the
// draws sit on a coarse lattice to exercise ties.
inline Matrix random_small_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dk(2, 8), dd(1, 3);
  std::bernoulli_distribution lattice(0.5);
  while (true) {
    const std::size_t K = dk(rng);
    const std::size_t d = dd(rng);
    Matrix m = lattice(rng) ? generators::lattice_means(K, d, rng) : generators::uniform_means(K, d, rng);
    const ParetoSet pareto = pareto_set(m);
    if (pareto.size() <= 5) return m;
  }
}

}  // namespace detail

/**
 * Fast oracle cost against the exhaustive reference (all ordered pairs and
 * all d^p maps), relative tolerance `tol`.
 */
inline SuiteResult verify_oracle_equivalence(std::size_t cases, std::uint64_t seed, double tol = 1e-9,
                                             const OracleOptions& opts = {}) {
  SuiteResult s;
  s.name = "oracle-equivalence";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Matrix mu = detail::random_small_instance(rng);
    const std::vector<double> w = generators::simplex_weights(mu.rows(), rng);
    const UnitScaling scaled{mu, std::vector<double>(mu.cols(), 1.0)};
    const double fast = min_alt_cost(scaled, w, opts).cost;
    const double ref = testing::exhaustive_min_alt(mu, w).cost;
    detail::record(s, relative_gap(fast, ref), tol, detail::case_label(seed, i));
  }
  return s;
}

/**
 * The returned minimizer is certified by its witness: k1 weakly dominates k0
 * for a removal; no Pareto arm strictly beats k0's new position everywhere
 * for an addition. Also D_w(mu, lambda) == cost.
 */
inline SuiteResult verify_witnesses(std::size_t cases, std::uint64_t seed, const OracleOptions& opts = {}) {
  SuiteResult s;
  s.name = "witness-certificates";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const Matrix mu = detail::random_small_instance(rng);
    const std::vector<double> w = generators::simplex_weights(mu.rows(), rng);
    const UnitScaling scaled{mu, std::vector<double>(mu.cols(), 1.0)};
    const TransportResult r = min_alt_cost(scaled, w, opts);
    double violation = 0.0;
    if (const auto* rm = std::get_if<RemoveWitness>(&r.witness)) {
      for (std::size_t j = 0; j < mu.cols(); ++j) {
        violation = std::max(violation, r.lambda(rm->k0, j) - r.lambda(rm->k1, j));
      }
    } else {
      const auto& add = std::get<AddWitness>(r.witness);
      for (std::size_t k : pareto_set(mu).indices) {
        double lead = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < mu.cols(); ++j) lead = std::min(lead, r.lambda(k, j) - r.lambda(add.k0, j));
        violation = std::max(violation, lead);
      }
    }
    const double cost_gap = relative_gap(transport_cost(mu, r.lambda, w), r.cost);
    detail::record(s, std::max(violation, cost_gap), 1e-9, detail::case_label(seed, i));
  }
  return s;
}

// Incremental graph distances against Bellman-Ford on the accumulated edges.
inline SuiteResult verify_incremental_graph(std::size_t cases, std::uint64_t seed, double tol = 1e-12) {
  SuiteResult s;
  s.name = "incremental-graph";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dd(1, 5), dlen(1, 8);
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t d = dd(rng);
    const std::size_t len = dlen(rng);
    std::uniform_int_distribution<std::size_t> dj(0, d - 1);
    ConstraintGraph g = ConstraintGraph::unconstrained(d);
    std::vector<testing::Edge> edges;
    double worst = 0.0;
    bool agree = true;
    for (std::size_t step = 0; step < len && agree; ++step) {
      const Matrix row = generators::uniform_means(1, d, rng);
      const std::size_t j = dj(rng);
      auto next = g.extend(row.row(0), j);
      auto more = testing::escape_edges(row.row(0), j);
      std::vector<testing::Edge> trial = edges;
      trial.insert(trial.end(), more.begin(), more.end());
      const bool feasible = testing::bellman_ford_feasible(d, trial);
      if (feasible != next.has_value()) {
        agree = false;
        break;
      }
      if (!next) continue;  // rejected step: keep the previous system
      g = std::move(*next);
      edges = std::move(trial);
      const testing::AllPairs bf = testing::bellman_ford_all_pairs(d, edges);
      for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) {
          if (bf.reachable(x, y) != g.reachable(x, y)) agree = false;
          else if (bf.reachable(x, y)) worst = std::max(worst, std::abs(bf.distance(x, y) - g.distance(x, y)));
        }
      }
    }
    detail::record(s, agree ? worst : std::numeric_limits<double>::infinity(), tol,
                   detail::case_label(seed, i));
  }
  return s;
}

// 2D fast paths against the generic path, relative tolerance `tol`.
inline SuiteResult verify_fast_2d(std::size_t cases, std::uint64_t seed, std::size_t max_p = 64,
                                  double tol = 1e-9) {
  SuiteResult s;
  s.name = "fast-2d";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dp(1, max_p), dextra(1, 6);
  std::bernoulli_distribution staircase(0.5);
  OracleOptions generic;
  generic.use_2d_fast_path = false;
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t p = dp(rng);
    Matrix mu;
    if (staircase(rng)) {
      // Staircase plus extra dominated arms scattered below it.
      const Matrix stairs = generators::staircase_2d(p, rng);
      const std::size_t extra = dextra(rng);
      mu = Matrix(p + extra, 2);
      for (std::size_t k = 0; k < p; ++k) {
        mu(k, 0) = stairs(k, 0);
        mu(k, 1) = stairs(k, 1);
      }
      std::uniform_int_distribution<std::size_t> pick(0, p - 1);
      std::uniform_real_distribution<double> frac(0.0, 1.0);
      for (std::size_t e = 0; e < extra; ++e) {
        const std::size_t k = pick(rng);
        mu(p + e, 0) = stairs(k, 0) * frac(rng);
        mu(p + e, 1) = stairs(k, 1) * frac(rng);
      }
    } else {
      mu = generators::uniform_means(std::min<std::size_t>(p + 1, 64), 2, rng);
    }
    const std::vector<double> w = generators::simplex_weights(mu.rows(), rng);
    const UnitScaling scaled{mu, {1.0, 1.0}};
    const double fast = min_alt_cost(scaled, w).cost;
    const double gen = min_alt_cost(scaled, w, generic).cost;
    detail::record(s, relative_gap(fast, gen), tol, detail::case_label(seed, i));
  }
  return s;
}

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool vacuous = false;

  bool passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
  }
};

inline VerifyReport verify_all(std::size_t budget, std::uint64_t seed, const OracleOptions& opts = {}) {
  VerifyReport r;
  r.vacuous = budget == 0;
  r.suites.push_back(verify_oracle_equivalence(budget, seed, 1e-9, opts));
  r.suites.push_back(verify_witnesses(budget, seed + 1, opts));
  r.suites.push_back(verify_incremental_graph(budget, seed + 2));
  r.suites.push_back(verify_fast_2d(budget, seed + 3));
  return r;
}

}  // namespace pareto_tas
