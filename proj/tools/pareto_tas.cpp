#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pareto_tas/pareto_tas.hpp"

namespace fs = std::filesystem;
using namespace pareto_tas;

namespace {

// "random:<geometry>:<p>:<d>:<seed>" or an embedded name or a JSON path.
BanditInstance resolve_instance(const std::string& source) {
  if (source.rfind("random:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(source.substr(7));
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw std::invalid_argument("expected random:<geometry>:<p>:<d>:<seed>");
    const auto geometry = generators::parse_geometry(parts[0]);
    std::mt19937_64 rng(std::stoull(parts[3]));
    return BanditInstance::unit_variance(
        generators::generate(geometry, std::stoul(parts[1]), std::stoul(parts[2]), rng));
  }
  return load_instance(source);
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pd_grid(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ';');) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("bad --pd-grid entry: " + item);
    grid.emplace_back(std::stoul(item.substr(0, comma)), std::stoul(item.substr(comma + 1)));
  }
  if (grid.empty()) throw std::invalid_argument("--pd-grid is empty");
  return grid;
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string label_of(const BanditInstance& inst, std::size_t k) {
  return inst.labels.empty() ? "arm" + std::to_string(k) : inst.labels[k];
}

int cmd_solve(const std::string& source, std::uint64_t iterations, double tolerance, const std::string& out_dir) {
  const BanditInstance inst = resolve_instance(source);
  const TStarResult r = solve_t_star(inst, iterations, tolerance);

  nlohmann::json j;
  j["t_star"] = r.t_star;
  j["weights"] = r.weights;
  j["labels"] = inst.labels;
  j["convergence"] = {{"converged", r.converged},
                      {"iterations", r.iterations},
                      {"lower", r.lower},
                      {"upper", r.upper},
                      {"relative_gap", r.upper > 0 ? (r.upper - r.lower) / r.upper : 0.0},
                      {"tolerance", tolerance}};

  std::printf("T* = %.4f  (value %.9g, certified upper %.9g, %llu iterations, %s)\n", r.t_star, r.lower,
              r.upper, static_cast<unsigned long long>(r.iterations), r.converged ? "converged" : "NOT converged");
  for (std::size_t k = 0; k < r.weights.size(); ++k) {
    std::printf("  %-16s w* = %.4f\n", label_of(inst, k).c_str(), r.weights[k]);
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "solve.json", j.dump(2) + "\n");
  }
  return r.converged ? 0 : 1;
}

struct SimulateArgs {
  std::string source;
  LearnerConfig config;
  std::size_t runs = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string out_dir;
  bool with_t_star = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const BanditInstance inst = resolve_instance(a.source);
  const auto records = simulate(inst, a.config, a.runs, a.seed, a.workers);
  const SimulationSummary s = summarize(records);
  std::optional<double> t_star;
  if (a.with_t_star) t_star = solve_t_star(inst, 200'000, 0.0).t_star;
  const nlohmann::json summary = summary_json(s, a.config.delta, t_star);

  std::printf("runs %zu  mean tau %.1f  std %.1f  error rate %.4f  aborted %zu\n", s.runs, s.mean_tau,
              s.std_tau, s.error_rate, s.aborted);
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    std::ostringstream csv;
    write_runs_csv(csv, records, inst.num_arms());
    write_file(fs::path(a.out_dir) / "runs.csv", csv.str());
    write_file(fs::path(a.out_dir) / "summary.json", summary.dump(2) + "\n");
  } else {
    std::cout << summary.dump(2) << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& grid_text, std::size_t samples, std::uint64_t seed, const std::string& path_name,
              const std::string& ratio_text, const std::string& out_dir) {
  OraclePath path = OraclePath::Auto;
  if (path_name == "generic") path = OraclePath::Generic;
  else if (path_name == "fast2d") path = OraclePath::Fast2d;
  else if (path_name != "auto") throw std::invalid_argument("--path must be auto, generic or fast2d");

  const auto rows = bench(parse_pd_grid(grid_text), samples, seed, path);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  std::cout << csv.str();

  std::map<std::size_t, std::vector<BenchRow>> by_d;
  for (const BenchRow& r : rows) by_d[r.d].push_back(r);
  for (const auto& [d, rs] : by_d) {
    if (rs.size() >= 2) std::printf("# d=%zu log-log slope %.3f\n", d, loglog_slope(rs));
  }

  std::ostringstream ratio_csv;
  if (!ratio_text.empty()) {
    write_ratio_csv(ratio_csv, bench_ratio_2d(parse_list(ratio_text), samples, seed));
    std::cout << ratio_csv.str();
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "bench.csv", csv.str());
    if (!ratio_text.empty()) write_file(fs::path(out_dir) / "ratio.csv", ratio_csv.str());
  }
  return 0;
}

int cmd_verify(std::size_t budget, std::uint64_t seed, bool inject_fault) {
  OracleOptions opts;
  opts.inject_remove_sign_fault = inject_fault;
  if (inject_fault) std::printf("fault injection: removal sign flipped\n");
  const VerifyReport report = verify_all(budget, seed, opts);
  if (report.vacuous) std::fprintf(stderr, "warning: budget 0, every suite passes vacuously\n");
  for (const SuiteResult& s : report.suites) {
    std::printf("%-22s %s  cases=%zu failures=%zu worst=%.3g%s%s\n", s.name.c_str(), s.passed() ? "PASS" : "FAIL",
                s.cases, s.failures, s.worst, s.passed() ? "" : "  first: ", s.first_failure.c_str());
  }
  std::printf("verify: %s\n", report.passed() ? "PASS" : "FAIL");
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto front identification with Track-and-Stop"};
  app.require_subcommand(1);

  std::string instance = "covid";
  std::string out_dir;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "characteristic time T* and optimal allocation w*");
  std::uint64_t iterations = 1'000'000;
  double tolerance = 0.035;
  solve->add_option("--instance", instance, "embedded name, JSON path or random:<geometry>:<p>:<d>:<seed>");
  solve->add_option("--iterations", iterations, "Hedge ascent iterations")->capture_default_str();
  solve->add_option("--tolerance", tolerance, "relative certified gap to stop at")->capture_default_str();
  solve->add_option("--out", out_dir, "directory for solve.json");

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo identification runs");
  SimulateArgs sa;
  sim->add_option("--instance", instance);
  sim->add_option("--delta", sa.config.delta)->capture_default_str();
  sim->add_option("--runs", sa.runs)->capture_default_str();
  sim->add_option("--seed", seed)->capture_default_str();
  sim->add_option("--gradient-period", sa.config.gradient_period)->capture_default_str();
  sim->add_option("--stopping-period", sa.config.stopping_period)->capture_default_str();
  sim->add_option("--max-steps", sa.config.max_steps)->capture_default_str();
  sim->add_option("--workers", sa.workers, "0 = hardware concurrency; PARETO_TAS_THREADS overrides");
  sim->add_option("--out", out_dir, "directory for runs.csv and summary.json");
  sim->add_flag("--with-t-star", sa.with_t_star, "add T* and ln(1/delta) T* to the summary");

  auto* bn = app.add_subcommand("bench", "oracle timing on random point clouds");
  std::string grid = "4,2;8,2;16,2;32,2;4,3;8,3;16,3;32,3";
  std::size_t samples = 100;
  std::string path = "auto";
  std::string ratio;
  bn->add_option("--pd-grid", grid, "\"p1,d1;p2,d2;...\"")->capture_default_str();
  bn->add_option("--samples", samples)->capture_default_str();
  bn->add_option("--seed", seed)->capture_default_str();
  bn->add_option("--path", path, "auto | generic | fast2d")->capture_default_str();
  bn->add_option("--ratio-p", ratio, "comma-separated p values for the 2D fast/generic table");
  bn->add_option("--out", out_dir, "directory for bench.csv and ratio.csv");

  auto* vf = app.add_subcommand("verify", "equivalence sweeps against brute-force references");
  std::size_t budget = 200;
  bool inject = false;
  vf->add_option("--budget", budget, "cases per suite")->capture_default_str();
  vf->add_option("--seed", seed)->capture_default_str();
  vf->add_flag("--inject-fault", inject, "flip the sign in the removal cost (must fail)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(instance, iterations, tolerance, out_dir);
    if (sim->parsed()) {
      sa.source = instance;
      sa.seed = seed;
      sa.out_dir = out_dir;
      return cmd_simulate(sa);
    }
    if (bn->parsed()) return cmd_bench(grid, samples, seed, path, ratio, out_dir);
    if (vf->parsed()) return cmd_verify(budget, seed, inject);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
