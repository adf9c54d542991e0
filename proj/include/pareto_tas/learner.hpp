#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pareto_tas/best_response.hpp"
#include "pareto_tas/matrix.hpp"
#include "pareto_tas/model.hpp"

namespace pareto_tas {

struct LearnerConfig {
  double delta = 0.1;
  std::uint64_t gradient_period = 10;  // samples between oracle calls
  std::uint64_t stopping_period = 25;  // samples between stopping checks
  std::uint64_t max_steps = 5'000'000;
  std::uint64_t seed = 0;
  // Take a Hedge step after every sample with the cached gradient. When
  // false the step happens only when the gradient is refreshed.
  bool hedge_every_sample = true;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("LearnerConfig: delta must be in (0, 1)");
    if (gradient_period == 0 || stopping_period == 0) {
      throw std::invalid_argument("LearnerConfig: periods must be positive");
    }
    if (max_steps == 0) throw std::invalid_argument("LearnerConfig: max_steps must be positive");
  }
};

/**
 * Exponential weights over arms with learning rate
 *   eta_t = sqrt(ln K / (1 + sum_{s<=t} ||g_s||_inf^2)),
 * played as w_k proportional to exp(eta_t * G_k) with G the cumulative gains.
 */
class Hedge {
 public:
  explicit Hedge(std::size_t num_arms)
      : gains_(num_arms, 0.0), weights_(num_arms, 1.0 / static_cast<double>(num_arms)) {
    if (num_arms == 0) throw std::invalid_argument("Hedge: need at least one arm");
  }

  const std::vector<double>& weights() const { return weights_; }
  double grad_norm_acc() const { return grad_norm_acc_; }
  double learning_rate() const {
    return std::sqrt(std::log(static_cast<double>(weights_.size())) / (1.0 + grad_norm_acc_));
  }

  void update(std::span<const double> gradient) {
    if (gradient.size() != gains_.size()) throw std::invalid_argument("Hedge::update: size mismatch");
    double norm = 0.0;
    for (std::size_t k = 0; k < gains_.size(); ++k) {
      if (!std::isfinite(gradient[k])) throw std::invalid_argument("Hedge::update: non-finite gradient");
      gains_[k] += gradient[k];
      norm = std::max(norm, std::abs(gradient[k]));
    }
    grad_norm_acc_ += norm * norm;
    renormalize();
  }

 private:
  void renormalize() {
    const double eta = learning_rate();
    const double top = *std::max_element(gains_.begin(), gains_.end());
    double total = 0.0;
    for (std::size_t k = 0; k < gains_.size(); ++k) {
      // Floor keeps every weight strictly positive.
      weights_[k] = std::exp(std::max(eta * (gains_[k] - top), -700.0));
      total += weights_[k];
    }
    for (double& w : weights_) w /= total;
  }

  std::vector<double> gains_;
  std::vector<double> weights_;
  double grad_norm_acc_ = 0.0;
};

struct LearnerState {
  LearnerState(std::size_t num_arms, std::size_t num_objectives)
      : counts(num_arms, 0), sums(num_arms, num_objectives), hedge(num_arms), target(num_arms, 0.0) {}

  std::uint64_t t = 0;
  std::vector<std::uint64_t> counts;
  Matrix sums;
  Hedge hedge;
  std::vector<double> target;  // running sum of Hedge iterates
  std::optional<TransportResult> last_oracle;

  std::size_t num_arms() const { return counts.size(); }

  bool all_sampled() const {
    return std::all_of(counts.begin(), counts.end(), [](std::uint64_t n) { return n > 0; });
  }

  void observe(std::size_t arm, std::span<const double> reward) {
    ++t;
    ++counts[arm];
    for (std::size_t j = 0; j < reward.size(); ++j) sums(arm, j) += reward[j];
  }

  Matrix empirical_means() const {
    Matrix m = sums;
    for (std::size_t k = 0; k < m.rows(); ++k) {
      const double n = static_cast<double>(counts[k]);
      for (std::size_t j = 0; j < m.cols(); ++j) m(k, j) = counts[k] > 0 ? m(k, j) / n : 0.0;
    }
    return m;
  }
};

/**
 * Forced exploration first: any arm with N_k = 0 or N_k < sqrt(t) - K/2,
 * least sampled first. Otherwise C-tracking: the arm lagging furthest behind
 * the cumulative Hedge allocation. Ties go to the lowest index.
 */
inline std::size_t choose_arm(const LearnerState& state) {
  const std::size_t K = state.num_arms();
  const double threshold = std::sqrt(static_cast<double>(state.t)) - 0.5 * static_cast<double>(K);
  std::optional<std::size_t> starved;
  for (std::size_t k = 0; k < K; ++k) {
    const auto n = state.counts[k];
    if (n == 0 || static_cast<double>(n) < threshold) {
      if (!starved || n < state.counts[*starved]) starved = k;
    }
  }
  if (starved) return *starved;

  std::size_t best = 0;
  double lag = state.target[0] - static_cast<double>(state.counts[0]);
  for (std::size_t k = 1; k < K; ++k) {
    const double l = state.target[k] - static_cast<double>(state.counts[k]);
    if (l > lag) {
      lag = l;
      best = k;
    }
  }
  return best;
}

inline double stopping_threshold(std::uint64_t t, double delta) {
  return std::log(std::log(1.0 + static_cast<double>(t)) / delta);
}

struct StoppingCheck {
  bool ready = false;  // false until every arm has a sample
  double statistic = 0.0;
  double threshold = 0.0;
  bool stop() const { return ready && statistic > threshold; }
};

/**
 * GLR statistic Z(t) = t * inf_{Alt(mu_hat)} D_{N/t} evaluated as the oracle
 * with the raw counts, compared against ln(ln(1 + t) / delta).
 */
inline StoppingCheck stopping_statistic(const LearnerState& state, std::span<const double> variances,
                                        double delta) {
  StoppingCheck c;
  c.threshold = stopping_threshold(state.t, delta);
  if (!state.all_sampled()) return c;
  BanditInstance estimate;
  estimate.means = state.empirical_means();
  estimate.variances.assign(variances.begin(), variances.end());
  std::vector<double> n(state.counts.begin(), state.counts.end());
  c.ready = true;
  c.statistic = min_alt_cost(estimate, n).cost;
  return c;
}

struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t tau = 0;
  ParetoSet answer;
  bool correct = false;
  bool aborted = false;
  std::vector<std::uint64_t> counts;
  double wall_time = 0.0;  // seconds
};

// One Track-and-Stop identification run against a Gaussian ground truth.
inline RunRecord run(const BanditInstance& instance, const LearnerConfig& config) {
  instance.validate();
  config.validate();
  const std::size_t K = instance.num_arms();
  const std::size_t d = instance.num_objectives();
  if (K < 2) throw AltEmptyError();
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> sigma(d);
  for (std::size_t j = 0; j < d; ++j) sigma[j] = std::sqrt(instance.variances[j]);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  LearnerState state(K, d);
  std::vector<double> reward(d);
  BanditInstance estimate;
  estimate.variances = instance.variances;

  RunRecord rec;
  rec.seed = config.seed;
  while (true) {
    if (state.t >= config.max_steps) {
      rec.aborted = true;
      break;
    }
    const auto& w = state.hedge.weights();
    for (std::size_t k = 0; k < K; ++k) state.target[k] += w[k];

    const std::size_t arm = choose_arm(state);
    for (std::size_t j = 0; j < d; ++j) reward[j] = instance.means(arm, j) + sigma[j] * noise(rng);
    state.observe(arm, reward);
    if (!state.all_sampled()) continue;

    const bool refresh = !state.last_oracle || state.t % config.gradient_period == 0;
    if (refresh) {
      estimate.means = state.empirical_means();
      state.last_oracle = min_alt_cost(estimate, state.hedge.weights());
    }
    if (refresh || config.hedge_every_sample) state.hedge.update(state.last_oracle->gradient);

    if (state.t % config.stopping_period == 0) {
      if (stopping_statistic(state, instance.variances, config.delta).stop()) break;
    }
  }

  rec.tau = state.t;
  rec.counts = state.counts;
  rec.answer = pareto_set(state.empirical_means());
  rec.correct = !rec.aborted && rec.answer == pareto_set(instance.means);
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

struct TStarResult {
  double t_star = 0.0;          // 1 / best certified value
  std::vector<double> weights;  // allocation achieving that value
  double lower = 0.0;           // best value found
  double upper = 0.0;           // certified upper bound on the optimum
  std::uint64_t iterations = 0;
  bool converged = false;
};

/**
 * Offline characteristic time: Hedge ascent on w -> inf_Alt D_w at the true
 * means. The value of the averaged iterate is a lower bound; the largest
 * coordinate of the averaged supergradient is an upper bound (concavity and
 * positive homogeneity). Stops once (upper - lower) / upper <= tolerance.
 */
inline TStarResult solve_t_star(const BanditInstance& instance, std::uint64_t iterations,
                                double tolerance, std::uint64_t check_every = 64) {
  instance.validate();
  const std::size_t K = instance.num_arms();
  if (K < 2) throw AltEmptyError();
  const UnitScaling scaled = rescale_to_unit_variance(instance);

  Hedge hedge(K);
  // Averages restart at every power of two so the burn-in drops out; any
  // window still yields valid bounds.
  std::vector<double> sum_w(K, 0.0), sum_g(K, 0.0), avg(K);
  std::uint64_t window_start = 1;
  TStarResult out;
  out.upper = std::numeric_limits<double>::infinity();
  auto consider = [&](std::span<const double> w, double value) {
    if (value > out.lower) {
      out.lower = value;
      out.weights.assign(w.begin(), w.end());
    }
  };

  for (std::uint64_t it = 1; it <= iterations; ++it) {
    if ((it & (it - 1)) == 0 && it >= 2 * check_every) {
      std::fill(sum_w.begin(), sum_w.end(), 0.0);
      std::fill(sum_g.begin(), sum_g.end(), 0.0);
      window_start = it;
    }
    const std::vector<double> w = hedge.weights();
    const TransportResult r = min_alt_cost(scaled, w);
    consider(w, r.cost);
    for (std::size_t k = 0; k < K; ++k) {
      sum_w[k] += w[k];
      sum_g[k] += r.gradient[k];
    }
    hedge.update(r.gradient);
    out.iterations = it;

    if (it % check_every == 0 || it == iterations) {
      const double n = static_cast<double>(it - window_start + 1);
      for (std::size_t k = 0; k < K; ++k) avg[k] = sum_w[k] / n;
      consider(avg, min_alt_cost(scaled, avg).cost);
      out.upper = std::min(out.upper, *std::max_element(sum_g.begin(), sum_g.end()) / n);
      if (out.lower > 0.0 && (out.upper - out.lower) <= tolerance * out.upper) {
        out.converged = true;
        break;
      }
    }
  }
  out.t_star = out.lower > 0.0 ? 1.0 / out.lower : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace pareto_tas
