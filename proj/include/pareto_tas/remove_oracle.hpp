#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pareto_tas/matrix.hpp"
#include "pareto_tas/model.hpp"
#include "pareto_tas/oracle_options.hpp"

namespace pareto_tas {

// Cheapest way to make arm k1 weakly dominate arm k0, moving only those two.
struct RemoveCandidate {
  std::size_t k0 = 0;  // shadowed
  std::size_t k1 = 0;  // shadower
  double cost = 0.0;
  std::vector<double> lambda_k0;
  std::vector<double> lambda_k1;

  // Writes the two moved rows into a copy of mu.
  Matrix apply(const Matrix& mu) const {
    Matrix out = mu;
    std::copy(lambda_k0.begin(), lambda_k0.end(), out.row(k0).begin());
    std::copy(lambda_k1.begin(), lambda_k1.end(), out.row(k1).begin());
    return out;
  }
};

/**
 * Closed-form shadowing cost
 *   1/2 * w0 w1 / (w0 + w1) * sum_j (mu_k0^j - mu_k1^j)_+^2.
 * On every objective where k0 is ahead, both arms meet at the weighted mean
 * of their coordinates. With w0 + w1 == 0 the factor is 0 and they meet at
 * the plain midpoint, which keeps the minimizer inside the alternative set.
 */
inline RemoveCandidate remove_cost(const Matrix& mu, std::span<const double> w, std::size_t k0,
                                   std::size_t k1, const OracleOptions& opts = {}) {
  if (k0 == k1) throw std::invalid_argument("remove_cost: k0 == k1");
  const double w0 = w[k0];
  const double w1 = w[k1];
  const double total = w0 + w1;
  const double harmonic = total > 0.0 ? w0 * w1 / total : 0.0;

  RemoveCandidate c;
  c.k0 = k0;
  c.k1 = k1;
  c.lambda_k0.assign(mu.row(k0).begin(), mu.row(k0).end());
  c.lambda_k1.assign(mu.row(k1).begin(), mu.row(k1).end());
  double sq = 0.0;
  for (std::size_t j = 0; j < mu.cols(); ++j) {
    const double x = mu(k0, j);
    const double y = mu(k1, j);
    const double gap = opts.inject_remove_sign_fault ? y - x : x - y;
    if (gap <= 0.0) continue;
    sq += gap * gap;
    const double meet = total > 0.0 ? (w0 * x + w1 * y) / total : 0.5 * (x + y);
    c.lambda_k0[j] = meet;
    c.lambda_k1[j] = meet;
  }
  c.cost = 0.5 * harmonic * sq;
  return c;
}

// Minimum over ordered pairs of distinct Pareto arms; first minimum wins.
inline std::optional<RemoveCandidate> best_removal(const Matrix& mu, std::span<const double> w,
                                                   const ParetoSet& pareto,
                                                   const OracleOptions& opts = {}) {
  std::optional<RemoveCandidate> best;
  for (std::size_t a : pareto.indices) {
    for (std::size_t b : pareto.indices) {
      if (a == b) continue;
      RemoveCandidate c = remove_cost(mu, w, a, b, opts);
      if (!best || c.cost < best->cost) best = std::move(c);
    }
  }
  return best;
}

/**
 * Two objectives: along the staircase sorted by objective 0 only adjacent
 * arms need to be compared, in both orientations. Falls back to the generic
 * scan when the staircase is not strict (duplicate Pareto means).
 */
inline std::optional<RemoveCandidate> best_removal_2d(const Matrix& mu, std::span<const double> w,
                                                      const ParetoSet& pareto,
                                                      const OracleOptions& opts = {}) {
  if (mu.cols() != 2) throw std::invalid_argument("best_removal_2d: requires d == 2");
  if (pareto.size() < 2) return std::nullopt;

  std::vector<std::size_t> order = pareto.indices;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mu(a, 0) < mu(b, 0) || (mu(a, 0) == mu(b, 0) && a < b);
  });
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    if (!(mu(order[i], 0) < mu(order[i + 1], 0))) return best_removal(mu, w, pareto, opts);
  }

  std::optional<RemoveCandidate> best;
  auto consider = [&](std::size_t a, std::size_t b) {
    RemoveCandidate c = remove_cost(mu, w, a, b, opts);
    if (!best || c.cost < best->cost) best = std::move(c);
  };
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    consider(order[i], order[i + 1]);
    consider(order[i + 1], order[i]);
  }
  return best;
}

}  // namespace pareto_tas
