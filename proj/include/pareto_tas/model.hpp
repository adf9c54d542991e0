#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pareto_tas/matrix.hpp"

namespace pareto_tas {

// Nonnegative allocation over arms: a simplex point, or raw pull counts.
using Weights = std::vector<double>;

/**
 * Multi-objective Gaussian bandit: K arms in d objectives, independent
 * coordinates with per-objective pooled variances.
 */
struct BanditInstance {
  Matrix means;                     // K x d
  std::vector<double> variances;    // length d, all > 0
  std::vector<std::string> labels;  // empty or length K

  std::size_t num_arms() const { return means.rows(); }
  std::size_t num_objectives() const { return means.cols(); }

  // Throws std::invalid_argument on a malformed instance.
  void validate() const {
    if (means.rows() == 0 || means.cols() == 0) {
      throw std::invalid_argument("BanditInstance: need at least one arm and one objective");
    }
    if (variances.size() != means.cols()) {
      throw std::invalid_argument("BanditInstance: variances must have one entry per objective");
    }
    if (!labels.empty() && labels.size() != means.rows()) {
      throw std::invalid_argument("BanditInstance: labels must have one entry per arm");
    }
    for (double v : means.data()) {
      if (!std::isfinite(v)) throw std::invalid_argument("BanditInstance: non-finite mean");
    }
    for (double v : variances) {
      if (!std::isfinite(v) || !(v > 0.0)) {
        throw std::invalid_argument("BanditInstance: variances must be finite and positive");
      }
    }
  }

  static BanditInstance unit_variance(Matrix means) {
    BanditInstance inst;
    inst.variances.assign(means.cols(), 1.0);
    inst.means = std::move(means);
    return inst;
  }
};

// Arm indices of the Pareto set, ascending.
struct ParetoSet {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool contains(std::size_t k) const {
    return std::binary_search(indices.begin(), indices.end(), k);
  }
  friend bool operator==(const ParetoSet&, const ParetoSet&) = default;
};

// a ≼ b: b is at least as good as a on every objective.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dominates: length mismatch");
  }
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] > b[j]) return false;
  }
  return true;
}

inline bool strictly_dominated(std::span<const double> a, std::span<const double> b) {
  return dominates(a, b) && !std::equal(a.begin(), a.end(), b.begin());
}

// An arm is dropped iff some other arm is at least as good everywhere and
// differs somewhere. Arms with identical mean vectors are all kept.
inline ParetoSet pareto_set(const Matrix& means) {
  ParetoSet out;
  const std::size_t K = means.rows();
  for (std::size_t k = 0; k < K; ++k) {
    bool dominated = false;
    for (std::size_t other = 0; other < K && !dominated; ++other) {
      if (other != k && strictly_dominated(means.row(k), means.row(other))) dominated = true;
    }
    if (!dominated) out.indices.push_back(k);
  }
  return out;
}

inline std::vector<std::size_t> complement(const ParetoSet& pareto, std::size_t num_arms) {
  std::vector<std::size_t> out;
  out.reserve(num_arms - pareto.size());
  for (std::size_t k = 0; k < num_arms; ++k) {
    if (!pareto.contains(k)) out.push_back(k);
  }
  return out;
}

// Means divided column-wise by sigma_j, with the map back to original units.
struct UnitScaling {
  Matrix means;
  std::vector<double> sigma;

  Matrix to_original(const Matrix& scaled) const {
    Matrix out = scaled;
    for (std::size_t k = 0; k < out.rows(); ++k) {
      for (std::size_t j = 0; j < out.cols(); ++j) out(k, j) *= sigma[j];
    }
    return out;
  }
};

inline UnitScaling rescale_to_unit_variance(const BanditInstance& instance) {
  UnitScaling s;
  s.sigma.resize(instance.variances.size());
  for (std::size_t j = 0; j < s.sigma.size(); ++j) {
    const double v = instance.variances[j];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("rescale_to_unit_variance: variance must be positive");
    }
    s.sigma[j] = std::sqrt(v);
  }
  s.means = instance.means;
  for (std::size_t k = 0; k < s.means.rows(); ++k) {
    for (std::size_t j = 0; j < s.means.cols(); ++j) s.means(k, j) /= s.sigma[j];
  }
  return s;
}

// D_w(mu, lambda) = sum_k w_k/2 ||mu_k - lambda_k||^2, unit-variance space.
inline double transport_cost(const Matrix& mu, const Matrix& lambda, std::span<const double> w) {
  if (mu.rows() != lambda.rows() || mu.cols() != lambda.cols() || w.size() != mu.rows()) {
    throw std::invalid_argument("transport_cost: shape mismatch");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < mu.rows(); ++k) {
    if (w[k] == 0.0) continue;
    double sq = 0.0;
    for (std::size_t j = 0; j < mu.cols(); ++j) {
      const double diff = mu(k, j) - lambda(k, j);
      sq += diff * diff;
    }
    total += 0.5 * w[k] * sq;
  }
  return total;
}

}  // namespace pareto_tas
