#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "pareto_tas/add_oracle.hpp"
#include "pareto_tas/matrix.hpp"
#include "pareto_tas/model.hpp"
#include "pareto_tas/oracle_options.hpp"
#include "pareto_tas/remove_oracle.hpp"

namespace pareto_tas {

// Raised when no alternative model exists (a single arm).
class AltEmptyError : public std::domain_error {
 public:
  AltEmptyError() : std::domain_error("min_alt_cost: a single arm has no alternative model") {}
};

struct RemoveWitness {
  std::size_t k0;  // shadowed
  std::size_t k1;  // shadower
};

struct AddWitness {
  std::size_t k0;
  PhiMap phi;
};

/**
 * Minimizer of D_w over the closure of Alt(mu).
 *
 * `lambda` is in original units; `gradient[k]` is arm k's divergence
 * sum_j (mu_k^j - lambda_k^j)^2 / (2 sigma_j^2), so that
 * sum_k w_k gradient[k] == cost.
 */
struct TransportResult {
  double cost = 0.0;
  Matrix lambda;
  std::variant<RemoveWitness, AddWitness> witness;
  std::vector<double> gradient;

  bool is_removal() const { return std::holds_alternative<RemoveWitness>(witness); }
};

namespace detail {

inline TransportResult finish(const UnitScaling& scaled, const Matrix& lambda_scaled, double cost,
                              std::variant<RemoveWitness, AddWitness> witness) {
  TransportResult r;
  r.cost = cost;
  r.witness = std::move(witness);
  r.gradient.assign(scaled.means.rows(), 0.0);
  for (std::size_t k = 0; k < scaled.means.rows(); ++k) {
    double sq = 0.0;
    for (std::size_t j = 0; j < scaled.means.cols(); ++j) {
      const double diff = scaled.means(k, j) - lambda_scaled(k, j);
      sq += diff * diff;
    }
    r.gradient[k] = 0.5 * sq;
  }
  r.lambda = scaled.to_original(lambda_scaled);
  return r;
}

}  // namespace detail

/**
 * inf over Alt(mu) of D_w, as the smaller of the best removal (one Pareto
 * arm shadowed by another) and the best addition (a dominated arm escaping
 * every Pareto arm). Removal wins ties. Works in unit-variance coordinates.
 */
inline TransportResult min_alt_cost(const UnitScaling& scaled, std::span<const double> w,
                                    const OracleOptions& opts = {}) {
  const Matrix& mu = scaled.means;
  if (mu.rows() < 2) throw AltEmptyError();
  if (w.size() != mu.rows()) throw std::invalid_argument("min_alt_cost: weight length mismatch");

  const ParetoSet pareto = pareto_set(mu);
  const bool fast = opts.use_2d_fast_path && mu.cols() == 2;
  std::optional<RemoveCandidate> rm =
      fast ? best_removal_2d(mu, w, pareto, opts) : best_removal(mu, w, pareto, opts);
  std::optional<AddCandidate> add = fast ? best_addition_2d(mu, w, pareto) : best_addition(mu, w, pareto);

  if (rm && (!add || rm->cost <= add->cost)) {
    return detail::finish(scaled, rm->apply(mu), rm->cost, RemoveWitness{rm->k0, rm->k1});
  }
  return detail::finish(scaled, add->lambda_full, add->cost, AddWitness{add->k0, std::move(add->phi)});
}

inline TransportResult min_alt_cost(const BanditInstance& instance, std::span<const double> w,
                                    const OracleOptions& opts = {}) {
  if (instance.num_arms() < 2) throw AltEmptyError();
  return min_alt_cost(rescale_to_unit_variance(instance), w, opts);
}

struct DirectionalDerivative {
  double analytic = 0.0;
  double numeric = 0.0;
};

// <gradient, direction> against a central difference of the oracle value.
inline DirectionalDerivative supergradient_check(const BanditInstance& instance,
                                                 std::span<const double> w,
                                                 std::span<const double> direction,
                                                 double step = 1e-5) {
  const UnitScaling scaled = rescale_to_unit_variance(instance);
  const TransportResult at = min_alt_cost(scaled, w);
  DirectionalDerivative out;
  for (std::size_t k = 0; k < w.size(); ++k) out.analytic += at.gradient[k] * direction[k];
  std::vector<double> plus(w.begin(), w.end()), minus(w.begin(), w.end());
  for (std::size_t k = 0; k < w.size(); ++k) {
    plus[k] += step * direction[k];
    minus[k] -= step * direction[k];
  }
  out.numeric = (min_alt_cost(scaled, plus).cost - min_alt_cost(scaled, minus).cost) / (2.0 * step);
  return out;
}

}  // namespace pareto_tas
