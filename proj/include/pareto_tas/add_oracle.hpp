#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pareto_tas/cell_tree.hpp"
#include "pareto_tas/matrix.hpp"
#include "pareto_tas/model.hpp"

namespace pareto_tas {

/**
 * Cheapest way to move non-Pareto arm k0 to lambda0 and push every Pareto
 * arm out of the upper orthant of lambda0 along its phi direction.
 */
struct AddCandidate {
  std::size_t k0 = 0;
  double cost = 0.0;
  std::vector<double> lambda0;
  PhiMap phi;  // phi[i] belongs to the i-th Pareto arm (ascending index)
  Matrix lambda_full;
};

struct HMinimum {
  double location = 0.0;
  double value = 0.0;
};

/**
 * Minimizes h(x) = w0/2 (anchor - x)^2 + sum_i w_i/2 (v_i - x)_+^2 for
 * ascending v. h' is piecewise linear and nondecreasing, so scanning the
 * intervals left to right the first one whose stationary point does not pass
 * its right end holds the minimizer.
 */
inline HMinimum minimize_h(std::span<const double> values, std::span<const double> weights,
                           double anchor, double anchor_weight) {
  if (values.size() != weights.size()) throw std::invalid_argument("minimize_h: size mismatch");
  const std::size_t n = values.size();
  if (anchor_weight == 0.0) {
    // Flat once past every weighted point.
    double x = anchor;
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] > 0.0) x = std::max(x, values[i]);
    }
    return {x, 0.0};
  }
  double sw = anchor_weight;
  double swx = anchor_weight * anchor;
  for (std::size_t i = 0; i < n; ++i) {
    sw += weights[i];
    swx += weights[i] * values[i];
  }
  double x = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double c = swx / sw;
    if (k == n || c <= values[k]) {
      x = k == 0 ? c : std::max(c, values[k - 1]);
      break;
    }
    sw -= weights[k];
    swx -= weights[k] * values[k];
  }
  double value = 0.5 * anchor_weight * (anchor - x) * (anchor - x);
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = values[i] - x;
    if (gap > 0.0) value += 0.5 * weights[i] * gap * gap;
  }
  return {x, value};
}

// Per-objective Pareto means sorted ascending, built once per oracle call.
struct SortedColumns {
  // entries[j] holds (value, Pareto position) pairs for objective j.
  std::vector<std::vector<std::pair<double, std::size_t>>> entries;

  static SortedColumns build(const Matrix& pareto_means) {
    SortedColumns s;
    s.entries.resize(pareto_means.cols());
    for (std::size_t j = 0; j < pareto_means.cols(); ++j) {
      auto& col = s.entries[j];
      col.reserve(pareto_means.rows());
      for (std::size_t i = 0; i < pareto_means.rows(); ++i) col.emplace_back(pareto_means(i, j), i);
      std::sort(col.begin(), col.end());
    }
    return s;
  }
};

namespace detail {

// The phi^{-1}(j) groups of one cell with suffix sums, shared by every k0.
class CellGroups {
 public:
  void build(const SortedColumns& columns, const PhiMap& phi, std::span<const double> pareto_w) {
    const std::size_t d = columns.entries.size();
    values_.resize(d);
    weights_.resize(d);
    suffix_w_.resize(d);
    suffix_wx_.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      auto& v = values_[j];
      auto& w = weights_[j];
      v.clear();
      w.clear();
      for (const auto& [value, pos] : columns.entries[j]) {
        if (phi[pos] != j) continue;
        v.push_back(value);
        w.push_back(pareto_w[pos]);
      }
      const std::size_t n = v.size();
      auto& sw = suffix_w_[j];
      auto& swx = suffix_wx_[j];
      sw.assign(n + 1, 0.0);
      swx.assign(n + 1, 0.0);
      for (std::size_t i = n; i-- > 0;) {
        sw[i] = sw[i + 1] + w[i];
        swx[i] = swx[i + 1] + w[i] * v[i];
      }
    }
  }

  // Separable minimization of g_{k0,phi}; writes the minimizer into lambda0.
  double solve(std::span<const double> anchor, double w0, std::span<double> lambda0) const {
    double total = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
      const HMinimum m = solve_one(j, anchor[j], w0);
      lambda0[j] = m.location;
      total += m.value;
    }
    return total;
  }

 private:
  HMinimum solve_one(std::size_t j, double a, double w0) const {
    const auto& v = values_[j];
    const auto& w = weights_[j];
    if (w0 == 0.0) return minimize_h(v, w, a, w0);
    const auto& sw = suffix_w_[j];
    const auto& swx = suffix_wx_[j];
    const std::size_t n = v.size();
    std::size_t k = 0;
    double x = 0.0;
    for (;; ++k) {
      const double c = (w0 * a + swx[k]) / (w0 + sw[k]);
      if (k == n || c <= v[k]) {
        x = k == 0 ? c : std::max(c, v[k - 1]);
        break;
      }
    }
    double value = 0.5 * w0 * (a - x) * (a - x);
    for (std::size_t i = k; i < n; ++i) {
      const double gap = v[i] - x;
      if (gap > 0.0) value += 0.5 * w[i] * gap * gap;
    }
    return {x, value};
  }

  std::vector<std::vector<double>> values_, weights_, suffix_w_, suffix_wx_;
};

inline Matrix gather_rows(const Matrix& mu, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), mu.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(mu.row(rows[i]).begin(), mu.row(rows[i]).end(), out.row(i).begin());
  }
  return out;
}

}  // namespace detail

// k0 moves to lambda0; a Pareto arm moves only on phi(k), and only down to lambda0.
inline Matrix build_add_lambda(const Matrix& mu, const ParetoSet& pareto, std::size_t k0,
                               std::span<const double> lambda0, const PhiMap& phi) {
  Matrix out = mu;
  std::copy(lambda0.begin(), lambda0.end(), out.row(k0).begin());
  for (std::size_t i = 0; i < pareto.size(); ++i) {
    const std::size_t k = pareto.indices[i];
    const std::size_t j = phi[i];
    if (mu(k, j) > lambda0[j]) out(k, j) = lambda0[j];
  }
  return out;
}

// g_{k0}(lambda0) from its min_j definition.
inline double add_cost_at(const Matrix& mu, std::span<const double> w, const ParetoSet& pareto,
                          std::size_t k0, std::span<const double> lambda0) {
  double total = 0.0;
  for (std::size_t j = 0; j < mu.cols(); ++j) {
    const double diff = mu(k0, j) - lambda0[j];
    total += 0.5 * w[k0] * diff * diff;
  }
  for (std::size_t k : pareto.indices) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < mu.cols(); ++j) m = std::min(m, mu(k, j) - lambda0[j]);
    if (m > 0.0) total += 0.5 * w[k] * m * m;
  }
  return total;
}

// Cheapest escape direction of every Pareto arm at lambda0, lowest index on ties.
inline PhiMap phi_at(const Matrix& mu, const ParetoSet& pareto, std::span<const double> lambda0) {
  PhiMap phi(pareto.size(), 0);
  for (std::size_t i = 0; i < pareto.size(); ++i) {
    const std::size_t k = pareto.indices[i];
    double best = mu(k, 0) - lambda0[0];
    for (std::size_t j = 1; j < mu.cols(); ++j) {
      const double gap = mu(k, j) - lambda0[j];
      if (gap < best) {
        best = gap;
        phi[i] = static_cast<std::uint32_t>(j);
      }
    }
  }
  return phi;
}

inline AddCandidate minimize_in_cell(const Matrix& mu, std::span<const double> w,
                                     const ParetoSet& pareto, const SortedColumns& columns,
                                     const PhiMap& phi, std::size_t k0) {
  std::vector<double> pareto_w(pareto.size());
  for (std::size_t i = 0; i < pareto.size(); ++i) pareto_w[i] = w[pareto.indices[i]];
  detail::CellGroups groups;
  groups.build(columns, phi, pareto_w);
  AddCandidate c;
  c.k0 = k0;
  c.phi = phi;
  c.lambda0.resize(mu.cols());
  c.cost = groups.solve(mu.row(k0), w[k0], c.lambda0);
  c.lambda_full = build_add_lambda(mu, pareto, k0, c.lambda0, phi);
  return c;
}

/**
 * Minimum over every non-empty cell and every non-Pareto arm of the
 * unconstrained per-cell minimum. Ties keep the first (cell, k0) in
 * enumeration order. nullopt when every arm is Pareto optimal.
 */
inline std::optional<AddCandidate> best_addition(const Matrix& mu, std::span<const double> w,
                                                 const ParetoSet& pareto) {
  const std::vector<std::size_t> others = complement(pareto, mu.rows());
  if (others.empty()) return std::nullopt;

  const Matrix pareto_means = detail::gather_rows(mu, pareto.indices);
  const SortedColumns columns = SortedColumns::build(pareto_means);
  std::vector<double> pareto_w(pareto.size());
  for (std::size_t i = 0; i < pareto.size(); ++i) pareto_w[i] = w[pareto.indices[i]];

  detail::CellGroups groups;
  std::vector<double> lambda0(mu.cols());
  AddCandidate best;
  best.cost = std::numeric_limits<double>::infinity();
  for_each_cell(pareto_means, [&](const PhiMap& phi, const ConstraintGraph&) {
    groups.build(columns, phi, pareto_w);
    for (std::size_t k0 : others) {
      const double cost = groups.solve(mu.row(k0), w[k0], lambda0);
      if (cost < best.cost) {
        best.cost = cost;
        best.k0 = k0;
        best.lambda0 = lambda0;
        best.phi = phi;
      }
    }
  });
  best.lambda_full = build_add_lambda(mu, pareto, best.k0, best.lambda0, best.phi);
  return best;
}

namespace detail {

// Active-set sums for t_k(s) = c_k + m_k s over the arms currently blocking.
struct TentSums {
  double w = 0.0, b0 = 0.0, b1 = 0.0, q0 = 0.0, q1 = 0.0, q2 = 0.0;

  void add(double weight, double c, double m, double sign = 1.0) {
    const double ws = sign * weight;
    w += ws;
    b0 += ws * c;
    b1 += ws * m;
    q0 += ws * c * c;
    q1 += ws * c * m;
    q2 += ws * m * m;
  }
};

struct SweepResult {
  double s = 0.0;
  double t = 0.0;
};

/**
 * Sweeps s over the anti-diagonal parametrization lambda = M s + t 1 with
 * M = (1/sqrt2, -1/sqrt2), the anchor shifted to the origin. Arm i (sorted
 * by s_i) blocks lambda while both of its branches lie above t*(s):
 *   ascending  y_i + s/sqrt2   (escape along objective 1),
 *   descending x_i - s/sqrt2   (escape along objective 0).
 * The ascending branches are met in sorted order, as are the crossings s_i
 * and the descending branches, so three pointers suffice; t*(s) and
 * G(s) = min_t g(s, t) are linear and quadratic between events.
 */
inline SweepResult sweep_t_star(std::span<const double> x, std::span<const double> y,
                                std::span<const double> wk, double w0) {
  constexpr double r = 0.70710678118654752440;
  const std::size_t p = x.size();
  std::size_t entered = 0, left = 0, crossed = 0;
  TentSums sums;
  auto branch = [&](std::size_t i) {
    return i < crossed ? std::pair{x[i], -r} : std::pair{y[i], r};
  };
  auto active = [&](std::size_t i) { return i >= left && i < entered; };

  double best_value = std::numeric_limits<double>::infinity();
  SweepResult best{};
  double s_lo = -std::numeric_limits<double>::infinity();
  while (true) {
    const double denom = 2.0 * w0 + sums.w;
    const double t0 = sums.b0 / denom;
    const double t1 = sums.b1 / denom;
    assert(std::abs(t1) < r);

    constexpr double inf = std::numeric_limits<double>::infinity();
    const double s_enter = entered < p ? (t0 - y[entered]) / (r - t1) : inf;
    const double s_cross = crossed < p ? (x[crossed] - y[crossed]) * r : inf;
    const double s_leave = left < p ? (x[left] - t0) / (r + t1) : inf;
    enum class Event { enter, cross, leave } event = Event::leave;
    double s_next = s_leave;
    if (s_enter <= s_cross && s_enter <= s_leave) {
      event = Event::enter;
      s_next = s_enter;
    } else if (s_cross <= s_leave) {
      event = Event::cross;
      s_next = s_cross;
    }
    const double s_hi = std::max(s_next, s_lo);

    // G(s) = g2 s^2 + g1 s + g0 on [s_lo, s_hi].
    const double g2 = 0.5 * w0 + w0 * t1 * t1 + 0.5 * (sums.q2 - 2.0 * t1 * sums.b1 + sums.w * t1 * t1);
    const double g1 = 2.0 * w0 * t0 * t1 + (sums.q1 - t0 * sums.b1 - t1 * sums.b0 + sums.w * t0 * t1);
    const double g0 = w0 * t0 * t0 + 0.5 * (sums.q0 - 2.0 * t0 * sums.b0 + sums.w * t0 * t0);
    assert(g2 > 0.0);
    const double s_star = std::clamp(-g1 / (2.0 * g2), s_lo, s_hi);
    const double value = (g2 * s_star + g1) * s_star + g0;
    if (value < best_value) {
      best_value = value;
      best = {s_star, t0 + t1 * s_star};
    }

    if (s_hi == inf) break;
    s_lo = s_hi;
    // Coincident events: ascending meets, then crossings, then descending meets.
    if (event == Event::enter) {
      if (entered >= left) {
        auto [c, m] = branch(entered);
        sums.add(wk[entered], c, m);
      }
      ++entered;
    } else if (event == Event::cross) {
      if (active(crossed)) {
        sums.add(wk[crossed], y[crossed], r, -1.0);
        sums.add(wk[crossed], x[crossed], -r);
      }
      ++crossed;
    } else {
      if (active(left)) {
        auto [c, m] = branch(left);
        sums.add(wk[left], c, m, -1.0);
      }
      ++left;
    }
    if (left >= entered) sums = TentSums{};
  }
  return best;
}

}  // namespace detail

/**
 * Two objectives: same contract as best_addition, computed by tracking the
 * piecewise-linear curve t*(s) across the p + 1 cells for every k0.
 * O(K p + p log p). Falls back to the generic path on non-strict staircases.
 */
inline std::optional<AddCandidate> best_addition_2d(const Matrix& mu, std::span<const double> w,
                                                    const ParetoSet& pareto) {
  if (mu.cols() != 2) throw std::invalid_argument("best_addition_2d: requires d == 2");
  const std::vector<std::size_t> others = complement(pareto, mu.rows());
  if (others.empty()) return std::nullopt;

  std::vector<std::size_t> order = pareto.indices;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mu(a, 0) < mu(b, 0) || (mu(a, 0) == mu(b, 0) && a < b);
  });
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    if (!(mu(order[i], 0) < mu(order[i + 1], 0))) return best_addition(mu, w, pareto);
  }

  const std::size_t p = order.size();
  std::vector<double> xs(p), ys(p), ws(p);
  constexpr double r = 0.70710678118654752440;
  AddCandidate best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<double> lambda0(2);
  for (std::size_t k0 : others) {
    const double a0 = mu(k0, 0);
    const double a1 = mu(k0, 1);
    const double w0 = w[k0];
    if (w0 == 0.0) {
      // Matches the generic path's first cell (every arm escapes on objective 0).
      lambda0[0] = a0;
      for (std::size_t k : pareto.indices) {
        if (w[k] > 0.0) lambda0[0] = std::max(lambda0[0], mu(k, 0));
      }
      lambda0[1] = a1;
    } else {
      for (std::size_t i = 0; i < p; ++i) {
        xs[i] = mu(order[i], 0) - a0;
        ys[i] = mu(order[i], 1) - a1;
        ws[i] = w[order[i]];
      }
      const detail::SweepResult sr = detail::sweep_t_star(xs, ys, ws, w0);
      lambda0[0] = a0 + r * sr.s + sr.t;
      lambda0[1] = a1 - r * sr.s + sr.t;
    }
    const double cost = add_cost_at(mu, w, pareto, k0, lambda0);
    if (cost < best.cost) {
      best.cost = cost;
      best.k0 = k0;
      best.lambda0 = lambda0;
    }
  }
  best.phi = phi_at(mu, pareto, best.lambda0);
  best.lambda_full = build_add_lambda(mu, pareto, best.k0, best.lambda0, best.phi);
  return best;
}

}  // namespace pareto_tas
