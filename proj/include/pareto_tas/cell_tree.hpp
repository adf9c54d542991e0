#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pareto_tas/matrix.hpp"

namespace pareto_tas {

// Cycles shorter than -kFeasibilityTolerance are negative; anything in
// [-tol, 0) is treated as a zero cycle and the cell is kept.
inline constexpr double kFeasibilityTolerance = 1e-9;

/**
 * All-pairs shortest paths of a difference-constraint graph over the d
 * objectives. An edge x -> y of length u encodes lambda^y - lambda^x <= u.
 * Unreachable pairs carry an explicit flag instead of an infinity.
 */
class ConstraintGraph {
 public:
  ConstraintGraph() = default;

  static ConstraintGraph unconstrained(std::size_t d) {
    ConstraintGraph g;
    g.d_ = d;
    g.dist_.assign(d * d, 0.0);
    g.reach_.assign(d * d, 0);
    for (std::size_t x = 0; x < d; ++x) g.reach_[x * d + x] = 1;
    return g;
  }

  std::size_t dimension() const { return d_; }
  bool reachable(std::size_t x, std::size_t y) const { return reach_[x * d_ + y] != 0; }
  // Meaningful only when reachable(x, y).
  double distance(std::size_t x, std::size_t y) const { return dist_[x * d_ + y]; }

  /**
   * A point of the cell: shortest-path potentials from a virtual source
   * joined to every node by a zero-length edge.
   */
  std::vector<double> witness_point() const {
    std::vector<double> p(d_, 0.0);
    for (std::size_t y = 0; y < d_; ++y) {
      for (std::size_t x = 0; x < d_; ++x) {
        if (reachable(x, y) && distance(x, y) < p[y]) p[y] = distance(x, y);
      }
    }
    return p;
  }

  /**
   * Adds the constraints of one Pareto arm escaping along objective j:
   * lambda^x - lambda^j <= mu^x - mu^j for every x != j, i.e. edges j -> x.
   * Returns nullopt when they close a negative cycle. O(d^2).
   */
  std::optional<ConstraintGraph> extend(std::span<const double> mu_k, std::size_t j,
                                        double tol = kFeasibilityTolerance) const {
    const std::size_t d = d_;
    if (mu_k.size() != d || j >= d) throw std::invalid_argument("ConstraintGraph::extend: bad shape");

    // Any new negative cycle uses a new edge j -> x and returns via an old path.
    for (std::size_t x = 0; x < d; ++x) {
      if (x == j || !reachable(x, j)) continue;
      if (mu_k[x] - mu_k[j] + distance(x, j) < -tol) return std::nullopt;
    }

    ConstraintGraph g = *this;
    // Distances out of j: first hop is either old or one of the new edges.
    for (std::size_t x = 0; x < d; ++x) {
      if (x == j) continue;
      bool found = reachable(j, x);
      double best = found ? distance(j, x) : 0.0;
      for (std::size_t y = 0; y < d; ++y) {
        if (y == j || !reachable(y, x)) continue;
        const double cand = mu_k[y] - mu_k[j] + distance(y, x);
        if (!found || cand < best) {
          best = cand;
          found = true;
        }
      }
      g.reach_[j * d + x] = found ? 1 : 0;
      g.dist_[j * d + x] = best;
    }
    // Distances into j are unchanged; everything else may route through j.
    for (std::size_t x = 0; x < d; ++x) {
      if (x == j || !g.reachable(x, j)) continue;
      const double to_j = g.distance(x, j);
      for (std::size_t y = 0; y < d; ++y) {
        if (y == j || y == x || !g.reachable(j, y)) continue;
        const double via = to_j + g.distance(j, y);
        if (!g.reachable(x, y) || via < g.distance(x, y)) {
          g.reach_[x * d + y] = 1;
          g.dist_[x * d + y] = via;
        }
      }
    }
    return g;
  }

  friend bool operator==(const ConstraintGraph&, const ConstraintGraph&) = default;

 private:
  std::size_t d_ = 0;
  std::vector<double> dist_;
  std::vector<std::uint8_t> reach_;
};

// phi[i] is the objective along which the i-th Pareto arm escapes.
using PhiMap = std::vector<std::uint32_t>;

struct Cell {
  PhiMap phi;
  ConstraintGraph graph;
  std::vector<double> witness;
};

/**
 * Depth-first enumeration of every direction map with a non-empty cell.
 * Rows of pareto_means are taken in order; children are tried j = 0..d-1
 * and a subtree is skipped as soon as its constraint system is infeasible.
 * visit(const PhiMap&, const ConstraintGraph&) is called once per leaf.
 */
template <typename Visitor>
void for_each_cell(const Matrix& pareto_means, Visitor&& visit, double tol = kFeasibilityTolerance) {
  const std::size_t p = pareto_means.rows();
  const std::size_t d = pareto_means.cols();
  if (d == 0) throw std::invalid_argument("for_each_cell: d must be positive");

  std::vector<ConstraintGraph> level(p + 1);
  level[0] = ConstraintGraph::unconstrained(d);
  PhiMap phi(p, 0);
  if (p == 0) {
    visit(static_cast<const PhiMap&>(phi), static_cast<const ConstraintGraph&>(level[0]));
    return;
  }

  // next[r] is the next child to try at depth r.
  std::vector<std::uint32_t> next(p, 0);
  std::size_t depth = 0;
  while (true) {
    if (next[depth] == d) {
      if (depth == 0) return;
      next[depth] = 0;
      --depth;
      continue;
    }
    const std::uint32_t j = next[depth]++;
    auto child = level[depth].extend(pareto_means.row(depth), j, tol);
    if (!child) continue;
    phi[depth] = j;
    if (depth + 1 == p) {
      visit(static_cast<const PhiMap&>(phi), static_cast<const ConstraintGraph&>(*child));
      continue;
    }
    level[depth + 1] = std::move(*child);
    ++depth;
  }
}

inline std::vector<Cell> enumerate_cells(const Matrix& pareto_means, double tol = kFeasibilityTolerance) {
  std::vector<Cell> cells;
  for_each_cell(
      pareto_means,
      [&](const PhiMap& phi, const ConstraintGraph& g) {
        cells.push_back(Cell{phi, g, g.witness_point()});
      },
      tol);
  return cells;
}

inline std::size_t count_cells(const Matrix& pareto_means) {
  std::size_t n = 0;
  for_each_cell(pareto_means, [&](const PhiMap&, const ConstraintGraph&) { ++n; });
  return n;
}

// binomial(p + d - 1, d - 1); throws std::overflow_error past 64 bits.
inline std::uint64_t cell_count_bound(std::uint64_t p, std::uint64_t d) {
  if (d == 0) throw std::invalid_argument("cell_count_bound: d must be positive");
  const std::uint64_t n = p + d - 1;
  std::uint64_t k = d - 1;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // acc * (n - k + i) / i stays integral at every step.
    acc = acc * (n - k + i);
    acc /= i;
    if (acc > static_cast<unsigned __int128>(UINT64_MAX)) {
      throw std::overflow_error("cell_count_bound: result exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace pareto_tas
