#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pareto_tas/matrix.hpp"
#include "pareto_tas/model.hpp"

namespace pareto_tas::generators {

enum class Geometry { SphereQuadrantPlusOrigin, Staircase2d };

inline Geometry parse_geometry(const std::string& name) {
  if (name == "sphere-quadrant-plus-origin") return Geometry::SphereQuadrantPlusOrigin;
  if (name == "staircase-2d") return Geometry::Staircase2d;
  throw std::invalid_argument("unknown geometry: " + name);
}

/**
 * p points on the positive orthant of the unit sphere (mutually
 * non-dominated almost surely) followed by the origin, which they all
 * dominate. Rows 0..p-1 are the Pareto set.
 */
inline Matrix sphere_quadrant_plus_origin(std::size_t p, std::size_t d, std::mt19937_64& rng) {
  if (d == 0) throw std::invalid_argument("sphere_quadrant_plus_origin: d must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(p + 1, d, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double norm = 0.0;
    while (norm < 1e-12) {
      norm = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        m(i, j) = std::abs(normal(rng));
        norm += m(i, j) * m(i, j);
      }
      norm = std::sqrt(norm);
    }
    for (std::size_t j = 0; j < d; ++j) m(i, j) /= norm;
  }
  return m;
}

/**
 * p points forming a strict staircase inside (0, 10]^2 followed by the
 * origin. Abscissae ascend while ordinates descend.
 */
inline Matrix staircase_2d(std::size_t p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  auto distinct_sorted = [&] {
    std::vector<double> v;
    while (v.size() < p) {
      const double x = coord(rng);
      if (x <= 0.0) continue;
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    }
    std::sort(v.begin(), v.end());
    return v;
  };
  const std::vector<double> xs = distinct_sorted();
  const std::vector<double> ys = distinct_sorted();
  Matrix m(p + 1, 2, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    m(i, 0) = xs[i];
    m(i, 1) = ys[p - 1 - i];
  }
  return m;
}

inline Matrix generate(Geometry g, std::size_t p, std::size_t d, std::mt19937_64& rng) {
  if (g == Geometry::Staircase2d) {
    if (d != 2) throw std::invalid_argument("staircase-2d requires d == 2");
    return staircase_2d(p, rng);
  }
  return sphere_quadrant_plus_origin(p, d, rng);
}

// Uniform on the open simplex (normalized exponentials).
inline std::vector<double> simplex_weights(std::size_t K, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(K);
  double total = 0.0;
  for (double& x : w) {
    do x = e(rng);
    while (x <= 0.0);
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

// K x d means with i.i.d. U[lo, hi] entries.
inline Matrix uniform_means(std::size_t K, std::size_t d, std::mt19937_64& rng, double lo = 0.0,
                            double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(K, d);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < d; ++j) m(k, j) = u(rng);
  }
  return m;
}

// Means on a coarse integer lattice so ties and shared coordinates occur.
inline Matrix lattice_means(std::size_t K, std::size_t d, std::mt19937_64& rng, int levels = 4) {
  std::uniform_int_distribution<int> u(0, levels - 1);
  Matrix m(K, d);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < d; ++j) m(k, j) = u(rng);
  }
  return m;
}

}  // namespace pareto_tas::generators
