#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqgh/errors.hpp"
#include "eqgh/groups.hpp"
#include "eqgh/metric_space.hpp"

namespace eqgh {

/// Z_p rotating circle_n (circumference 2 pi) by n/p steps per generator.
inline GroupAction gen_circle(std::size_t n, std::size_t p) {
  if (n < 3) throw DivisibilityError("gen_circle: n must be at least 3");
  if (p == 0 || n % p != 0)
    throw DivisibilityError("gen_circle: p = " + std::to_string(p) + " does not divide n = " + std::to_string(n));
  const std::size_t step = n / p;
  std::vector<Permutation> perm(p, Permutation(n));
  for (std::size_t k = 0; k < p; ++k)
    for (PointIndex x = 0; x < n; ++x) perm[k][x] = (x + k * step) % n;
  return validate_action(cyclic_group(p), circle_space(n), std::move(perm));
}

/// Flat torus grid: n points on a circle of circumference 2 pi times m points
/// on a fiber circle of circumference c, l2-combined arc distances. Point
/// (i, j) has index i * m + j. Z_m rotates the fiber.
inline GroupAction gen_collapsing_torus(std::size_t n, std::size_t m, double c) {
  if (n < 3 || m < 3) throw std::invalid_argument("gen_collapsing_torus: n and m must be at least 3");
  if (!(c > 0.0)) throw std::invalid_argument("gen_collapsing_torus: c must be positive");
  const auto base = circle_space(n);
  const auto fiber = circle_space(m, c);
  const std::size_t total = n * m;
  DistanceMatrix d(total, std::vector<double>(total, 0.0));
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = 0; b < total; ++b) {
      const double u = base(a / m, b / m), v = fiber(a % m, b % m);
      d[a][b] = std::hypot(u, v);
    }
  std::vector<Permutation> perm(m, Permutation(total));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t a = 0; a < total; ++a) perm[k][a] = (a / m) * m + (a % m + k) % m;
  return validate_action(cyclic_group(m), validate_space(d, 0), std::move(perm));
}

/// Random effective isometric action: a cyclic or dihedral group of order
/// at most max_order acting on free orbits of random points in R^3 by
/// rotations about (and, for dihedral groups, reflections through planes
/// containing) the z-axis. At most max_points points; basepoint random.
template <typename Rng>
GroupAction random_action(Rng& rng, std::size_t max_points, std::size_t max_order) {
  struct Choice {
    FiniteGroup group;
    bool dihedral;
    std::size_t k;
  };
  std::vector<Choice> choices;
  for (std::size_t k = 1; k <= max_order && k <= max_points; ++k) choices.push_back({cyclic_group(k), false, k});
  for (std::size_t k = 2; 2 * k <= max_order && 2 * k <= max_points; ++k)
    choices.push_back({dihedral_group(k), true, k});
  const auto& choice = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
  const std::size_t order = choice.group.order();
  const std::size_t orbit_count =
      std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, max_points / order))(rng);

  // element e: rotation exponent e % k, reflected if e >= k (dihedral only)
  auto apply = [&](std::size_t e, const std::array<double, 3>& v) {
    const std::size_t k = choice.k;
    const bool reflect = choice.dihedral && e >= k;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(e % k) / static_cast<double>(k);
    // s r^j : rotate by j, then reflect y -> -y
    double x = std::cos(theta) * v[0] - std::sin(theta) * v[1];
    double y = std::sin(theta) * v[0] + std::cos(theta) * v[1];
    if (reflect) y = -y;
    return std::array<double, 3>{x, y, v[2]};
  };

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::array<double, 3>> pts;
  for (std::size_t o = 0; o < orbit_count; ++o) {
    const std::array<double, 3> seed{u(rng), u(rng), u(rng)};
    for (std::size_t e = 0; e < order; ++e) pts.push_back(apply(e, seed));
  }
  const std::size_t n = pts.size();
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1], dz = pts[i][2] - pts[j][2];
      d[i][j] = d[j][i] = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  const PointIndex base = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);

  // point (o, h) = h . seed_o sits at index o * order + h; g maps it to (o, g h)
  std::vector<Permutation> perm(order, Permutation(n));
  for (Element g = 0; g < order; ++g)
    for (std::size_t o = 0; o < orbit_count; ++o)
      for (Element h = 0; h < order; ++h) perm[g][o * order + h] = o * order + choice.group.mul(g, h);
  return validate_action(choice.group, validate_space(d, base), std::move(perm));
}

}  // namespace eqgh
