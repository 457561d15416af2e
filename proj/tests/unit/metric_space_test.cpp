#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "eqgh/metric_space.hpp"

using namespace eqgh;
using std::numbers::pi;

namespace {

// Exhaustive oracle: every subset of X x Y that covers both sides.
double min_distortion_all_relations(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  const std::size_t cells = x.size() * y.size();
  double best = INFINITY;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << cells); ++mask) {
    Correspondence c;
    for (std::size_t k = 0; k < cells; ++k)
      if ((mask >> k) & 1) c.pairs.emplace_back(k / y.size(), k % y.size());
    if (!c.covers(x.size(), y.size())) continue;
    best = std::min(best, distortion(x, y, c));
  }
  return best;
}

// Isometric iff some bijection preserves every distance.
bool isometric_by_permutation(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  if (x.size() != y.size()) return false;
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < x.size() && ok; ++i)
      for (std::size_t j = 0; j < x.size() && ok; ++j) ok = std::abs(x(i, j) - y(perm[i], perm[j])) < 1e-12;
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

FiniteMetricSpace permuted(const FiniteMetricSpace& s, const std::vector<std::size_t>& perm) {
  DistanceMatrix d(s.size(), std::vector<double>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) d[perm[i]][perm[j]] = s(i, j);
  return validate_space(d, perm[s.basepoint()]);
}

}  // namespace

TEST(ValidateSpace, OnePointSpace) {
  const auto s = validate_space({{0.0}}, 0);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.basepoint(), 0u);
}

TEST(ValidateSpace, TwoPointSpace) {
  const auto s = validate_space({{0, 1}, {1, 0}}, 0);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
}

TEST(ValidateSpace, TriangleViolationWitness) {
  try {
    validate_space({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}, 0);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0], (Violation{Violation::Kind::TriangleViolation, {0, 2, 1}}));
  }
}

TEST(ValidateSpace, ReportsEveryAxiomFailure) {
  try {
    validate_space({{0, 1, -1}, {2, 0, 0}, {-1, 0, 0}}, 0);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.has(Violation::Kind::AsymmetricMatrix));
    EXPECT_TRUE(e.has(Violation::Kind::NegativeDistance));
    EXPECT_TRUE(e.has(Violation::Kind::DuplicatePoint));
  }
}

TEST(ValidateSpace, StructuralErrors) {
  EXPECT_THROW(validate_space({{0, 1}, {1}}, 0), ValidationError);
  EXPECT_THROW(validate_space({{0, 1}, {1, 0}}, 2), ValidationError);
  EXPECT_THROW(validate_space({{1}}, 0), ValidationError);
}

TEST(ValidateSpace, RelativeTriangleTolerance) {
  // 1e-12 relative excess is absorbed, 1e-6 is not.
  EXPECT_NO_THROW(validate_space({{0, 1, 2 + 2e-12}, {1, 0, 1}, {2 + 2e-12, 1, 0}}, 0));
  EXPECT_THROW(validate_space({{0, 1, 2 + 1e-6}, {1, 0, 1}, {2 + 1e-6, 1, 0}}, 0), ValidationError);
}

TEST(Ball, OpenBallsOnCircle12) {
  const auto c = circle_space(12);
  EXPECT_TRUE(ball(c, 0, 0.0).empty());
  EXPECT_EQ(ball(c, 0, pi / 2), (IndexSet{0, 1, 2, 10, 11}));
  EXPECT_EQ(ball(c, 0, 4.0).size(), 12u);
}

TEST(Ball, BoundaryIsExcluded) {
  const auto s = validate_space({{0, 1}, {1, 0}}, 0);
  EXPECT_EQ(ball(s, 0, 1.0), (IndexSet{0}));
  EXPECT_EQ(ball(s, 0, std::nextafter(1.0, 2.0)), (IndexSet{0, 1}));
}

TEST(Radius, Examples) {
  EXPECT_EQ(radius(validate_space({{0.0}}, 0)), 0.0);
  EXPECT_DOUBLE_EQ(radius(circle_space(12)), pi);
  EXPECT_EQ(radius(validate_space({{0, 1}, {1, 0}}, 0)), 1.0);
}

TEST(GhDistance, Examples) {
  const auto one = validate_space({{0.0}}, 0);
  const auto two = validate_space({{0, 1}, {1, 0}}, 0);
  EXPECT_EQ(gh_distance_bruteforce(two, two), 0.0);
  EXPECT_DOUBLE_EQ(gh_distance_bruteforce(one, two), 0.5);
  const auto c4 = circle_space(4);
  EXPECT_NEAR(gh_distance_bruteforce(c4, scaled(c4, 1.1)), 0.05 * pi, 1e-12);
}

TEST(GhDistance, TooLarge) {
  const auto c = circle_space(8);
  EXPECT_THROW(gh_distance_bruteforce(c, c), InstanceTooLarge);  // 16 > 14
  SearchBounds loose;
  loose.gh_total_points = 16;
  EXPECT_EQ(gh_distance_bruteforce(c, c, loose), 0.0);
}

TEST(GhDistance, MatchesAllRelationsOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> size(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = random_euclidean_space(size(rng), 2, rng);
    const auto y = random_euclidean_space(size(rng), 2, rng);
    if (x.size() * y.size() > 16) continue;
    EXPECT_NEAR(2.0 * gh_distance_bruteforce(x, y), min_distortion_all_relations(x, y), 1e-12) << trial;
  }
}

TEST(GhDistance, WitnessIsACorrespondenceAttainingTheValue) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_euclidean_space(5, 2, rng);
    const auto y = random_euclidean_space(6, 3, rng);
    Correspondence c;
    const double d = min_distortion(x, y, &c);
    EXPECT_TRUE(c.covers(x.size(), y.size()));
    EXPECT_DOUBLE_EQ(distortion(x, y, c), d);
  }
}

TEST(MetricProperties, BallMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_euclidean_space(7, 2, rng);
    double r1 = r(rng), r2 = r(rng);
    if (r1 > r2) std::swap(r1, r2);
    const auto b1 = ball(s, 3, r1), b2 = ball(s, 3, r2);
    EXPECT_TRUE(std::includes(b2.begin(), b2.end(), b1.begin(), b1.end()));
  }
}

TEST(MetricProperties, RadiusDiameterSandwich) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = trial % 2 ? random_euclidean_space(9, 3, rng) : random_generic_space(9, rng);
    EXPECT_LE(radius(s), diameter(s));
    EXPECT_LE(diameter(s), 2.0 * radius(s) + 1e-12);
  }
}

TEST(MetricProperties, GhSymmetricAndZeroExactlyOnIsometricPairs) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + trial % 4;
    const auto x = random_euclidean_space(n, 2, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto x_perm = permuted(x, perm);
    const auto y = random_euclidean_space(n, 2, rng);

    EXPECT_EQ(gh_distance_bruteforce(x, y), gh_distance_bruteforce(y, x));
    EXPECT_EQ(gh_distance_bruteforce(x, x_perm), 0.0);
    EXPECT_TRUE(isometric_by_permutation(x, x_perm));
    EXPECT_EQ(gh_distance_bruteforce(x, y) == 0.0, isometric_by_permutation(x, y));
  }
}

TEST(MetricProperties, GeneratorsValidate) {
  std::mt19937_64 rng(17);
  for (std::size_t n = 1; n <= 40; ++n) {
    EXPECT_NO_THROW(circle_space(n));
    EXPECT_NO_THROW(random_euclidean_space(n, 3, rng));
    EXPECT_NO_THROW(random_generic_space(n, rng));
  }
}
