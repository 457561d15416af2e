#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "eqgh/errors.hpp"
#include "eqgh/search_bounds.hpp"

namespace eqgh {

using PointIndex = std::size_t;
using IndexSet = std::vector<std::size_t>;
using DistanceMatrix = std::vector<std::vector<double>>;

class FiniteMetricSpace;
FiniteMetricSpace validate_space(const DistanceMatrix& dist, PointIndex basepoint);

/// A validated finite pointed metric space. Only validate_space builds one,
/// so every instance satisfies the metric axioms.
class FiniteMetricSpace {
 public:
  std::size_t size() const noexcept { return n_; }
  PointIndex basepoint() const noexcept { return basepoint_; }

  double operator()(PointIndex i, PointIndex j) const noexcept { return dist_[i * n_ + j]; }
  std::span<const double> row(PointIndex i) const noexcept { return {dist_.data() + i * n_, n_}; }

  double max_entry() const noexcept {
    return dist_.empty() ? 0.0 : *std::max_element(dist_.begin(), dist_.end());
  }
  double diameter() const noexcept { return max_entry(); }

  DistanceMatrix matrix() const {
    DistanceMatrix m(n_, std::vector<double>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) m[i][j] = (*this)(i, j);
    return m;
  }

  /// Same points, different basepoint.
  FiniteMetricSpace with_basepoint(PointIndex p) const {
    FiniteMetricSpace copy = *this;
    if (p >= n_) throw ValidationError({{Violation::Kind::BasepointOutOfRange, {p}}});
    copy.basepoint_ = p;
    return copy;
  }

  bool operator==(const FiniteMetricSpace&) const = default;

 private:
  friend FiniteMetricSpace validate_space(const DistanceMatrix& dist, PointIndex basepoint);
  FiniteMetricSpace() = default;

  std::size_t n_ = 0;
  PointIndex basepoint_ = 0;
  std::vector<double> dist_;
};

namespace detail {
constexpr std::size_t kMaxReportedTriangleViolations = 64;
}

/// Checks the metric axioms and returns a validated space. Throws
/// ValidationError listing every violation otherwise. The triangle
/// inequality is checked with a relative slack of 1e-9 * max entry.
inline FiniteMetricSpace validate_space(const DistanceMatrix& dist, PointIndex basepoint) {
  using K = Violation::Kind;
  std::vector<Violation> bad;
  const std::size_t n = dist.size();
  for (const auto& row : dist)
    if (row.size() != n) throw ValidationError({{K::NotSquare, {n, row.size()}}});
  if (n == 0) throw ValidationError({{K::NotSquare, {0, 0}}});
  if (basepoint >= n) bad.push_back({K::BasepointOutOfRange, {basepoint}});

  double max_entry = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i][i] != 0.0) bad.push_back({K::NonZeroDiagonal, {i}});
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = dist[i][j], b = dist[j][i];
      if (!(a >= 0.0) || !(b >= 0.0)) {
        bad.push_back({K::NegativeDistance, {i, j}});
        continue;
      }
      max_entry = std::max({max_entry, a, b});
      if (a != b) bad.push_back({K::AsymmetricMatrix, {i, j}});
      if (a == 0.0 || b == 0.0) bad.push_back({K::DuplicatePoint, {i, j}});
    }
  }
  if (bad.empty()) {
    const double tol = 1e-9 * max_entry;
    std::size_t reported = 0;
    for (std::size_t i = 0; i < n && reported < detail::kMaxReportedTriangleViolations; ++i)
      for (std::size_t k = i + 1; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || j == k) continue;
          if (dist[i][k] > dist[i][j] + dist[j][k] + tol) {
            bad.push_back({K::TriangleViolation, {i, k, j}});
            if (++reported >= detail::kMaxReportedTriangleViolations) break;
          }
        }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));

  FiniteMetricSpace s;
  s.n_ = n;
  s.basepoint_ = basepoint;
  s.dist_.reserve(n * n);
  for (const auto& row : dist) s.dist_.insert(s.dist_.end(), row.begin(), row.end());
  return s;
}

/// Open ball { i : d(center, i) < r }, ascending.
inline IndexSet ball(const FiniteMetricSpace& space, PointIndex center, double r) {
  IndexSet out;
  for (PointIndex i = 0; i < space.size(); ++i)
    if (space(center, i) < r) out.push_back(i);
  return out;
}

/// min over p of max over q of d(p, q).
inline double radius(const FiniteMetricSpace& space) {
  double best = INFINITY;
  for (PointIndex p = 0; p < space.size(); ++p) {
    const auto row = space.row(p);
    best = std::min(best, *std::max_element(row.begin(), row.end()));
  }
  return best;
}

inline double diameter(const FiniteMetricSpace& space) { return space.diameter(); }

/// Relation between two point sets covering both sides.
struct Correspondence {
  std::vector<std::pair<PointIndex, PointIndex>> pairs;

  bool covers(std::size_t source_size, std::size_t target_size) const {
    std::vector<bool> s(source_size, false), t(target_size, false);
    for (auto [a, b] : pairs) {
      if (a >= source_size || b >= target_size) return false;
      s[a] = t[b] = true;
    }
    return std::all_of(s.begin(), s.end(), [](bool v) { return v; }) &&
           std::all_of(t.begin(), t.end(), [](bool v) { return v; });
  }
};

/// max over pairs in the relation of |d_X(x,x') - d_Y(y,y')|.
inline double distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const Correspondence& c) {
  double worst = 0.0;
  for (auto [a, b] : c.pairs)
    for (auto [a2, b2] : c.pairs) worst = std::max(worst, std::abs(x(a, a2) - y(b, b2)));
  return worst;
}

namespace detail {

// Decision procedure: is there a pair of maps f: X -> Y, g: Y -> X whose
// joint graph has distortion <= delta? Every correspondence contains such a
// union of graphs, so this decides "some correspondence has distortion <= delta".
class CorrespondenceSearch {
 public:
  CorrespondenceSearch(const FiniteMetricSpace& x, const FiniteMetricSpace& y) : x_(x), y_(y) {
    if (x.size() > 64 || y.size() > 64) throw InstanceTooLarge("gh_distance_bruteforce: a side exceeds 64 points");
  }

  bool feasible(double delta, Correspondence* witness) {
    const std::size_t nx = x_.size(), ny = y_.size();
    // fx_[(a*ny+b)*nx + a2]: targets b2 of a2 compatible with the pair (a, b);
    // gy_[(a*ny+b)*ny + b2]: sources a2 of b2 compatible with it.
    fx_.assign(nx * ny * nx, 0);
    gy_.assign(nx * ny * ny, 0);
    for (PointIndex a = 0; a < nx; ++a)
      for (PointIndex b = 0; b < ny; ++b)
        for (PointIndex a2 = 0; a2 < nx; ++a2)
          for (PointIndex b2 = 0; b2 < ny; ++b2)
            if (std::abs(x_(a, a2) - y_(b, b2)) <= delta) {
              fx_[(a * ny + b) * nx + a2] |= std::uint64_t{1} << b2;
              gy_[(a * ny + b) * ny + b2] |= std::uint64_t{1} << a2;
            }
    State s;
    s.fdom.assign(nx, full(ny));
    s.gdom.assign(ny, full(nx));
    s.fdone.assign(nx, false);
    s.covered = 0;
    pairs_.clear();
    const bool ok = extend(s);
    if (ok && witness) witness->pairs = pairs_;
    return ok;
  }

 private:
  struct State {
    std::vector<std::uint64_t> fdom, gdom;
    std::vector<bool> fdone;
    std::uint64_t covered;
  };

  static std::uint64_t full(std::size_t n) { return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

  // Adds (a, b) and narrows every pending domain; false on a wipeout that
  // cannot be repaired.
  bool add(State& s, PointIndex a, PointIndex b) const {
    const std::size_t nx = x_.size(), ny = y_.size();
    s.covered |= std::uint64_t{1} << b;
    std::uint64_t reachable = s.covered;
    for (PointIndex a2 = 0; a2 < nx; ++a2) {
      if (s.fdone[a2]) continue;
      s.fdom[a2] &= fx_[(a * ny + b) * nx + a2];
      if (!s.fdom[a2]) return false;
      reachable |= s.fdom[a2];
    }
    for (PointIndex b2 = 0; b2 < ny; ++b2) {
      s.gdom[b2] &= gy_[(a * ny + b) * ny + b2];
      // an uncovered point with no source left must still be hit by some f
      if (!s.gdom[b2] && !((reachable >> b2) & 1)) return false;
    }
    return true;
  }

  bool extend(State& s) {
    const std::size_t nx = x_.size(), ny = y_.size();
    // most constrained pending variable: f-variables first, then uncovered y
    std::size_t best = nx + ny;
    int best_count = 65;
    for (PointIndex a = 0; a < nx; ++a)
      if (!s.fdone[a] && std::popcount(s.fdom[a]) < best_count) {
        best = a;
        best_count = std::popcount(s.fdom[a]);
      }
    if (best == nx + ny)
      for (PointIndex b = 0; b < ny; ++b)
        if (!((s.covered >> b) & 1) && std::popcount(s.gdom[b]) < best_count) {
          best = nx + b;
          best_count = std::popcount(s.gdom[b]);
        }
    if (best == nx + ny) return true;

    const bool is_f = best < nx;
    for (std::uint64_t bits = is_f ? s.fdom[best] : s.gdom[best - nx]; bits; bits &= bits - 1) {
      const auto v = static_cast<PointIndex>(std::countr_zero(bits));
      const PointIndex a = is_f ? best : v, b = is_f ? v : best - nx;
      State t = s;
      if (is_f) t.fdone[a] = true;
      pairs_.emplace_back(a, b);
      if (add(t, a, b) && extend(t)) return true;
      pairs_.pop_back();
    }
    return false;
  }

  const FiniteMetricSpace& x_;
  const FiniteMetricSpace& y_;
  std::vector<std::uint64_t> fx_, gy_;
  std::vector<std::pair<PointIndex, PointIndex>> pairs_;
};

}  // namespace detail

/// Minimal correspondence distortion over all correspondences, found by
/// binary search over the finite set of attainable distortion values.
inline double min_distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                             Correspondence* witness = nullptr,
                             const SearchBounds& bounds = SearchBounds{}) {
  if (x.size() + y.size() > bounds.gh_total_points)
    throw InstanceTooLarge("gh_distance_bruteforce: |X|+|Y| = " +
                           std::to_string(x.size() + y.size()) + " exceeds " +
                           std::to_string(bounds.gh_total_points));
  std::vector<double> candidates;
  candidates.reserve(x.size() * x.size() * y.size() * y.size());
  for (PointIndex a = 0; a < x.size(); ++a)
    for (PointIndex a2 = a; a2 < x.size(); ++a2)
      for (PointIndex b = 0; b < y.size(); ++b)
        for (PointIndex b2 = b; b2 < y.size(); ++b2) candidates.push_back(std::abs(x(a, a2) - y(b, b2)));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  detail::CorrespondenceSearch search(x, y);
  std::size_t lo = 0, hi = candidates.size() - 1;  // the largest candidate always works
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (search.feasible(candidates[mid], nullptr))
      hi = mid;
    else
      lo = mid + 1;
  }
  search.feasible(candidates[lo], witness);
  return candidates[lo];
}

/// Half the minimal correspondence distortion.
inline double gh_distance_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                     const SearchBounds& bounds = SearchBounds{}) {
  return 0.5 * min_distortion(x, y, nullptr, bounds);
}

// ---------------------------------------------------------------------------
// Generators

/// n equally spaced points on a circle of the given circumference, arc metric.
inline FiniteMetricSpace circle_space(std::size_t n, double circumference = 2.0 * std::numbers::pi,
                                      PointIndex basepoint = 0) {
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i > j ? i - j : j - i;
      const std::size_t steps = std::min(k, n - k);
      d[i][j] = circumference * static_cast<double>(steps) / static_cast<double>(n);
    }
  return validate_space(d, basepoint);
}

/// Every distance multiplied by factor > 0.
inline FiniteMetricSpace scaled(const FiniteMetricSpace& s, double factor) {
  auto m = s.matrix();
  for (auto& row : m)
    for (auto& v : row) v *= factor;
  return validate_space(m, s.basepoint());
}

/// Euclidean distances between n random points in the unit cube of R^dim.
template <typename Rng>
FiniteMetricSpace random_euclidean_space(std::size_t n, std::size_t dim, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& c : p) c = u(rng);
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      d[i][j] = d[j][i] = std::sqrt(s);
    }
  return validate_space(d, 0);
}

/// Random metric with all off-diagonal distances in [1, 2) (so the triangle
/// inequality holds automatically) and, almost surely, pairwise distinct.
template <typename Rng>
FiniteMetricSpace random_generic_space(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(1.0, 2.0);
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(rng);
  return validate_space(d, 0);
}

}  // namespace eqgh
