#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "eqgh/groups.hpp"
#include "eqgh/metric_space.hpp"

namespace eqgh {

/// ||g||_R: the largest displacement d(x, g x) over points x with both x and
/// g x in B(p, R). Zero when no such point exists.
inline double action_seminorm(const GroupAction& action, Element g, double R) {
  const auto& s = action.space();
  const auto b = ball(s, s.basepoint(), R);
  double worst = 0.0;
  for (PointIndex x : b) {
    const PointIndex gx = action.act(g, x);
    if (s(s.basepoint(), gx) < R) worst = std::max(worst, s(x, gx));
  }
  return worst;
}

enum class Invariance { Right, Left };

/// d_R(g, h) = ||g h^-1||_R (right-invariant), or ||g^-1 h||_R with Invariance::Left.
inline double action_pseudometric(const GroupAction& action, Element g, Element h, double R,
                                  Invariance inv = Invariance::Right) {
  const auto& G = action.group();
  const Element e = inv == Invariance::Right ? G.mul(g, G.inverse(h)) : G.mul(G.inverse(g), h);
  return action_seminorm(action, e, R);
}

struct SeminormTable {
  double R = 0.0;
  std::vector<double> values;  // indexed by element

  double operator[](Element g) const { return values[g]; }
};

inline SeminormTable seminorm_table(const GroupAction& action, double R) {
  SeminormTable t;
  t.R = R;
  t.values.resize(action.group().order());
  for (Element g = 0; g < action.group().order(); ++g) t.values[g] = action_seminorm(action, g, R);
  return t;
}

struct RegimeReport {
  double R = 0.0;
  bool separates = true;
  std::optional<Element> separation_witness;  // g != e with ||g||_R = 0
  bool triangle = true;
  std::optional<std::array<Element, 3>> triangle_witness;  // d(a,c) > d(a,b) + d(b,c)
  /// ||g h|| > ||g|| ||h||, as the multiplicative inequality is stated
  std::optional<std::pair<Element, Element>> submultiplicative_failure;
  /// ||g h|| > ||g|| + ||h||
  std::optional<std::pair<Element, Element>> subadditive_failure;
};

/// Exhaustive check of which metric properties d_R has at radius R.
inline RegimeReport metric_regime(const GroupAction& action, double R, Invariance inv = Invariance::Right) {
  const auto& G = action.group();
  const std::size_t n = G.order();
  const auto norm = seminorm_table(action, R);
  RegimeReport rep;
  rep.R = R;

  for (Element g = 1; g < n && rep.separates; ++g)
    if (norm[g] == 0.0) {
      rep.separates = false;
      rep.separation_witness = g;
    }

  std::vector<double> d(n * n);
  double scale = 0.0;
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) {
      d[a * n + b] = norm[inv == Invariance::Right ? G.mul(a, G.inverse(b)) : G.mul(G.inverse(a), b)];
      scale = std::max(scale, d[a * n + b]);
    }
  const double tol = 1e-12 * scale;
  for (Element a = 0; a < n && rep.triangle; ++a)
    for (Element b = 0; b < n && rep.triangle; ++b)
      for (Element c = 0; c < n && rep.triangle; ++c)
        if (d[a * n + c] > d[a * n + b] + d[b * n + c] + tol) {
          rep.triangle = false;
          rep.triangle_witness = std::array<Element, 3>{a, b, c};
        }

  for (Element g = 0; g < n; ++g)
    for (Element h = 0; h < n; ++h) {
      const double gh = norm[G.mul(g, h)];
      if (!rep.submultiplicative_failure && gh > norm[g] * norm[h] + tol) rep.submultiplicative_failure = {g, h};
      if (!rep.subadditive_failure && gh > norm[g] + norm[h] + tol) rep.subadditive_failure = {g, h};
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Nets

struct Net {
  double mu = 0.0;
  IndexSet members;

  bool operator==(const Net&) const = default;
};

/// Greedy maximal mu-separated set, scanning points in index order.
inline Net minimal_net(const FiniteMetricSpace& space, double mu) {
  Net net;
  net.mu = mu;
  for (PointIndex x = 0; x < space.size(); ++x) {
    const bool separated =
        std::all_of(net.members.begin(), net.members.end(), [&](PointIndex m) { return space(x, m) >= mu; });
    if (separated) net.members.push_back(x);
  }
  return net;
}

/// Every point is within < mu of a member.
inline bool net_covers(const FiniteMetricSpace& space, const Net& net) {
  for (PointIndex x = 0; x < space.size(); ++x) {
    const bool hit =
        std::any_of(net.members.begin(), net.members.end(), [&](PointIndex m) { return space(x, m) < net.mu; });
    if (!hit) return false;
  }
  return true;
}

/// Members are pairwise >= mu apart.
inline bool net_separated(const FiniteMetricSpace& space, const Net& net) {
  for (std::size_t i = 0; i < net.members.size(); ++i)
    for (std::size_t j = i + 1; j < net.members.size(); ++j)
      if (space(net.members[i], net.members[j]) < net.mu) return false;
  return true;
}

/// max over x of the number of members m whose open mu-ball meets B(x, mu).
inline std::size_t covering_multiplicity(const FiniteMetricSpace& space, const Net& net) {
  const std::size_t n = space.size();
  std::size_t worst = 0;
  for (PointIndex x = 0; x < n; ++x) {
    std::size_t count = 0;
    for (PointIndex m : net.members) {
      bool meets = false;
      for (PointIndex z = 0; z < n && !meets; ++z) meets = space(x, z) < net.mu && space(m, z) < net.mu;
      count += meets;
    }
    worst = std::max(worst, count);
  }
  return worst;
}

}  // namespace eqgh
