#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "eqgh/errors.hpp"
#include "eqgh/metric_space.hpp"
#include "eqgh/search_bounds.hpp"

namespace eqgh {

using Element = std::size_t;
using CayleyTable = std::vector<std::vector<std::size_t>>;
using Permutation = std::vector<PointIndex>;

class FiniteGroup;
FiniteGroup validate_group(const CayleyTable& cayley);

/// Finite group given by its multiplication table; the identity is element 0.
class FiniteGroup {
 public:
  std::size_t order() const noexcept { return order_; }
  Element identity() const noexcept { return 0; }
  Element mul(Element a, Element b) const noexcept { return table_[a * order_ + b]; }
  Element inverse(Element g) const noexcept { return inverse_[g]; }

  CayleyTable table() const {
    CayleyTable t(order_, std::vector<std::size_t>(order_));
    for (Element a = 0; a < order_; ++a)
      for (Element b = 0; b < order_; ++b) t[a][b] = mul(a, b);
    return t;
  }

  Element power(Element g, std::size_t k) const {
    Element acc = 0;
    for (std::size_t i = 0; i < k; ++i) acc = mul(acc, g);
    return acc;
  }

  std::size_t element_order(Element g) const {
    std::size_t k = 1;
    for (Element acc = g; acc != 0; acc = mul(acc, g)) ++k;
    return k;
  }

  /// Least common multiple of the element orders.
  std::size_t exponent() const {
    std::size_t e = 1;
    for (Element g = 0; g < order_; ++g) e = std::lcm(e, element_order(g));
    return e;
  }

  bool is_abelian() const {
    for (Element a = 0; a < order_; ++a)
      for (Element b = a + 1; b < order_; ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  /// Closure of a set of elements under multiplication, ascending.
  std::vector<Element> generated_subgroup(std::span<const Element> gens) const {
    std::vector<bool> in(order_, false);
    std::vector<Element> out{0};
    in[0] = true;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (Element s : gens) {
        const Element h = mul(out[i], s);
        if (!in[h]) {
          in[h] = true;
          out.push_back(h);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Greedy generating set: scan elements ascending, keep each one not yet
  /// generated by the previous picks. Deterministic.
  std::vector<Element> generators() const {
    std::vector<Element> gens;
    std::vector<bool> covered(order_, false);
    covered[0] = true;
    for (Element g = 1; g < order_; ++g) {
      if (covered[g]) continue;
      gens.push_back(g);
      for (Element h : generated_subgroup(gens)) covered[h] = true;
    }
    return gens;
  }

  bool operator==(const FiniteGroup&) const = default;

 private:
  friend FiniteGroup validate_group(const CayleyTable& cayley);
  FiniteGroup() = default;

  std::size_t order_ = 0;
  std::vector<std::size_t> table_;
  std::vector<Element> inverse_;
};

/// Checks closure, identity at 0, inverses and associativity.
inline FiniteGroup validate_group(const CayleyTable& cayley) {
  using K = Violation::Kind;
  const std::size_t n = cayley.size();
  if (n == 0) throw ValidationError({{K::NotSquare, {0, 0}}});
  for (const auto& row : cayley)
    if (row.size() != n) throw ValidationError({{K::NotSquare, {n, row.size()}}});
  std::vector<Violation> bad;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (cayley[a][b] >= n) bad.push_back({K::EntryOutOfRange, {a, b}});
  if (!bad.empty()) throw ValidationError(std::move(bad));

  for (std::size_t g = 0; g < n; ++g)
    if (cayley[0][g] != g || cayley[g][0] != g) {
      bad.push_back({K::NoIdentity, {g}});
      break;
    }
  if (!bad.empty()) throw ValidationError(std::move(bad));

  std::vector<Element> inverse(n, n);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t h = 0; h < n; ++h)
      if (cayley[g][h] == 0 && cayley[h][g] == 0) {
        inverse[g] = h;
        break;
      }
    if (inverse[g] == n) bad.push_back({K::NoInverse, {g}});
  }
  for (std::size_t a = 0; a < n && bad.size() < 64; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]]) {
          bad.push_back({K::NotAssociative, {a, b, c}});
          goto next_a;
        }
  next_a:;
  if (!bad.empty()) throw ValidationError(std::move(bad));

  FiniteGroup g;
  g.order_ = n;
  g.inverse_ = std::move(inverse);
  g.table_.reserve(n * n);
  for (const auto& row : cayley) g.table_.insert(g.table_.end(), row.begin(), row.end());
  return g;
}

inline FiniteGroup trivial_group() { return validate_group({{0}}); }

/// Z_n with element k standing for k (mod n).
inline FiniteGroup cyclic_group(std::size_t n) {
  CayleyTable t(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return validate_group(t);
}

/// Dihedral group of order 2n: element k < n is rotation r^k, element n + k
/// is the reflection s r^k.
inline FiniteGroup dihedral_group(std::size_t n) {
  const std::size_t m = 2 * n;
  auto decode = [n](std::size_t e) { return std::pair{e / n, e % n}; };  // (s-exponent, r-exponent)
  CayleyTable t(m, std::vector<std::size_t>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      auto [sa, ra] = decode(a);
      auto [sb, rb] = decode(b);
      // s^sa r^ra s^sb r^rb = s^(sa+sb) r^(±ra + rb)
      const std::size_t r = sb ? (n - ra + rb) % n : (ra + rb) % n;
      t[a][b] = ((sa + sb) % 2) * n + r;
    }
  return validate_group(t);
}

/// Homomorphism extension from generator images. Walks the Cayley graph from
/// the identity and returns nullopt if the images are inconsistent or the
/// result fails the homomorphism law on any pair.
template <typename T, typename Mul, typename Eq>
std::optional<std::vector<T>> extend_homomorphism(const FiniteGroup& src, std::span<const Element> gens,
                                                  std::span<const T> gen_images, const T& identity,
                                                  Mul mul, Eq eq) {
  const std::size_t n = src.order();
  std::vector<std::optional<T>> img(n);
  img[0] = identity;
  std::queue<Element> frontier;
  frontier.push(0);
  while (!frontier.empty()) {
    const Element g = frontier.front();
    frontier.pop();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const Element h = src.mul(g, gens[i]);
      T value = mul(*img[g], gen_images[i]);
      if (!img[h]) {
        img[h] = std::move(value);
        frontier.push(h);
      } else if (!eq(*img[h], value)) {
        return std::nullopt;
      }
    }
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& v : img) {
    if (!v) return std::nullopt;  // gens do not generate
    out.push_back(std::move(*v));
  }
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b)
      if (!eq(out[src.mul(a, b)], mul(out[a], out[b]))) return std::nullopt;
  return out;
}

/// An isomorphism src -> dst as an element map, if one exists.
inline std::optional<std::vector<Element>> find_isomorphism(const FiniteGroup& src, const FiniteGroup& dst) {
  if (src.order() != dst.order()) return std::nullopt;
  const auto gens = src.generators();
  std::vector<std::vector<Element>> options(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (Element h = 0; h < dst.order(); ++h)
      if (dst.element_order(h) == src.element_order(gens[i])) options[i].push_back(h);

  std::vector<Element> pick(gens.size());
  std::optional<std::vector<Element>> found;
  auto recurse = [&](auto&& self, std::size_t i) -> bool {
    if (i == gens.size()) {
      auto m = extend_homomorphism<Element>(
          src, gens, std::span<const Element>(pick), Element{0},
          [&](Element a, Element b) { return dst.mul(a, b); }, [](Element a, Element b) { return a == b; });
      if (!m) return false;
      std::vector<bool> hit(dst.order(), false);
      for (Element e : *m) {
        if (hit[e]) return false;
        hit[e] = true;
      }
      found = std::move(m);
      return true;
    }
    for (Element h : options[i]) {
      pick[i] = h;
      if (self(self, i + 1)) return true;
    }
    return false;
  };
  recurse(recurse, 0);
  return found;
}

/// A subgroup together with its inclusion into the parent group.
struct Subgroup {
  FiniteGroup group;
  std::vector<Element> embedding;  // subgroup element -> parent element, ascending
};

/// Relabels a closed subset (must contain 0) as a standalone group.
inline Subgroup make_subgroup(const FiniteGroup& parent, std::vector<Element> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (elements.empty() || elements.front() != 0) throw NotASubgroup("subset does not contain the identity");
  std::vector<std::size_t> local(parent.order(), parent.order());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] >= parent.order()) throw NotASubgroup("element out of range");
    local[elements[i]] = i;
  }
  CayleyTable t(elements.size(), std::vector<std::size_t>(elements.size()));
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = 0; j < elements.size(); ++j) {
      const std::size_t k = local[parent.mul(elements[i], elements[j])];
      if (k == parent.order()) throw NotASubgroup("subset is not closed under multiplication");
      t[i][j] = k;
    }
  return {validate_group(t), std::move(elements)};
}

// ---------------------------------------------------------------------------
// Actions

/// A finite group acting effectively by isometries on a finite pointed space.
class GroupAction;
GroupAction validate_action(FiniteGroup group, FiniteMetricSpace space, std::vector<Permutation> perm);

class GroupAction {
 public:
  const FiniteGroup& group() const noexcept { return group_; }
  const FiniteMetricSpace& space() const noexcept { return space_; }
  const std::vector<Permutation>& perms() const noexcept { return perm_; }
  PointIndex act(Element g, PointIndex x) const noexcept { return perm_[g][x]; }

  bool operator==(const GroupAction&) const = default;

 private:
  friend GroupAction validate_action(FiniteGroup, FiniteMetricSpace, std::vector<Permutation>);
  GroupAction(FiniteGroup g, FiniteMetricSpace s, std::vector<Permutation> p)
      : group_(std::move(g)), space_(std::move(s)), perm_(std::move(p)) {}

  FiniteGroup group_;
  FiniteMetricSpace space_;
  std::vector<Permutation> perm_;
};

inline bool is_permutation_of(const Permutation& p, std::size_t n) {
  if (p.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto v : p) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

/// Checks that perm is an effective isometric action of group on space.
/// Isometry is checked to 1e-12 * max distance.
inline GroupAction validate_action(FiniteGroup group, FiniteMetricSpace space, std::vector<Permutation> perm) {
  using K = Violation::Kind;
  const std::size_t n = space.size(), order = group.order();
  std::vector<Violation> bad;
  if (perm.size() != order) throw ValidationError({{K::NotPermutation, {perm.size(), order}}});
  for (Element g = 0; g < order; ++g)
    if (!is_permutation_of(perm[g], n)) bad.push_back({K::NotPermutation, {g}});
  if (!bad.empty()) throw ValidationError(std::move(bad));

  const double tol = 1e-12 * space.max_entry();
  for (Element g = 0; g < order; ++g) {
    bool isometric = true;
    for (PointIndex i = 0; i < n && isometric; ++i)
      for (PointIndex j = i + 1; j < n; ++j)
        if (std::abs(space(perm[g][i], perm[g][j]) - space(i, j)) > tol) {
          bad.push_back({K::NotIsometric, {g, i, j}});
          isometric = false;
          break;
        }
  }
  for (Element g = 0; g < order; ++g)
    for (Element h = 0; h < order; ++h) {
      const auto& gh = perm[group.mul(g, h)];
      for (PointIndex x = 0; x < n; ++x)
        if (gh[x] != perm[g][perm[h][x]]) {
          bad.push_back({K::NotHomomorphic, {g, h}});
          break;
        }
    }
  for (Element g = 1; g < order; ++g) {
    bool fixes_all = true;
    for (PointIndex x = 0; x < n; ++x)
      if (perm[g][x] != x) {
        fixes_all = false;
        break;
      }
    if (fixes_all) bad.push_back({K::NotEffective, {g}});
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return GroupAction(std::move(group), std::move(space), std::move(perm));
}

inline Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), PointIndex{0});
  return p;
}

inline GroupAction trivial_action(const FiniteMetricSpace& space) {
  return validate_action(trivial_group(), space, {identity_permutation(space.size())});
}

/// The same space acted on by a subgroup.
inline GroupAction restrict_action(const GroupAction& action, const Subgroup& sub) {
  std::vector<Permutation> perm;
  perm.reserve(sub.embedding.size());
  for (Element g : sub.embedding) perm.push_back(action.perms()[g]);
  return validate_action(sub.group, action.space(), std::move(perm));
}

/// Gamma(r) = { g : d(p, g p) < r }, ascending.
inline std::vector<Element> gamma_r(const GroupAction& action, double r) {
  std::vector<Element> out;
  const auto& s = action.space();
  const PointIndex p = s.basepoint();
  for (Element g = 0; g < action.group().order(); ++g)
    if (s(p, action.act(g, p)) < r) out.push_back(g);
  return out;
}

/// Orbits of the action, each ascending, ordered by least member.
inline std::vector<IndexSet> orbits(const GroupAction& action) {
  const std::size_t n = action.space().size();
  std::vector<bool> seen(n, false);
  std::vector<IndexSet> out;
  for (PointIndex x = 0; x < n; ++x) {
    if (seen[x]) continue;
    IndexSet orbit;
    for (Element g = 0; g < action.group().order(); ++g) {
      const PointIndex y = action.act(g, x);
      if (!seen[y]) {
        seen[y] = true;
        orbit.push_back(y);
      }
    }
    std::sort(orbit.begin(), orbit.end());
    out.push_back(std::move(orbit));
  }
  return out;
}

/// Quotient by the action, d(O1, O2) = min over representatives.
inline FiniteMetricSpace orbit_space(const GroupAction& action) {
  const auto orbs = orbits(action);
  const auto& s = action.space();
  const std::size_t m = orbs.size();
  DistanceMatrix d(m, std::vector<double>(m, 0.0));
  PointIndex base = 0;
  for (std::size_t a = 0; a < m; ++a) {
    if (std::binary_search(orbs[a].begin(), orbs[a].end(), s.basepoint())) base = a;
    for (std::size_t b = a + 1; b < m; ++b) {
      double best = INFINITY;
      for (PointIndex x : orbs[a])
        for (PointIndex y : orbs[b]) best = std::min(best, s(x, y));
      d[a][b] = d[b][a] = best;
    }
  }
  try {
    return validate_space(d, base);
  } catch (const ValidationError& e) {
    throw QuotientNotMetric(std::string("orbit space is not a metric space: ") + e.what());
  }
}

namespace detail {

class AutomorphismSearch {
 public:
  AutomorphismSearch(const FiniteMetricSpace& s, std::size_t order_cap) : s_(s), cap_(order_cap) {
    const std::size_t n = s.size();
    tol_ = 1e-12 * s.max_entry();
    profiles_.resize(n);
    for (PointIndex i = 0; i < n; ++i) {
      auto r = s.row(i);
      profiles_[i].assign(r.begin(), r.end());
      std::sort(profiles_[i].begin(), profiles_[i].end());
    }
    compatible_.assign(n, std::vector<bool>(n, false));
    for (PointIndex i = 0; i < n; ++i)
      for (PointIndex j = 0; j < n; ++j) {
        bool same = true;
        for (std::size_t k = 0; k < n && same; ++k)
          same = std::abs(profiles_[i][k] - profiles_[j][k]) <= tol_;
        compatible_[i][j] = same;
      }
  }

  std::vector<Permutation> run() {
    const std::size_t n = s_.size();
    sigma_.assign(n, 0);
    used_.assign(n, false);
    found_.clear();
    extend(0);
    std::sort(found_.begin(), found_.end());
    return found_;
  }

 private:
  void extend(PointIndex i) {
    const std::size_t n = s_.size();
    if (i == n) {
      found_.push_back(sigma_);
      if (found_.size() > cap_)
        throw InstanceTooLarge("isometry_group: more than " + std::to_string(cap_) + " automorphisms");
      return;
    }
    for (PointIndex j = 0; j < n; ++j) {
      if (used_[j] || !compatible_[i][j]) continue;
      bool ok = true;
      for (PointIndex k = 0; k < i && ok; ++k) ok = std::abs(s_(i, k) - s_(j, sigma_[k])) <= tol_;
      if (!ok) continue;
      sigma_[i] = j;
      used_[j] = true;
      extend(i + 1);
      used_[j] = false;
    }
  }

  const FiniteMetricSpace& s_;
  std::size_t cap_;
  double tol_ = 0.0;
  std::vector<std::vector<double>> profiles_;
  std::vector<std::vector<bool>> compatible_;
  Permutation sigma_;
  std::vector<bool> used_;
  std::vector<Permutation> found_;
};

}  // namespace detail

/// Group generated by a set of permutations (closed under composition),
/// elements sorted lexicographically so the identity comes first.
inline GroupAction action_from_permutations(const FiniteMetricSpace& space, std::vector<Permutation> perms) {
  std::sort(perms.begin(), perms.end());
  perms.erase(std::unique(perms.begin(), perms.end()), perms.end());
  std::map<Permutation, std::size_t> index;
  for (std::size_t i = 0; i < perms.size(); ++i) index.emplace(perms[i], i);
  const std::size_t m = perms.size();
  const std::size_t n = space.size();
  CayleyTable t(m, std::vector<std::size_t>(m));
  Permutation comp(n);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      for (PointIndex x = 0; x < n; ++x) comp[x] = perms[a][perms[b][x]];
      auto it = index.find(comp);
      if (it == index.end()) throw NotASubgroup("permutations are not closed under composition");
      t[a][b] = it->second;
    }
  return validate_action(validate_group(t), space, std::move(perms));
}

/// The full group of distance-preserving permutations, found by
/// backtracking over points with matching sorted distance rows.
inline GroupAction isometry_group(const FiniteMetricSpace& space, const SearchBounds& bounds = SearchBounds{}) {
  if (space.size() > bounds.isometry_points)
    throw InstanceTooLarge("isometry_group: n = " + std::to_string(space.size()) + " exceeds " +
                           std::to_string(bounds.isometry_points));
  detail::AutomorphismSearch search(space, bounds.isometry_order);
  return action_from_permutations(space, search.run());
}

}  // namespace eqgh
