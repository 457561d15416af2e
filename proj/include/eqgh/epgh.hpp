#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqgh/errors.hpp"
#include "eqgh/groups.hpp"
#include "eqgh/metric_space.hpp"
#include "eqgh/search_bounds.hpp"

namespace eqgh {

/// The (f, phi, psi) data of an equivariant pointed GH epsilon-approximation
/// from (X, p, Gamma) to (Y, q, Lambda).
///   f:   B(p, 1/eps)       -> Y
///   phi: Gamma(1/eps)      -> Lambda(1/eps)
///   psi: Lambda(1/eps)     -> Gamma(1/eps)
struct ApproximationTriple {
  double epsilon = 0.0;
  std::map<PointIndex, PointIndex> f;
  std::map<Element, Element> phi;
  std::map<Element, Element> psi;

  bool operator==(const ApproximationTriple&) const = default;
};

/// Outcome of one of the five conditions. `measured` is the largest value of
/// the quantity that must stay below epsilon (0 if the quantifier is empty).
struct ConditionResult {
  bool pass = true;
  double measured = 0.0;
  std::vector<std::size_t> witness;  // indices realizing the failure, or the worst case
};

struct CertificateReport {
  double epsilon = 0.0;
  std::array<ConditionResult, 5> conditions;
  /// min over conditions (2)-(5) of epsilon - measured; positive on pass.
  double worst_slack = 0.0;
  /// Condition (2) is checked against the image f(B(p, 1/eps)).
  bool condition2_uses_image = true;

  bool pass() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.pass; });
  }
  /// 1-based index of the first failing condition, 0 on pass.
  int first_failure() const {
    for (std::size_t i = 0; i < conditions.size(); ++i)
      if (!conditions[i].pass) return static_cast<int>(i) + 1;
    return 0;
  }
};

/// The domains every triple at scale eps must use.
struct ApproximationDomains {
  IndexSet source_ball;
  IndexSet target_ball;
  std::vector<Element> source_elements;
  std::vector<Element> target_elements;
};

inline ApproximationDomains domains_at(const GroupAction& src, const GroupAction& dst, double eps) {
  const double r = 1.0 / eps;
  return {ball(src.space(), src.space().basepoint(), r), ball(dst.space(), dst.space().basepoint(), r),
          gamma_r(src, r), gamma_r(dst, r)};
}

namespace detail {

template <typename K, typename V>
std::vector<K> keys_of(const std::map<K, V>& m) {
  std::vector<K> out;
  out.reserve(m.size());
  for (const auto& kv : m) out.push_back(kv.first);
  return out;
}

inline void check_domains(const GroupAction& src, const GroupAction& dst, const ApproximationTriple& t) {
  if (!(t.epsilon > 0.0)) throw MalformedTriple("epsilon must be positive");
  const auto dom = domains_at(src, dst, t.epsilon);
  if (keys_of(t.f) != dom.source_ball) throw MalformedTriple("f is not defined exactly on B(p, 1/eps)");
  for (auto [x, y] : t.f)
    if (y >= dst.space().size()) throw MalformedTriple("f maps outside the target space");
  if (keys_of(t.phi) != dom.source_elements) throw MalformedTriple("phi is not defined exactly on Gamma(1/eps)");
  if (keys_of(t.psi) != dom.target_elements) throw MalformedTriple("psi is not defined exactly on Lambda(1/eps)");
  for (auto [g, l] : t.phi)
    if (!std::binary_search(dom.target_elements.begin(), dom.target_elements.end(), l))
      throw MalformedTriple("phi takes a value outside Lambda(1/eps)");
  for (auto [l, g] : t.psi)
    if (!std::binary_search(dom.source_elements.begin(), dom.source_elements.end(), g))
      throw MalformedTriple("psi takes a value outside Gamma(1/eps)");
}

}  // namespace detail

/// Evaluates the five conditions exhaustively, with strict inequalities.
/// Throws MalformedTriple if the triple's domains do not match scale eps.
inline CertificateReport verify_approximation(const GroupAction& src, const GroupAction& dst,
                                              const ApproximationTriple& t) {
  detail::check_domains(src, dst, t);
  const double eps = t.epsilon;
  const auto& X = src.space();
  const auto& Y = dst.space();
  const PointIndex p = X.basepoint(), q = Y.basepoint();
  const auto dom = domains_at(src, dst, eps);
  auto in_ball = [&](PointIndex x) { return t.f.count(x) > 0; };

  CertificateReport rep;
  rep.epsilon = eps;
  auto note = [eps](ConditionResult& c, double value, std::vector<std::size_t> w) {
    if (c.witness.empty() || value > c.measured) {
      c.measured = value;
      c.witness = std::move(w);
    }
    if (!(value < eps)) c.pass = false;
  };

  // (1) f(p) = q
  {
    auto& c = rep.conditions[0];
    const PointIndex fp = t.f.at(p);
    c.pass = fp == q;
    c.measured = Y(fp, q);
    c.witness = {p, fp};
  }
  // (2) every point of B(q, 1/eps) is within eps of f(B(p, 1/eps))
  for (PointIndex y : dom.target_ball) {
    double nearest = INFINITY;
    for (auto [x, fx] : t.f) nearest = std::min(nearest, Y(y, fx));
    note(rep.conditions[1], nearest, {y});
  }
  // (3) |d(x, x') - d(f x, f x')| < eps on the ball
  for (auto [x, fx] : t.f)
    for (auto [x2, fx2] : t.f)
      if (x < x2) note(rep.conditions[2], std::abs(X(x, x2) - Y(fx, fx2)), {x, x2});
  // (4) d(f(g x), phi(g) f(x)) < eps whenever x, g x in the ball
  for (auto [g, l] : t.phi)
    for (auto [x, fx] : t.f) {
      const PointIndex gx = src.act(g, x);
      if (!in_ball(gx)) continue;
      note(rep.conditions[3], Y(t.f.at(gx), dst.act(l, fx)), {g, x});
    }
  // (5) d(f(psi(l) x), l f(x)) < eps whenever x, psi(l) x in the ball
  for (auto [l, g] : t.psi)
    for (auto [x, fx] : t.f) {
      const PointIndex gx = src.act(g, x);
      if (!in_ball(gx)) continue;
      note(rep.conditions[4], Y(t.f.at(gx), dst.act(l, fx)), {l, x});
    }

  rep.worst_slack = INFINITY;
  for (std::size_t i = 1; i < 5; ++i) rep.worst_slack = std::min(rep.worst_slack, eps - rep.conditions[i].measured);
  return rep;
}

/// Restriction of a triple to the (smaller) domains at a larger epsilon.
/// Values are kept as they are, so phi/psi may land outside the new
/// Lambda/Gamma; verify_approximation reports that as MalformedTriple.
inline ApproximationTriple restrict_triple(const GroupAction& src, const GroupAction& dst,
                                           const ApproximationTriple& t, double new_eps) {
  const auto dom = domains_at(src, dst, new_eps);
  ApproximationTriple out;
  out.epsilon = new_eps;
  for (PointIndex x : dom.source_ball)
    if (auto it = t.f.find(x); it != t.f.end()) out.f.emplace(x, it->second);
  for (Element g : dom.source_elements)
    if (auto it = t.phi.find(g); it != t.phi.end()) out.phi.emplace(g, it->second);
  for (Element l : dom.target_elements)
    if (auto it = t.psi.find(l); it != t.psi.end()) out.psi.emplace(l, it->second);
  return out;
}

// ---------------------------------------------------------------------------
// Candidate grid

/// Sorted candidate epsilons. Thresholds are every distance d, every
/// |d1 - d2| and every 1/d over the distances of both spaces; candidates are
/// the positive thresholds, the midpoints between consecutive thresholds
/// (starting from 0), and one value above the largest threshold.
inline std::vector<double> epsilon_grid(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
  std::vector<double> dists{0.0};
  for (const auto* s : {&a, &b})
    for (PointIndex i = 0; i < s->size(); ++i)
      for (PointIndex j = i + 1; j < s->size(); ++j) dists.push_back((*s)(i, j));
  std::sort(dists.begin(), dists.end());
  dists.erase(std::unique(dists.begin(), dists.end()), dists.end());

  std::vector<double> thresholds = dists;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t j = i + 1; j < dists.size(); ++j) thresholds.push_back(dists[j] - dists[i]);
    if (dists[i] > 0.0) thresholds.push_back(1.0 / dists[i]);
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<double> grid;
  grid.reserve(2 * thresholds.size() + 1);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i > 0) grid.push_back(0.5 * (thresholds[i - 1] + thresholds[i]));
    if (thresholds[i] > 0.0) grid.push_back(thresholds[i]);
  }
  grid.push_back(thresholds.back() > 0.0 ? 2.0 * thresholds.back() : 1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Position of the grid value nearest to v.
inline std::size_t grid_index(const std::vector<double>& grid, double v) {
  auto it = std::lower_bound(grid.begin(), grid.end(), v);
  if (it == grid.end()) return grid.size() - 1;
  if (it == grid.begin()) return 0;
  const auto prev = std::prev(it);
  return static_cast<std::size_t>((v - *prev <= *it - v) ? prev - grid.begin() : it - grid.begin());
}

// ---------------------------------------------------------------------------
// Search

struct SearchOptions {
  SearchBounds bounds = SearchBounds::from_env();
  /// Give up (NoApproximationBelow) past this epsilon.
  double max_epsilon = INFINITY;
  /// Ignore the 1/eps truncation: f, phi, psi are sought on all of X, Gamma,
  /// Lambda. Used for full-scale matchings; the result is then not a
  /// certificate for the truncated definition.
  bool full_scale = false;
};

struct SearchResult {
  double epsilon = 0.0;
  ApproximationTriple triple;
};

namespace detail {

// Backtracking search for f at a fixed epsilon. The relation
// admissible[g][l] <=> "for all x with x, g x in the ball:
// d(f(g x), l f(x)) < eps" is shared by conditions (4) and (5): (4) needs
// every row non-empty, (5) every column non-empty.
class ApproximationSearch {
 public:
  ApproximationSearch(const GroupAction& src, const GroupAction& dst, double eps, bool full_scale)
      : src_(src), dst_(dst), X_(src.space()), Y_(dst.space()), eps_(eps) {
    if (full_scale) {
      dom_.source_ball = identity_permutation(X_.size());
      dom_.target_ball = identity_permutation(Y_.size());
      dom_.source_elements = identity_permutation(src.group().order());
      dom_.target_elements = identity_permutation(dst.group().order());
    } else {
      dom_ = domains_at(src, dst, eps);
    }
    if (Y_.size() > 64 || dom_.target_elements.size() > 64)
      throw InstanceTooLarge("search_approximation: bitset width 64 exceeded");
    in_ball_.assign(X_.size(), false);
    for (PointIndex x : dom_.source_ball) in_ball_[x] = true;
  }

  std::optional<ApproximationTriple> run() {
    const PointIndex p = X_.basepoint(), q = Y_.basepoint();
    if (!quick_reject_passes()) return std::nullopt;

    // compat_[a][b][c]: mask of targets y' for ball point c, given f(ball[a]) = b
    const std::size_t nb = dom_.source_ball.size();
    compat_.assign(nb * Y_.size() * nb, 0);
    for (std::size_t a = 0; a < nb; ++a)
      for (PointIndex b = 0; b < Y_.size(); ++b)
        for (std::size_t c = 0; c < nb; ++c) {
          std::uint64_t mask = 0;
          const double dx = X_(dom_.source_ball[a], dom_.source_ball[c]);
          for (PointIndex y = 0; y < Y_.size(); ++y)
            if (std::abs(dx - Y_(b, y)) < eps_) mask |= std::uint64_t{1} << y;
          compat_[(a * Y_.size() + b) * nb + c] = mask;
        }

    f_.assign(X_.size(), npos_);
    const std::uint64_t all_targets = Y_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << Y_.size()) - 1;
    std::vector<std::uint64_t> domains(nb, all_targets);
    const std::size_t nl = dom_.target_elements.size();
    const std::uint64_t all_lambda = nl == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << nl) - 1;
    std::vector<std::uint64_t> admissible(dom_.source_elements.size(), all_lambda);

    const std::size_t pos_p = position(p);
    if (!((domains[pos_p] >> q) & 1)) return std::nullopt;
    if (!assign(pos_p, q, domains, admissible)) return std::nullopt;
    order_.clear();
    for (std::size_t a = 0; a < nb; ++a)
      if (a != pos_p) order_.push_back(a);
    if (!extend(0, domains, admissible)) return std::nullopt;
    return result_;
  }

 private:
  std::size_t position(PointIndex x) const {
    return static_cast<std::size_t>(std::lower_bound(dom_.source_ball.begin(), dom_.source_ball.end(), x) -
                                    dom_.source_ball.begin());
  }

  // Necessary conditions that only involve distances to the basepoints.
  bool quick_reject_passes() const {
    const PointIndex p = X_.basepoint(), q = Y_.basepoint();
    for (PointIndex x : dom_.source_ball) {
      bool any = false;
      for (PointIndex y = 0; y < Y_.size() && !any; ++y) any = std::abs(X_(p, x) - Y_(q, y)) < eps_;
      if (!any) return false;
    }
    for (PointIndex y : dom_.target_ball) {
      bool any = false;
      for (PointIndex x : dom_.source_ball) any = any || std::abs(Y_(q, y) - X_(p, x)) < 2.0 * eps_;
      if (!any) return false;
    }
    return true;
  }

  // Sets f(ball[a]) = y, narrows the other domains and the admissible relation.
  bool assign(std::size_t a, PointIndex y, std::vector<std::uint64_t>& domains,
              std::vector<std::uint64_t>& admissible) {
    const PointIndex x = dom_.source_ball[a];
    f_[x] = y;
    const std::size_t nb = dom_.source_ball.size();
    const std::uint64_t* row = &compat_[(a * Y_.size() + y) * nb];
    for (std::size_t c = 0; c < nb; ++c) {
      if (f_[dom_.source_ball[c]] != npos_) continue;
      domains[c] &= row[c];
      if (!domains[c]) return false;
    }
    for (std::size_t gi = 0; gi < dom_.source_elements.size(); ++gi) {
      const Element g = dom_.source_elements[gi];
      std::uint64_t& bits = admissible[gi];
      auto constrain = [&](PointIndex z) {
        const PointIndex gz = src_.act(g, z);
        if (!in_ball_[gz] || f_[gz] == npos_ || f_[z] == npos_) return;
        for (std::size_t li = 0; li < dom_.target_elements.size(); ++li) {
          if (!((bits >> li) & 1)) continue;
          if (!(Y_(f_[gz], dst_.act(dom_.target_elements[li], f_[z])) < eps_)) bits &= ~(std::uint64_t{1} << li);
        }
      };
      constrain(x);
      const PointIndex gi_x = src_.act(src_.group().inverse(g), x);
      if (gi_x != x && in_ball_[gi_x]) constrain(gi_x);
      if (!bits) return false;  // condition (4) has no value for phi(g)
    }
    std::uint64_t cols = 0;
    for (auto bits : admissible) cols |= bits;
    const std::size_t nl = dom_.target_elements.size();
    const std::uint64_t all = nl == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << nl) - 1;
    return cols == all;  // condition (5) needs a value for every psi(l)
  }

  bool extend(std::size_t k, const std::vector<std::uint64_t>& domains, const std::vector<std::uint64_t>& admissible) {
    if (k == order_.size()) return finish(admissible);
    const std::size_t a = order_[k];
    const PointIndex x = dom_.source_ball[a];
    for (std::uint64_t bits = domains[a]; bits; bits &= bits - 1) {
      const auto y = static_cast<PointIndex>(std::countr_zero(bits));
      auto d2 = domains;
      auto adm2 = admissible;
      if (assign(a, y, d2, adm2) && extend(k + 1, d2, adm2)) return true;
      // undo f for the subtree
      for (std::size_t j = k; j < order_.size(); ++j) f_[dom_.source_ball[order_[j]]] = npos_;
    }
    f_[x] = npos_;
    return false;
  }

  // Residual of the shared (4)/(5) predicate for a given pair.
  double residual(Element g, Element l) const {
    double worst = 0.0;
    for (PointIndex z : dom_.source_ball) {
      const PointIndex gz = src_.act(g, z);
      if (!in_ball_[gz]) continue;
      worst = std::max(worst, Y_(f_[gz], dst_.act(l, f_[z])));
    }
    return worst;
  }

  bool finish(const std::vector<std::uint64_t>& admissible) {
    // (2): every target ball point is within eps of the image
    for (PointIndex y : dom_.target_ball) {
      bool covered = false;
      for (PointIndex x : dom_.source_ball)
        if (Y_(y, f_[x]) < eps_) {
          covered = true;
          break;
        }
      if (!covered) return false;
    }
    ApproximationTriple t;
    t.epsilon = eps_;
    for (PointIndex x : dom_.source_ball) t.f.emplace(x, f_[x]);
    // phi(g), psi(l): the admissible partner with the least residual, ties to the lower index
    const std::size_t ng = dom_.source_elements.size(), nl = dom_.target_elements.size();
    std::vector<std::vector<double>> res(ng, std::vector<double>(nl, INFINITY));
    for (std::size_t gi = 0; gi < ng; ++gi)
      for (std::size_t li = 0; li < nl; ++li)
        if ((admissible[gi] >> li) & 1) res[gi][li] = residual(dom_.source_elements[gi], dom_.target_elements[li]);
    for (std::size_t gi = 0; gi < ng; ++gi) {
      std::size_t best = nl;
      for (std::size_t li = 0; li < nl; ++li)
        if (std::isfinite(res[gi][li]) && (best == nl || res[gi][li] < res[gi][best])) best = li;
      t.phi.emplace(dom_.source_elements[gi], dom_.target_elements[best]);
    }
    for (std::size_t li = 0; li < nl; ++li) {
      std::size_t best = ng;
      for (std::size_t gi = 0; gi < ng; ++gi)
        if (std::isfinite(res[gi][li]) && (best == ng || res[gi][li] < res[best][li])) best = gi;
      t.psi.emplace(dom_.target_elements[li], dom_.source_elements[best]);
    }
    result_ = std::move(t);
    return true;
  }

  const GroupAction& src_;
  const GroupAction& dst_;
  const FiniteMetricSpace& X_;
  const FiniteMetricSpace& Y_;
  double eps_;
  ApproximationDomains dom_;
  static constexpr PointIndex npos_ = std::numeric_limits<PointIndex>::max();
  std::vector<bool> in_ball_;
  std::vector<std::uint64_t> compat_;
  std::vector<PointIndex> f_;
  std::vector<std::size_t> order_;
  std::optional<ApproximationTriple> result_;
};

inline void check_bounds(const GroupAction& src, const GroupAction& dst, const SearchBounds& b) {
  if (src.space().size() > b.epgh_points || dst.space().size() > b.epgh_points)
    throw InstanceTooLarge("search_approximation: space size exceeds " + std::to_string(b.epgh_points));
  if (src.group().order() > b.epgh_group || dst.group().order() > b.epgh_group)
    throw InstanceTooLarge("search_approximation: group order exceeds " + std::to_string(b.epgh_group));
}

}  // namespace detail

/// The lexicographically least passing triple at a fixed epsilon, if any.
inline std::optional<ApproximationTriple> find_approximation_at(const GroupAction& src, const GroupAction& dst,
                                                                double eps, bool full_scale = false) {
  detail::ApproximationSearch s(src, dst, eps, full_scale);
  return s.run();
}

/// Smallest grid epsilon admitting a passing triple from src to dst.
inline SearchResult search_approximation(const GroupAction& src, const GroupAction& dst,
                                         const SearchOptions& opt = SearchOptions{}) {
  detail::check_bounds(src, dst, opt.bounds);
  for (double eps : epsilon_grid(src.space(), dst.space())) {
    if (eps > opt.max_epsilon) break;
    if (auto t = find_approximation_at(src, dst, eps, opt.full_scale)) return {eps, std::move(*t)};
  }
  throw NoApproximationBelow(opt.max_epsilon);
}

struct DistanceResult {
  double epsilon = 0.0;
  ApproximationTriple forward;   // a -> b
  ApproximationTriple backward;  // b -> a
};

/// Smallest grid epsilon admitting passing triples in both directions.
inline DistanceResult epgh_distance_with_certificates(const GroupAction& a, const GroupAction& b,
                                                      const SearchOptions& opt = SearchOptions{}) {
  detail::check_bounds(a, b, opt.bounds);
  for (double eps : epsilon_grid(a.space(), b.space())) {
    if (eps > opt.max_epsilon) break;
    auto fwd = find_approximation_at(a, b, eps, opt.full_scale);
    if (!fwd) continue;
    auto bwd = find_approximation_at(b, a, eps, opt.full_scale);
    if (!bwd) continue;
    return {eps, std::move(*fwd), std::move(*bwd)};
  }
  throw NoApproximationBelow(opt.max_epsilon);
}

inline double epgh_distance(const GroupAction& a, const GroupAction& b, const SearchOptions& opt = SearchOptions{}) {
  return epgh_distance_with_certificates(a, b, opt).epsilon;
}

/// Full-scale group matching: for every l in Lambda, the g in Gamma that
/// minimizes max_x d(f(g x), l f(x)) over all x of X, for a total map f.
/// Ties go to the element whose basepoint displacement is closest to that of
/// l, then to the lower index.
inline std::vector<Element> equivariance_matching(const GroupAction& src, const GroupAction& dst,
                                                  const std::vector<PointIndex>& f) {
  const auto& X = src.space();
  const auto& Y = dst.space();
  const PointIndex p = X.basepoint(), q = Y.basepoint();
  std::vector<Element> out(dst.group().order());
  for (Element l = 0; l < dst.group().order(); ++l) {
    const double disp_l = Y(q, dst.act(l, q));
    Element best = 0;
    double best_res = INFINITY, best_disp = INFINITY;
    for (Element g = 0; g < src.group().order(); ++g) {
      double res = 0.0;
      for (PointIndex x = 0; x < X.size(); ++x) res = std::max(res, Y(f[src.act(g, x)], dst.act(l, f[x])));
      const double disp = std::abs(X(p, src.act(g, p)) - disp_l);
      if (res < best_res || (res == best_res && disp < best_disp)) {
        best = g;
        best_res = res;
        best_disp = disp;
      }
    }
    out[l] = best;
  }
  return out;
}

/// A pointed map f: X -> Y of least distortion with eps-dense image, over
/// the whole of X (no 1/eps truncation, groups ignored).
inline std::vector<PointIndex> full_scale_pointed_map(const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
  const auto a = trivial_action(X);
  const auto b = trivial_action(Y);
  for (double eps : epsilon_grid(X, Y))
    if (auto t = find_approximation_at(a, b, eps, true)) {
      std::vector<PointIndex> f(X.size());
      for (auto [x, y] : t->f) f[x] = y;
      return f;
    }
  throw NoApproximationBelow(INFINITY);
}

}  // namespace eqgh
