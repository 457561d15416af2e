#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eqgh/errors.hpp"
#include "eqgh/groups.hpp"
#include "eqgh/rotation.hpp"

namespace eqgh {

struct DefectReport {
  double q = 0.0;
  std::pair<Element, Element> witness{0, 0};  // (g, h) realizing q
};

/// q = max over g, h of dist(map(g h) map(h)^-1, map(g)).
template <typename T, typename Dist, typename Mul, typename Inv>
DefectReport homomorphism_defect(const FiniteGroup& src, const std::vector<T>& map, Dist dist, Mul mul, Inv inv) {
  if (map.size() != src.order()) throw std::invalid_argument("homomorphism_defect: map must be total on the source");
  DefectReport rep;
  for (Element g = 0; g < src.order(); ++g)
    for (Element h = 0; h < src.order(); ++h) {
      const double d = dist(mul(map[src.mul(g, h)], inv(map[h])), map[g]);
      if (d > rep.q) rep = {d, {g, h}};
    }
  return rep;
}

/// Target distance for finite groups: any metric on element indices.
using ElementDistance = std::function<double(Element, Element)>;

/// The discrete metric multiplied by `scale`.
inline ElementDistance discrete_distance(double scale = 1.0) {
  return [scale](Element a, Element b) { return a == b ? 0.0 : scale; };
}

inline DefectReport homomorphism_defect(const FiniteGroup& src, const FiniteGroup& dst, const std::vector<Element>& map,
                                        const ElementDistance& dist) {
  for (Element v : map)
    if (v >= dst.order()) throw std::invalid_argument("homomorphism_defect: image out of range");
  return homomorphism_defect(
      src, map, dist, [&](Element a, Element b) { return dst.mul(a, b); }, [&](Element a) { return dst.inverse(a); });
}

inline DefectReport homomorphism_defect(const FiniteGroup& src, const std::vector<RotationElement>& map) {
  return homomorphism_defect(
      src, map, [](const RotationElement& a, const RotationElement& b) { return distance(a, b); },
      [](const RotationElement& a, const RotationElement& b) { return a * b; },
      [](const RotationElement& a) { return a.inverse(); });
}

// ---------------------------------------------------------------------------
// Homomorphisms

struct FiniteHomomorphism {
  FiniteGroup source;
  FiniteGroup target;
  std::vector<Element> image;
};

struct RotationHomomorphism {
  FiniteGroup source;
  std::vector<RotationElement> image;
};

inline bool is_homomorphism(const FiniteHomomorphism& h) {
  if (h.image.size() != h.source.order()) return false;
  for (Element v : h.image)
    if (v >= h.target.order()) return false;
  for (Element a = 0; a < h.source.order(); ++a)
    for (Element b = 0; b < h.source.order(); ++b)
      if (h.image[h.source.mul(a, b)] != h.target.mul(h.image[a], h.image[b])) return false;
  return true;
}

inline bool is_homomorphism(const RotationHomomorphism& h, double tol = 1e-9) {
  if (h.image.size() != h.source.order()) return false;
  for (Element a = 0; a < h.source.order(); ++a)
    for (Element b = 0; b < h.source.order(); ++b)
      if ((h.image[h.source.mul(a, b)].matrix() - h.image[a].matrix() * h.image[b].matrix()).norm() > tol)
        return false;
  return true;
}

struct SnapOptions {
  double q_max = 0.1;
  double bound_factor = 1.36;
  /// absolute slack when comparing displacement with bound_factor * q
  double tolerance = 1e-9;
};

template <typename Hom>
struct SnapResult {
  Hom hom;
  double displacement = 0.0;  // max over elements of the distance to the input map
  double q = 0.0;
  bool bound_check = false;   // displacement <= bound_factor * q
};

namespace detail {

inline void check_defect(double q, const SnapOptions& opt) {
  if (q > opt.q_max)
    throw DefectTooLarge("snap_to_homomorphism: defect " + std::to_string(q) + " exceeds q_max " +
                         std::to_string(opt.q_max));
}

struct CandidateScore {
  double worst = INFINITY;
  double total = INFINITY;
  bool better_than(const CandidateScore& o) const {
    return worst < o.worst || (worst == o.worst && total < o.total);
  }
};

// Odometer over generator-image choices; visit(choice) sees each in lexicographic order.
template <typename Visit>
void for_each_choice(const std::vector<std::size_t>& radix, Visit visit) {
  std::vector<std::size_t> choice(radix.size(), 0);
  for (std::size_t r : radix)
    if (r == 0) return;
  while (true) {
    visit(choice);
    std::size_t i = radix.size();
    while (i > 0) {
      --i;
      if (++choice[i] < radix[i]) break;
      choice[i] = 0;
      if (i == 0) return;
    }
    if (radix.empty()) return;
  }
}

template <typename Hom>
SnapResult<Hom> finish_snap(std::optional<Hom> best, CandidateScore score, double q, const SnapOptions& opt) {
  if (!best || score.worst > opt.bound_factor * q + opt.tolerance)
    throw NoHomomorphismNearby("snap_to_homomorphism: no homomorphism within " + std::to_string(opt.bound_factor) +
                               " q = " + std::to_string(opt.bound_factor * q) +
                               (best ? " (closest at " + std::to_string(score.worst) + ")" : std::string{}));
  return {std::move(*best), score.worst, q, true};
}

}  // namespace detail

/// Nearest exact homomorphism into a finite group, by enumerating generator
/// images. Ties: smaller max displacement, then smaller total displacement,
/// then lexicographically smaller generator images.
inline SnapResult<FiniteHomomorphism> snap_to_homomorphism(const FiniteGroup& src, const FiniteGroup& dst,
                                                           const std::vector<Element>& map,
                                                           const ElementDistance& dist,
                                                           const SnapOptions& opt = SnapOptions{}) {
  const double q = homomorphism_defect(src, dst, map, dist).q;
  detail::check_defect(q, opt);
  const auto gens = src.generators();
  std::vector<std::vector<Element>> options(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (Element h = 0; h < dst.order(); ++h)
      if (src.element_order(gens[i]) % dst.element_order(h) == 0) options[i].push_back(h);
  std::vector<std::size_t> radix;
  for (const auto& o : options) radix.push_back(o.size());

  std::optional<FiniteHomomorphism> best;
  detail::CandidateScore best_score;
  std::vector<Element> pick(gens.size());
  detail::for_each_choice(radix, [&](const std::vector<std::size_t>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) pick[i] = options[i][c[i]];
    auto img = extend_homomorphism<Element>(
        src, gens, std::span<const Element>(pick), Element{0}, [&](Element a, Element b) { return dst.mul(a, b); },
        [](Element a, Element b) { return a == b; });
    if (!img) return;
    detail::CandidateScore s{0.0, 0.0};
    for (Element g = 0; g < src.order(); ++g) {
      const double d = dist((*img)[g], map[g]);
      s.worst = std::max(s.worst, d);
      s.total += d;
    }
    if (s.better_than(best_score)) {
      best_score = s;
      best = FiniteHomomorphism{src, dst, std::move(*img)};
    }
  });
  auto out = detail::finish_snap(std::move(best), best_score, q, opt);
  if (!is_homomorphism(out.hom)) throw std::logic_error("snap_to_homomorphism: result failed re-verification");
  return out;
}

/// Nearest exact homomorphism into SO(2). Generator g of order k can only go
/// to R(2 pi j / k), so the enumeration is complete.
inline SnapResult<RotationHomomorphism> snap_to_so2(const FiniteGroup& src, const std::vector<RotationElement>& map,
                                                    const SnapOptions& opt = SnapOptions{}) {
  if (map.size() != src.order()) throw std::invalid_argument("snap_to_so2: map must be total on the source");
  for (const auto& r : map)
    if (r.n() != 2) throw std::invalid_argument("snap_to_so2: images must be 2x2 rotations");
  const double q = homomorphism_defect(src, map).q;
  detail::check_defect(q, opt);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto wrap = [&](double a) {
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
  };
  auto angle_gap = [&](double a, double b) {
    const double d = wrap(a - b);
    return std::min(d, two_pi - d);
  };
  std::vector<double> input(src.order());
  for (Element g = 0; g < src.order(); ++g) input[g] = so2_angle(map[g]);

  const auto gens = src.generators();
  std::vector<std::size_t> radix;
  for (Element g : gens) radix.push_back(src.element_order(g));

  std::optional<std::vector<double>> best;
  detail::CandidateScore best_score;
  std::vector<double> pick(gens.size());
  detail::for_each_choice(radix, [&](const std::vector<std::size_t>& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
      pick[i] = two_pi * static_cast<double>(c[i]) / static_cast<double>(radix[i]);
    auto img = extend_homomorphism<double>(
        src, gens, std::span<const double>(pick), 0.0, [&](double a, double b) { return wrap(a + b); },
        [&](double a, double b) { return angle_gap(a, b) < 1e-9; });
    if (!img) return;
    detail::CandidateScore s{0.0, 0.0};
    for (Element g = 0; g < src.order(); ++g) {
      const double d = angle_gap((*img)[g], input[g]) / std::numbers::pi;
      s.worst = std::max(s.worst, d);
      s.total += d;
    }
    if (s.better_than(best_score)) {
      best_score = s;
      best = std::move(img);
    }
  });
  std::optional<RotationHomomorphism> hom;
  if (best) {
    hom = RotationHomomorphism{src, {}};
    for (double a : *best) hom->image.push_back(so2(a));
  }
  auto out = detail::finish_snap(std::move(hom), best_score, q, opt);
  if (!is_homomorphism(out.hom)) throw std::logic_error("snap_to_so2: result failed re-verification");
  return out;
}

/// Nearest exact homomorphism into SO(3) among candidates sending each
/// generator g of order k to a rotation by 2 pi j / k about the rotation
/// axis of map(g) (the z-axis when map(g) is the identity).
inline SnapResult<RotationHomomorphism> snap_to_so3(const FiniteGroup& src, const std::vector<RotationElement>& map,
                                                    const SnapOptions& opt = SnapOptions{}) {
  if (map.size() != src.order()) throw std::invalid_argument("snap_to_so3: map must be total on the source");
  for (const auto& r : map)
    if (r.n() != 3) throw std::invalid_argument("snap_to_so3: images must be 3x3 rotations");
  const double q = homomorphism_defect(src, map).q;
  detail::check_defect(q, opt);

  const auto gens = src.generators();
  std::vector<std::size_t> radix;
  std::vector<Eigen::Vector3d> axes;
  for (Element g : gens) {
    radix.push_back(src.element_order(g));
    const auto lg = rotation_log(map[g].matrix()).log;
    Eigen::Vector3d axis(lg(2, 1), lg(0, 2), lg(1, 0));
    if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitZ();
    axes.push_back(axis.normalized());
  }

  using M3 = Eigen::Matrix3d;
  std::optional<std::vector<M3>> best;
  detail::CandidateScore best_score;
  std::vector<M3> pick(gens.size());
  detail::for_each_choice(radix, [&](const std::vector<std::size_t>& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
      pick[i] = Eigen::AngleAxisd(2.0 * std::numbers::pi * static_cast<double>(c[i]) / static_cast<double>(radix[i]),
                                  axes[i])
                    .toRotationMatrix();
    auto img = extend_homomorphism<M3>(
        src, gens, std::span<const M3>(pick), M3::Identity(), [](const M3& a, const M3& b) -> M3 { return a * b; },
        [](const M3& a, const M3& b) { return (a - b).norm() < 1e-9; });
    if (!img) return;
    detail::CandidateScore s{0.0, 0.0};
    for (Element g = 0; g < src.order(); ++g) {
      const double d = distance(RotationElement::project((*img)[g]), map[g]);
      s.worst = std::max(s.worst, d);
      s.total += d;
    }
    if (s.better_than(best_score)) {
      best_score = s;
      best = std::move(img);
    }
  });
  std::optional<RotationHomomorphism> hom;
  if (best) {
    hom = RotationHomomorphism{src, {}};
    for (const auto& m : *best) hom->image.push_back(RotationElement::project(m));
  }
  auto out = detail::finish_snap(std::move(hom), best_score, q, opt);
  if (!is_homomorphism(out.hom)) throw std::logic_error("snap_to_so3: result failed re-verification");
  return out;
}

// ---------------------------------------------------------------------------
// Kernels and monomorphisms

struct KernelResult {
  Subgroup kernel;
  bool normal = true;
};

namespace detail {

inline KernelResult kernel_from(const FiniteGroup& src, const std::vector<bool>& in_kernel) {
  std::vector<Element> elems;
  for (Element g = 0; g < src.order(); ++g)
    if (in_kernel[g]) elems.push_back(g);
  KernelResult out{make_subgroup(src, elems), true};
  for (Element g = 0; g < src.order() && out.normal; ++g)
    for (Element h : elems)
      if (!in_kernel[src.mul(src.mul(g, h), src.inverse(g))]) {
        out.normal = false;
        break;
      }
  return out;
}

}  // namespace detail

inline KernelResult kernel(const FiniteHomomorphism& h) {
  std::vector<bool> in(h.source.order());
  for (Element g = 0; g < h.source.order(); ++g) in[g] = h.image[g] == 0;
  return detail::kernel_from(h.source, in);
}

inline KernelResult kernel(const RotationHomomorphism& h, double tol = 1e-9) {
  std::vector<bool> in(h.source.order());
  for (Element g = 0; g < h.source.order(); ++g) {
    const auto& m = h.image[g].matrix();
    in[g] = (m - Matrix::Identity(m.rows(), m.cols())).norm() < tol;
  }
  return detail::kernel_from(h.source, in);
}

/// max over x of the diameter of the orbit {h x : h in subgroup}.
inline double kernel_orbit_diameter(const GroupAction& action, const std::vector<Element>& subgroup) {
  const auto sub = make_subgroup(action.group(), subgroup);
  const auto& s = action.space();
  double worst = 0.0;
  for (PointIndex x = 0; x < s.size(); ++x)
    for (Element a : sub.embedding)
      for (Element b : sub.embedding) worst = std::max(worst, s(action.act(a, x), action.act(b, x)));
  return worst;
}

struct MonomorphismReport {
  bool injective = false;
  std::size_t kernel_order = 0;
  std::size_t source_order = 0;
  std::size_t image_order = 0;
  std::optional<std::size_t> target_order;  // finite targets only
  std::optional<bool> image_divides_target;
};

inline MonomorphismReport check_monomorphism(const FiniteHomomorphism& h) {
  MonomorphismReport r;
  r.kernel_order = kernel(h).kernel.group.order();
  r.source_order = h.source.order();
  r.image_order = r.source_order / r.kernel_order;
  r.injective = r.kernel_order == 1;
  r.target_order = h.target.order();
  r.image_divides_target = h.target.order() % r.image_order == 0;
  return r;
}

inline MonomorphismReport check_monomorphism(const RotationHomomorphism& h) {
  MonomorphismReport r;
  r.kernel_order = kernel(h).kernel.group.order();
  r.source_order = h.source.order();
  r.image_order = r.source_order / r.kernel_order;
  r.injective = r.kernel_order == 1;
  return r;
}

}  // namespace eqgh
