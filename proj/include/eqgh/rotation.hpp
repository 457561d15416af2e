#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eqgh/errors.hpp"

namespace eqgh {

using Matrix = Eigen::MatrixXd;

/// An element of SO(n): orthogonal to 1e-10 (Frobenius) with det +1.
class RotationElement {
 public:
  static RotationElement from_matrix(Matrix m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw NotARotation("rotation matrix must be square and non-empty");
    const auto n = m.rows();
    const double err = (m.transpose() * m - Matrix::Identity(n, n)).norm();
    if (!(err <= 1e-10)) throw NotARotation("matrix is not orthogonal (|M^T M - I| = " + std::to_string(err) + ")");
    if (!(m.determinant() > 0.0)) throw NotARotation("matrix has negative determinant");
    return RotationElement(std::move(m));
  }

  static RotationElement identity(std::size_t n) {
    return RotationElement(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  /// Nearest rotation to m (polar factor), for re-projection after numerical drift.
  static RotationElement project(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix u = svd.matrixU();
    const Matrix& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) u.col(u.cols() - 1) *= -1.0;
    return RotationElement(u * v.transpose());
  }

  std::size_t n() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }

  RotationElement operator*(const RotationElement& o) const { return project(m_ * o.m_); }
  RotationElement inverse() const { return RotationElement(m_.transpose()); }

  bool operator==(const RotationElement& o) const { return m_ == o.m_; }

 private:
  explicit RotationElement(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

inline RotationElement so2(double theta) {
  Matrix m(2, 2);
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return RotationElement::project(m);
}

inline double so2_angle(const RotationElement& r) { return std::atan2(r.matrix()(1, 0), r.matrix()(0, 0)); }

/// Rotation by angle about a unit axis in R^3.
inline RotationElement so3(const Eigen::Vector3d& axis, double angle) {
  return RotationElement::project(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

struct RotationLog {
  Matrix log;                 // skew-symmetric
  bool at_cut_locus = false;  // an eigenvalue -1 made the principal log ambiguous
};

/// Principal logarithm of a rotation through its real Schur form, which for
/// an orthogonal matrix is block diagonal with 2x2 rotation blocks and +-1.
inline RotationLog rotation_log(const Matrix& r) {
  constexpr double cut_tol = 1e-8;
  const auto n = r.rows();
  Eigen::RealSchur<Matrix> schur(r);
  const Matrix& t = schur.matrixT();
  const Matrix& u = schur.matrixU();
  Matrix l = Matrix::Zero(n, n);
  RotationLog out;
  std::vector<Eigen::Index> negative;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      const double c = 0.5 * (t(i, i) + t(i + 1, i + 1));
      const double s = 0.5 * (t(i + 1, i) - t(i, i + 1));
      const double theta = std::atan2(s, c);
      l(i + 1, i) = theta;
      l(i, i + 1) = -theta;
      if (std::numbers::pi - std::abs(theta) < cut_tol) out.at_cut_locus = true;
      i += 2;
    } else {
      if (t(i, i) < 0.0) negative.push_back(i);
      ++i;
    }
  }
  // -1 eigenvalues come in pairs (det = +1); each pair is a half turn in its plane
  for (std::size_t k = 0; k + 1 < negative.size(); k += 2) {
    l(negative[k + 1], negative[k]) = std::numbers::pi;
    l(negative[k], negative[k + 1]) = -std::numbers::pi;
    out.at_cut_locus = true;
  }
  Matrix full = u * l * u.transpose();
  out.log = 0.5 * (full - full.transpose());
  return out;
}

/// exp of a skew-symmetric matrix, re-projected onto SO(n).
inline RotationElement rotation_exp(const Matrix& skew) {
  const Matrix a = 0.5 * (skew - skew.transpose());
  return RotationElement::project(a.exp());
}

/// Diameter of SO(n) under the Frobenius norm of the principal log.
inline double rotation_diameter_scale(std::size_t n) {
  const std::size_t planes = n / 2;
  return planes == 0 ? 1.0 : std::numbers::pi * std::sqrt(2.0 * static_cast<double>(planes));
}

struct GeodesicDistance {
  double value = 0.0;  // normalized so that SO(n) has diameter 1
  bool at_cut_locus = false;
};

/// Bi-invariant distance |log(A^T B)|_F, normalized to diameter 1.
inline GeodesicDistance geodesic_distance(const RotationElement& a, const RotationElement& b) {
  if (a.n() != b.n()) throw std::invalid_argument("geodesic_distance: dimension mismatch");
  if (a.n() == 2) {
    const Matrix& x = a.matrix();
    const Matrix& y = b.matrix();
    // angle of x^T y
    const double c = x(0, 0) * y(0, 0) + x(1, 0) * y(1, 0);
    const double s = x(0, 0) * y(1, 0) - x(1, 0) * y(0, 0);
    const double theta = std::abs(std::atan2(s, c));
    return {theta / std::numbers::pi, std::numbers::pi - theta < 1e-8};
  }
  const auto lg = rotation_log(a.matrix().transpose() * b.matrix());
  return {lg.log.norm() / rotation_diameter_scale(a.n()), lg.at_cut_locus};
}

inline double distance(const RotationElement& a, const RotationElement& b) { return geodesic_distance(a, b).value; }

// ---------------------------------------------------------------------------
// Center of mass

/// Center-of-mass constants r, R, N and K = 1 + R + ... + R^N. These are
/// configured, not derived.
struct ComConfig {
  double r_conv = 0.4;
  double R_growth = 1.0;
  int N_max = 1;

  double K() const {
    double k = 0.0, term = 1.0;
    for (int i = 0; i <= N_max; ++i, term *= R_growth) k += term;
    return k;
  }

  void validate() const {
    if (!(r_conv > 0.0)) throw std::invalid_argument("ComConfig: r_conv must be positive");
    if (!(R_growth >= 1.0)) throw std::invalid_argument("ComConfig: R_growth must be at least 1");
    if (N_max < 0) throw std::invalid_argument("ComConfig: N_max must be non-negative");
  }
};

struct MeanResult {
  RotationElement mean;
  int iterations = 0;
  double gradient_norm = 0.0;  // |sum w_i log(x^T p_i)|_F at the returned point
};

/// Weighted intrinsic mean: x <- x exp(sum_i w_i log(x^T p_i)) until the step
/// is below 1e-12, at most 100 iterations. Zero-weight points are dropped
/// before anything else.
inline MeanResult karcher_mean_detailed(const std::vector<RotationElement>& points, const std::vector<double>& weights,
                                        const ComConfig& cfg = ComConfig{}) {
  cfg.validate();
  if (points.empty() || points.size() != weights.size())
    throw std::invalid_argument("karcher_mean: need one weight per point and at least one point");
  double total = 0.0;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] < 0.0 || !std::isfinite(weights[i])) throw std::invalid_argument("karcher_mean: negative weight");
    if (points[i].n() != points[0].n()) throw std::invalid_argument("karcher_mean: dimension mismatch");
    total += weights[i];
    if (weights[i] > 0.0) used.push_back(i);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("karcher_mean: weights must sum to 1");

  const double limit = cfg.r_conv / cfg.K();
  for (std::size_t a = 0; a < used.size(); ++a)
    for (std::size_t b = a + 1; b < used.size(); ++b) {
      const double d = distance(points[used[a]], points[used[b]]);
      if (!(d < limit))
        throw PointsTooSpread("karcher_mean: points " + std::to_string(used[a]) + " and " + std::to_string(used[b]) +
                              " are " + std::to_string(d) + " apart (limit " + std::to_string(limit) + ")");
    }

  // start from the heaviest point, lowest index on ties
  std::size_t start = used[0];
  for (std::size_t i : used)
    if (weights[i] > weights[start]) start = i;
  if (used.size() == 1) return {points[start], 0, 0.0};

  RotationElement x = points[start];
  for (int it = 0; it <= 100; ++it) {
    Matrix v = Matrix::Zero(x.matrix().rows(), x.matrix().cols());
    for (std::size_t i : used) v += weights[i] * rotation_log(x.matrix().transpose() * points[i].matrix()).log;
    const double step = v.norm();
    if (step < 1e-12) return {x, it, step};
    if (it == 100) break;
    x = RotationElement::project(x.matrix() * rotation_exp(v).matrix());
  }
  throw NoConvergence("karcher_mean: no convergence within 100 iterations");
}

inline RotationElement karcher_mean(const std::vector<RotationElement>& points, const std::vector<double>& weights,
                                    const ComConfig& cfg = ComConfig{}) {
  return karcher_mean_detailed(points, weights, cfg).mean;
}

// ---------------------------------------------------------------------------
// Partitions of unity and the discrete-to-continuous pipeline

/// h(t) = exp(1 - 1/(1 - t^2)) on [0, 1), zero beyond.
inline double bump(double t) {
  if (!(t < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

/// Weights w_j(g) proportional to h(d(g, p_j) / nu) over a nu-separated net.
class BumpPartition {
 public:
  BumpPartition(std::vector<RotationElement> net, double nu) : net_(std::move(net)), nu_(nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("bump_partition: nu must be positive");
    for (std::size_t i = 0; i < net_.size(); ++i)
      for (std::size_t j = i + 1; j < net_.size(); ++j)
        if (distance(net_[i], net_[j]) < nu)
          throw std::invalid_argument("bump_partition: net points " + std::to_string(i) + " and " +
                                      std::to_string(j) + " are closer than nu");
  }

  std::vector<double> weights(const RotationElement& g) const {
    std::vector<double> w(net_.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < net_.size(); ++j) {
      w[j] = bump(distance(g, net_[j]) / nu_);
      total += w[j];
    }
    if (!(total > 0.0)) throw NoCoverage("bump_partition: no net point within nu of the query");
    for (auto& v : w) v /= total;
    return w;
  }

  const std::vector<RotationElement>& net() const noexcept { return net_; }
  double nu() const noexcept { return nu_; }

 private:
  std::vector<RotationElement> net_;
  double nu_;
};

inline BumpPartition bump_partition(std::vector<RotationElement> net, double nu) {
  return BumpPartition(std::move(net), nu);
}

/// Greedy eta-separated subset of the candidates, scanned in order.
inline std::vector<std::size_t> rotation_net(const std::vector<RotationElement>& candidates, double eta) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool far = true;
    for (std::size_t k : kept) far = far && distance(candidates[i], candidates[k]) >= eta;
    if (far) kept.push_back(i);
  }
  return kept;
}

/// `count` equally spaced rotations of SO(2), rotated by `offset` spacings.
inline std::vector<RotationElement> so2_grid(std::size_t count, double offset = 0.0) {
  std::vector<RotationElement> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(so2(2.0 * std::numbers::pi * (static_cast<double>(k) + offset) / static_cast<double>(count)));
  return out;
}

/// A sampled map from a finite subset of SO(m) to SO(n).
struct RotationMap {
  std::vector<RotationElement> source;
  std::vector<RotationElement> image;
};

/// The continuous replacement of a sampled map: g is sent to the center of
/// mass of alpha(a_j) over the source net points a_j near g, weighted by the
/// bump partition.
class ContinuousMapRep {
 public:
  RotationElement operator()(const RotationElement& g) const {
    const auto w = partition_.weights(g);
    std::vector<RotationElement> pts;
    std::vector<double> ws;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (w[j] > 0.0) {
        pts.push_back(target_net_[alpha_[j]]);
        ws.push_back(w[j]);
      }
    // renormalize so the mean's sum-to-one check is not tripped by rounding
    const double total = std::accumulate(ws.begin(), ws.end(), 0.0);
    for (auto& v : ws) v /= total;
    return karcher_mean(pts, ws, cfg_);
  }

  const BumpPartition& partition() const noexcept { return partition_; }
  const std::vector<std::size_t>& net_indices() const noexcept { return net_indices_; }  // A, as source indices
  const std::vector<RotationElement>& target_net() const noexcept { return target_net_; }
  const std::vector<std::size_t>& alpha() const noexcept { return alpha_; }  // A -> index into B
  const ComConfig& config() const noexcept { return cfg_; }
  double eta() const noexcept { return eta_; }
  double deviation_bound() const { return eta_ * (3.0 * cfg_.K() + 4.0); }
  double jump_bound() const { return 3.0 * eta_ * cfg_.K(); }

 private:
  friend ContinuousMapRep continuify(const RotationMap&, double, double, const ComConfig&,
                                     std::vector<RotationElement>);
  ContinuousMapRep(BumpPartition p, std::vector<std::size_t> idx, std::vector<RotationElement> b,
                   std::vector<std::size_t> alpha, ComConfig cfg, double eta)
      : partition_(std::move(p)),
        net_indices_(std::move(idx)),
        target_net_(std::move(b)),
        alpha_(std::move(alpha)),
        cfg_(cfg),
        eta_(eta) {}

  BumpPartition partition_;
  std::vector<std::size_t> net_indices_;
  std::vector<RotationElement> target_net_;
  std::vector<std::size_t> alpha_;
  ComConfig cfg_;
  double eta_;
};

/// A = greedy nu-net of the source points, B = target_net (must be
/// eta-separated), alpha(a) = nearest point of B to psi(a).
inline ContinuousMapRep continuify(const RotationMap& psi, double nu, double eta, const ComConfig& cfg,
                                   std::vector<RotationElement> target_net) {
  cfg.validate();
  if (psi.source.empty() || psi.source.size() != psi.image.size())
    throw std::invalid_argument("continuify: psi needs one image per source point");
  if (target_net.empty()) throw std::invalid_argument("continuify: empty target net");
  if (!(eta > 0.0)) throw std::invalid_argument("continuify: eta must be positive");
  if (!(3.0 * eta < cfg.r_conv / cfg.K()))
    throw PointsTooSpread("continuify: 3 eta = " + std::to_string(3.0 * eta) + " is not below r/K = " +
                          std::to_string(cfg.r_conv / cfg.K()));
  for (std::size_t i = 0; i < target_net.size(); ++i)
    for (std::size_t j = i + 1; j < target_net.size(); ++j)
      if (distance(target_net[i], target_net[j]) < eta)
        throw NetIncompatible("continuify: target net points " + std::to_string(i) + " and " + std::to_string(j) +
                              " are closer than eta");

  const auto idx = rotation_net(psi.source, nu);
  std::vector<RotationElement> a;
  std::vector<std::size_t> alpha;
  for (std::size_t i : idx) {
    a.push_back(psi.source[i]);
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t b = 0; b < target_net.size(); ++b) {
      const double d = distance(psi.image[i], target_net[b]);
      if (d < best_d) {
        best = b;
        best_d = d;
      }
    }
    alpha.push_back(best);
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (distance(a[i], a[j]) < 2.0 * nu && !(distance(target_net[alpha[i]], target_net[alpha[j]]) < 3.0 * eta))
        throw NetIncompatible("continuify: net points " + std::to_string(idx[i]) + " and " + std::to_string(idx[j]) +
                              " are within 2 nu but their images are not within 3 eta");
  return ContinuousMapRep(BumpPartition(std::move(a), nu), idx, std::move(target_net), std::move(alpha), cfg, eta);
}

/// Largest number of non-zero partition weights over the sample points.
inline int partition_multiplicity(const BumpPartition& p, const std::vector<RotationElement>& samples) {
  int worst = 0;
  for (const auto& g : samples) {
    const auto w = p.weights(g);
    worst = std::max(worst, static_cast<int>(std::count_if(w.begin(), w.end(), [](double v) { return v > 0.0; })));
  }
  return worst;
}

/// max d(psi(a), psi(b)) over source pairs closer than `radius`; a
/// measurement aid for choosing eta.
inline double image_modulus(const RotationMap& psi, double radius) {
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.source.size(); ++i)
    for (std::size_t j = i + 1; j < psi.source.size(); ++j)
      if (distance(psi.source[i], psi.source[j]) < radius)
        worst = std::max(worst, distance(psi.image[i], psi.image[j]));
  return worst;
}

}  // namespace eqgh
