// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "eqgh/eqgh.hpp"

using namespace eqgh;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("CRITERION %d %s: %s | %s | %.2fs (limit %.0fs)%s\n", id, pass ? "PASS" : "FAIL", name, o.detail.c_str(),
              secs, limit_s, in_time ? "" : " TIMEOUT");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix hat(const Eigen::Vector3d& v) {
  Matrix m(3, 3);
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

RotationElement random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
  return RotationElement::project(a);
}

RotationElement perturb(const RotationElement& x, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  return x * rotation_exp(hat({g(rng), g(rng), g(rng)}));
}

double objective(const RotationElement& x, const std::vector<RotationElement>& p, const std::vector<double>& w) {
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) f += w[i] * std::pow(rotation_log(x.matrix().transpose() * p[i].matrix()).log.norm(), 2);
  return f;
}

// local grid search around p[0], refining a 3^3 stencil down to 1e-9
RotationElement grid_minimizer(const std::vector<RotationElement>& p, const std::vector<double>& w) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  auto at = [&](const Eigen::Vector3d& u) { return p[0] * rotation_exp(hat(u)); };
  double best = objective(at(v), p, w);
  for (double step = 0.05; step > 1e-9;) {
    Eigen::Vector3d arg = v;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k) {
          const Eigen::Vector3d c = v + step * Eigen::Vector3d(i, j, k);
          const double f = objective(at(c), p, w);
          if (f < best) {
            best = f;
            arg = c;
          }
        }
    if (arg == v) step /= 2.0;
    v = arg;
  }
  return at(v);
}

std::vector<GroupAction> fixtures() {
  return {gen_circle(12, 1),  gen_circle(12, 3),  gen_circle(12, 4), gen_circle(12, 12), gen_circle(8, 8),
          isometry_group(circle_space(12)), gen_collapsing_torus(4, 3, 1.0), gen_collapsing_torus(5, 4, 0.3)};
}

}  // namespace

int main() {
  criterion(1, "definition fidelity", 60.0, [] {
    std::mt19937_64 rng(1001);
    int verified = 0, agree = 0;
    std::string worst;
    for (int t = 0; t < 50; ++t) {
      const auto a = random_action(rng, 8, 8), b = random_action(rng, 8, 8);
      const auto r = search_approximation(a, b);
      verified += verify_approximation(a, b, r.triple).pass();
      const double e = epgh_distance(trivial_action(a.space()), trivial_action(b.space()));
      SearchBounds bounds;
      bounds.gh_total_points = 16;
      const double two_gh = 2.0 * gh_distance_bruteforce(a.space(), b.space(), bounds);
      const auto grid = epsilon_grid(a.space(), b.space());
      const long ie = static_cast<long>(grid_index(grid, e)), ig = static_cast<long>(grid_index(grid, two_gh));
      if (std::abs(ie - ig) <= 1)
        ++agree;
      else if (worst.empty())
        worst = fmt(" first mismatch pair %d: eps*=%.6g 2gh=%.6g (grid %ld vs %ld)", t, e, two_gh, ie, ig);
    }
    return Outcome{verified == 50 && agree == 50,
                   fmt("certificates verified %d/50; trivial-group eps* within one grid step of 2gh %d/50;", verified, agree) + worst};
  });

  criterion(2, "seminorm laws", 10.0, [] {
    std::mt19937_64 rng(1002);
    auto all = fixtures();
    for (int i = 0; i < 100; ++i) all.push_back(random_action(rng, 10, 8));
    long sym = 0, mono = 0, metric = 0;
    for (const auto& a : all) {
      const auto& G = a.group();
      const double D = diameter(a.space());
      std::vector<double> prev(G.order(), 0.0);
      for (int s = 1; s <= 12; ++s) {
        const auto t = seminorm_table(a, D * s / 10.0 + 1e-3);
        for (Element g = 0; g < G.order(); ++g) {
          sym += t[g] != t[G.inverse(g)];
          mono += t[g] < prev[g];
          prev[g] = t[g];
        }
      }
      const auto reg = metric_regime(a, D + 1.0);
      metric += !(reg.separates && reg.triangle);
    }
    return Outcome{sym == 0 && mono == 0 && metric == 0,
                   fmt("%zu actions: inverse asymmetries %ld, monotonicity breaks %ld, non-metric at R > diam %ld",
                       all.size(), sym, mono, metric)};
  });

  criterion(3, "net laws", 5.0, [] {
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> u(0.01, 1.2);
    int bad = 0;
    for (int i = 0; i < 200; ++i) {
      const auto s = i % 2 ? random_euclidean_space(3 + rng() % 20, 2, rng) : random_generic_space(3 + rng() % 15, rng);
      const auto n = minimal_net(s, u(rng) * diameter(s));
      bad += !(net_covers(s, n) && net_separated(s, n));
    }
    std::size_t worst = 0;
    std::string where;
    int circles = 0;
    for (std::size_t n = 4; n <= 40; n += 2) {
      const auto s = circle_space(n);
      for (int k = 1; k <= 100; ++k, ++circles) {
        const double mu = k * pi / 50.0;
        const auto m = covering_multiplicity(s, minimal_net(s, mu));
        if (m > worst) {
          worst = m;
          where = fmt(" (circle_%zu, mu=%.4f)", n, mu);
        }
      }
    }
    return Outcome{bad == 0 && worst <= 3,
                   fmt("cover/separation failures %d/200; max covering multiplicity over %d sampled circles %zu", bad,
                       circles, worst) + where};
  });

  criterion(4, "center-of-mass numerics", 120.0, [] {
    const double pair = distance(karcher_mean({so2(0.3), so2(-0.3)}, {0.5, 0.5}), RotationElement::identity(2));
    const auto p1 = so2(1.234);
    const double single = distance(karcher_mean({p1}, {1.0}), p1);
    std::mt19937_64 rng(1004);
    const ComConfig cfg;
    double worst_grid = 0.0, worst_grad = 0.0, worst_fd = 0.0;
    int spread = 0;
    for (int t = 0; t < 100; ++t) {
      const auto base = random_rotation(rng);
      std::vector<RotationElement> p = {perturb(base, rng, 0.05), perturb(base, rng, 0.05), perturb(base, rng, 0.05)};
      std::uniform_real_distribution<double> u(0.1, 1.0);
      std::vector<double> w = {u(rng), u(rng), u(rng)};
      const double s = w[0] + w[1] + w[2];
      for (auto& x : w) x /= s;
      w[2] = 1.0 - w[0] - w[1];
      MeanResult m{RotationElement::identity(3)};
      try {
        m = karcher_mean_detailed(p, w, cfg);
      } catch (const PointsTooSpread&) {
        ++spread;
        continue;
      }
      worst_grid = std::max(worst_grid, distance(m.mean, grid_minimizer(p, w)));
      worst_grad = std::max(worst_grad, m.gradient_norm);
      // directional derivative of the objective vs -2 <sum w log, xi>, at the mean and nearby
      for (const auto& x : {m.mean, perturb(m.mean, rng, 0.02)}) {
        Matrix v = Matrix::Zero(3, 3);
        for (std::size_t i = 0; i < 3; ++i) v += w[i] * rotation_log(x.matrix().transpose() * p[i].matrix()).log;
        for (int k = 0; k < 3; ++k) {
          Eigen::Vector3d e = Eigen::Vector3d::Zero();
          e[k] = 1.0;
          const Matrix xi = hat(e);
          const double h = 1e-5;
          const double fd = (objective(x * rotation_exp(h * xi), p, w) - objective(x * rotation_exp(-h * xi), p, w)) / (2 * h);
          worst_fd = std::max(worst_fd, std::abs(fd + 2.0 * (v.array() * xi.array()).sum()));
        }
      }
    }
    const bool pass = pair < 1e-10 && single < 1e-10 && spread == 0 && worst_grid < 1e-6 && worst_grad < 1e-10 && worst_fd < 1e-4;
    return Outcome{pass, fmt("two-point %.2g, single %.2g; 100 SO(3) triples (%d outside trust radius): grid oracle gap %.2g, "
                             "log-sum norm %.2g, finite-difference gap %.2g",
                             pair, single, spread, worst_grid, worst_grad, worst_fd)};
  });

  criterion(5, "continuous replacement pipeline", 30.0, [] {
    const auto B = so2_grid(48, 0.3);
    RotationMap psi;
    for (int k = 0; k < 24; ++k) {
      const auto g = so2(2 * pi * k / 24);
      std::size_t best = 0;
      for (std::size_t b = 1; b < B.size(); ++b)
        if (distance(B[b], g) < distance(B[best], g)) best = b;
      psi.source.push_back(g);
      psi.image.push_back(B[best]);
    }
    ComConfig cfg;
    cfg.N_max = 2;
    const double eta = 0.0415;
    const auto rep = continuify(psi, 0.07, eta, cfg, B);
    double net_gap = 0.0;
    for (std::size_t j = 0; j < rep.net_indices().size(); ++j)
      net_gap = std::max(net_gap, distance(rep(psi.source[rep.net_indices()[j]]), psi.image[rep.net_indices()[j]]));
    const auto samples = so2_grid(10000, 0.5);
    const int mult = partition_multiplicity(rep.partition(), samples);
    double dev = 0.0, jump = 0.0;
    RotationElement prev = rep(samples.back());
    for (const auto& g : samples) {
      const auto out = rep(g);
      const auto w = rep.partition().weights(g);
      for (std::size_t j = 0; j < w.size(); ++j)
        if (w[j] > 0.0) dev = std::max(dev, distance(out, psi.image[rep.net_indices()[j]]));
      jump = std::max(jump, distance(out, prev));
      prev = out;
    }
    const bool pass = net_gap < 1e-12 && dev <= rep.deviation_bound() && jump <= rep.jump_bound() && mult <= cfg.N_max;
    return Outcome{pass, fmt("K=%.0f eta=%.4f: deviation %.4f <= %.4f, max jump %.2g <= %.4f, net-point gap %.1g, "
                             "nonzero weights %d <= N=%d",
                             cfg.K(), eta, dev, rep.deviation_bound(), jump, rep.jump_bound(), net_gap, mult, cfg.N_max)};
  });

  criterion(6, "homomorphism snap", 30.0, [] {
    std::mt19937_64 rng(1006);
    int recovered = 0, refused = 0, wrong = 0, defect_over = 0;
    double ratio = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const auto n = std::uniform_int_distribution<std::size_t>(1, 24)(rng);
      const auto j = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      std::uniform_real_distribution<double> u(-0.02, 0.02);
      const auto G = cyclic_group(n);
      std::vector<RotationElement> exact, noisy;
      for (std::size_t k = 0; k < n; ++k) {
        const double a = 2 * pi * static_cast<double>(j * k % n) / static_cast<double>(n);
        exact.push_back(so2(a));
        noisy.push_back(so2(a + pi * u(rng)));  // noise of at most 0.02 in normalized distance
      }
      defect_over += homomorphism_defect(G, noisy).q > 3 * 0.02;
      try {
        const auto r = snap_to_so2(G, noisy);
        bool same = true;
        for (std::size_t k = 0; k < n; ++k) same = same && distance(r.hom.image[k], exact[k]) < 1e-9;
        if (same && r.displacement <= 1.36 * r.q + 1e-9)
          ++recovered;
        else
          ++wrong;
        if (r.q > 0) ratio = std::max(ratio, r.displacement / r.q);
      } catch (const NoHomomorphismNearby&) {
        ++refused;
      }
    }
    return Outcome{recovered >= 990 && wrong == 0,
                   fmt("recovered %d/1000, refused %d, silent wrong %d, q > 3 delta %d, max displacement/q %.3f",
                       recovered, refused, wrong, defect_over, ratio)};
  });

  criterion(7, "symmetry preservation vs loss", 120.0, [] {
    const auto c1 = run_sequence(circle_scenario()), c2 = run_sequence(circle_scenario());
    const auto t1 = run_sequence(torus_scenario()), t2 = run_sequence(torus_scenario());
    bool circle_ok = c1.all_ok();
    for (const auto& r : c1.rows) circle_ok = circle_ok && r.snapped && r.kernel_order == 1;
    for (const auto& s : c1.symmetry.rows) circle_ok = circle_ok && s.embeds && *s.embeds;
    bool torus_ok = t1.all_ok() && t1.symmetry.symmetry_lost;
    for (std::size_t i = 0; i < t1.rows.size(); ++i) {
      const double c = 1.0 / static_cast<double>(i + 1);
      torus_ok = torus_ok && t1.rows[i].kernel_orbit_diameter <= c;
      if (i > 0) torus_ok = torus_ok && t1.rows[i].kernel_orbit_diameter < t1.rows[i - 1].kernel_orbit_diameter;
    }
    const bool same = report_csv(c1) == report_csv(c2) && report_json(c1).dump() == report_json(c2).dump() &&
                      report_csv(t1) == report_csv(t2) && report_json(t1).dump() == report_json(t2).dump();
    std::string diam;
    for (const auto& r : t1.rows) diam += fmt("%s%.4f", diam.empty() ? "" : " ", r.kernel_orbit_diameter);
    return Outcome{circle_ok && torus_ok && same,
                   fmt("circle injective at all %zu steps: %s; torus kernel orbit diameters [%s], symmetry lost: %s; "
                       "byte-identical reruns: %s",
                       c1.rows.size(), circle_ok ? "yes" : "no", diam.c_str(), t1.symmetry.symmetry_lost ? "yes" : "no",
                       same ? "yes" : "no")};
  });

  criterion(8, "orbit-space consistency", 60.0, [] {
    int checked = 0, skipped = 0, bad = 0;
    for (const auto& sc : {circle_scenario(), torus_scenario()}) {
      const auto r = run_sequence(sc);
      for (const auto& row : r.rows) {
        if (!row.fukaya_ok) {
          ++skipped;
          continue;
        }
        ++checked;
        bad += !*row.fukaya_ok;
      }
    }
    return Outcome{bad == 0 && checked > 0,
                   fmt("%d steps checked, %d violations, %d steps beyond the oracle's size bound", checked, bad, skipped)};
  });

  return failures;
}
