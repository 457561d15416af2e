#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqgh/epgh.hpp"
#include "eqgh/generators.hpp"
#include "eqgh/groups.hpp"
#include "eqgh/json_io.hpp"
#include "eqgh/metric_space.hpp"
#include "eqgh/rotation.hpp"
#include "eqgh/smoothing.hpp"

namespace eqgh {

/// A sequence of actions and a finite stand-in for its limit. Optional SO(2)
/// angles (one per group element) let run_sequence push the group maps
/// through continuify before snapping.
struct Scenario {
  std::string name;
  std::vector<std::string> step_labels;
  std::vector<GroupAction> steps;
  std::optional<GroupAction> limit;
  std::vector<std::vector<double>> step_angles;  // empty, or one entry per step
  std::vector<double> limit_angles;              // empty, or one per limit element
  SearchBounds bounds = SearchBounds::from_env();
  double eta = 0.04;
  std::size_t target_net_size = 48;
};

namespace detail {

inline std::vector<double> cyclic_angles(std::size_t p) {
  std::vector<double> out(p);
  for (std::size_t k = 0; k < p; ++k) out[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p);
  return out;
}

inline void apply_env_override(SearchBounds& b) {
  const auto env = SearchBounds::from_env();
  if (env.epgh_points != SearchBounds{}.epgh_points) {
    b.epgh_points = env.epgh_points;
    b.epgh_group = env.epgh_group;
  }
}

}  // namespace detail

/// (circle_24, Z_p) for the divisors p of 24, limit (circle_24, Z_24).
inline Scenario circle_scenario(std::size_t steps = 8) {
  Scenario s;
  s.name = "circle";
  const std::size_t divisors[] = {1, 2, 3, 4, 6, 8, 12, 24};
  for (std::size_t i = 0; i < std::min<std::size_t>(steps, 8); ++i) {
    s.step_labels.push_back("circle_24/Z_" + std::to_string(divisors[i]));
    s.steps.push_back(gen_circle(24, divisors[i]));
    s.step_angles.push_back(detail::cyclic_angles(divisors[i]));
  }
  s.limit = gen_circle(24, 24);
  s.limit_angles = detail::cyclic_angles(24);
  s.bounds.epgh_points = 24;
  s.bounds.epgh_group = 24;
  detail::apply_env_override(s.bounds);
  return s;
}

/// 4 x 3 torus grids with fiber circumference 1/i and Z_3 rotating the
/// fiber; limit circle_4 with the trivial group.
inline Scenario torus_scenario(std::size_t steps = 5) {
  Scenario s;
  s.name = "torus";
  for (std::size_t i = 1; i <= steps; ++i) {
    s.step_labels.push_back("torus_4x3(c=1/" + std::to_string(i) + ")/Z_3");
    s.steps.push_back(gen_collapsing_torus(4, 3, 1.0 / static_cast<double>(i)));
    s.step_angles.push_back(detail::cyclic_angles(3));
  }
  s.limit = trivial_action(circle_space(4));
  s.limit_angles = {0.0};
  return s;
}

/// { "name": str, "steps": [<action>], "limit": <action>,
///   optional "step_angles": [[real]], "limit_angles": [real] }
inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.name = j.value("name", std::string("custom"));
  const auto steps = detail::field<json>(j, "steps", "scenario");
  if (!steps.is_array() || steps.empty()) throw JsonFormatError("scenario: \"steps\" must be a non-empty array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    s.steps.push_back(action_from_json(steps[i]));
    s.step_labels.push_back("step_" + std::to_string(i + 1));
  }
  if (j.contains("limit")) s.limit = action_from_json(j.at("limit"));
  if (j.contains("step_angles"))
    s.step_angles = detail::field<std::vector<std::vector<double>>>(j, "step_angles", "scenario");
  if (j.contains("limit_angles")) s.limit_angles = detail::field<std::vector<double>>(j, "limit_angles", "scenario");
  if (!s.step_angles.empty() && s.step_angles.size() != s.steps.size())
    throw JsonFormatError("scenario: step_angles needs one entry per step");
  return s;
}

struct ReportRow {
  std::size_t step = 0;
  std::string label;
  double epsilon = NAN;
  double grid_step = NAN;  // distance to the next grid value above epsilon
  bool forward_verified = false;
  bool backward_verified = false;
  std::string psi_source;  // "certificate" or "matching"
  double q = NAN;
  bool snapped = false;
  std::size_t kernel_order = 0;
  std::vector<Element> kernel_elements;
  double kernel_orbit_diameter = NAN;
  std::size_t limit_symmetry_order = 0;
  double orbit_gh = NAN;  // Fukaya check, NaN when the oracle is out of range
  std::optional<bool> fukaya_ok;
  std::vector<Element> snapped_hom;  // step group -> limit group
  std::string note;
  std::string error;
  nlohmann::json forward_certificate;
  nlohmann::json backward_certificate;
};

struct SymmetryRow {
  std::size_t step = 0;
  std::size_t group_order = 0;
  std::size_t limit_isometry_order = 0;
  bool divides = false;
  std::optional<bool> embeds;  // snapped map composed into the limit isometry group is injective
  std::vector<Element> embedding;
};

struct SymmetryReport {
  std::vector<SymmetryRow> rows;
  bool symmetry_lost = false;
  std::vector<Element> kernel_witness;  // kernel of the last step's map when symmetry is lost
};

struct ConvergenceReport {
  std::string scenario;
  std::vector<ReportRow> rows;
  SymmetryReport symmetry;
  bool all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.error.empty(); });
  }
};

namespace detail {

inline std::optional<Element> element_for_rotation(const std::vector<double>& angles, const RotationElement& r) {
  for (Element g = 0; g < angles.size(); ++g)
    if (distance(so2(angles[g]), r) < 1e-9) return g;
  return std::nullopt;
}

inline void run_step(const Scenario& sc, std::size_t i, const GroupAction& limit, std::size_t limit_iso_order,
                     ReportRow& row) {
  const auto& step = sc.steps[i];
  SearchOptions opt;
  opt.bounds = sc.bounds;

  const auto d = epgh_distance_with_certificates(step, limit, opt);
  row.epsilon = d.epsilon;
  const auto grid = epsilon_grid(step.space(), limit.space());
  const auto next = std::upper_bound(grid.begin(), grid.end(), d.epsilon);
  row.grid_step = next == grid.end() ? 0.0 : *next - d.epsilon;
  row.forward_verified = verify_approximation(step, limit, d.forward).pass();
  row.backward_verified = verify_approximation(limit, step, d.backward).pass();
  row.forward_certificate = certificate_json(step, limit, d.forward);
  row.backward_certificate = certificate_json(limit, step, d.backward);
  row.limit_symmetry_order = limit_iso_order;

  // group map step -> limit: psi of the limit -> step certificate when it is
  // total, otherwise the full-scale equivariance matching
  const auto& G = step.group();
  std::vector<Element> psi(G.order());
  if (d.backward.psi.size() == G.order()) {
    row.psi_source = "certificate";
    for (auto [g, l] : d.backward.psi) psi[g] = l;
  } else {
    row.psi_source = "matching";
    psi = equivariance_matching(limit, step, full_scale_pointed_map(limit.space(), step.space()));
  }

  std::optional<std::vector<Element>> hom;
  const bool rotations = !sc.step_angles.empty() && !sc.limit_angles.empty();
  if (rotations) {
    const auto& angles = sc.step_angles[i];
    RotationMap map;
    for (Element g = 0; g < G.order(); ++g) {
      map.source.push_back(so2(angles[g]));
      map.image.push_back(so2(sc.limit_angles[psi[g]]));
    }
    double gap = 1.0;
    for (std::size_t a = 0; a < map.source.size(); ++a)
      for (std::size_t b = a + 1; b < map.source.size(); ++b) gap = std::min(gap, distance(map.source[a], map.source[b]));
    const double nu = G.order() == 1 ? 1.0 : gap / 2.0;
    ComConfig cfg;
    cfg.N_max = 1;
    auto rep = continuify(map, nu, sc.eta, cfg, so2_grid(sc.target_net_size));
    cfg.N_max = std::max(1, partition_multiplicity(rep.partition(), map.source));
    rep = continuify(map, nu, sc.eta, cfg, so2_grid(sc.target_net_size));
    std::vector<RotationElement> smooth;
    for (const auto& g : map.source) smooth.push_back(rep(g));
    row.q = homomorphism_defect(G, smooth).q;
    try {
      const auto snap = snap_to_so2(G, smooth);
      std::vector<Element> h(G.order());
      bool mapped = true;
      for (Element g = 0; g < G.order(); ++g) {
        const auto e = element_for_rotation(sc.limit_angles, snap.hom.image[g]);
        if (!e) {
          mapped = false;
          break;
        }
        h[g] = *e;
      }
      row.snapped = true;
      if (mapped)
        hom = std::move(h);
      else
        row.note = "snapped homomorphism leaves the limit group";
      const auto k = kernel(snap.hom);
      row.kernel_order = k.kernel.group.order();
      row.kernel_elements = k.kernel.embedding;
    } catch (const DefectTooLarge& e) {
      row.note = e.what();
    } catch (const NoHomomorphismNearby& e) {
      row.note = e.what();
    }
  } else {
    const auto& L = limit.group();
    row.q = homomorphism_defect(G, L, psi, discrete_distance()).q;
    if (row.q == 0.0) {
      row.snapped = true;
      hom = psi;
      const auto k = kernel(FiniteHomomorphism{G, L, psi});
      row.kernel_order = k.kernel.group.order();
      row.kernel_elements = k.kernel.embedding;
    } else {
      row.note = "group map is not a homomorphism";
    }
  }
  if (hom) row.snapped_hom = *hom;
  if (row.snapped) row.kernel_orbit_diameter = kernel_orbit_diameter(step, row.kernel_elements);

  // orbit-space consistency
  const auto os = orbit_space(step);
  const auto ol = orbit_space(limit);
  if (os.size() + ol.size() <= sc.bounds.gh_total_points) {
    row.orbit_gh = gh_distance_bruteforce(os, ol, sc.bounds);
    row.fukaya_ok = row.orbit_gh <= row.epsilon + row.grid_step;
  }
}

}  // namespace detail

/// Runs every step against the limit candidate (the last step when the
/// scenario has no explicit limit). Component errors are recorded in the
/// step's row and the run continues.
inline ConvergenceReport run_sequence(const Scenario& sc) {
  if (sc.steps.empty()) throw std::invalid_argument("run_sequence: scenario has no steps");
  const GroupAction& limit = sc.limit ? *sc.limit : sc.steps.back();
  const auto iso = isometry_group(limit.space(), sc.bounds);

  ConvergenceReport rep;
  rep.scenario = sc.name;
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    ReportRow row;
    row.step = i + 1;
    row.label = i < sc.step_labels.size() ? sc.step_labels[i] : "step_" + std::to_string(i + 1);
    try {
      detail::run_step(sc, i, limit, iso.group().order(), row);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rep.rows.push_back(std::move(row));
  }

  // order semicontinuity: does |G_i| divide |Isom(limit)|, and does the
  // snapped map composed with the limit action embed G_i there?
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const auto& step = sc.steps[i];
    const auto& row = rep.rows[i];
    SymmetryRow s;
    s.step = i + 1;
    s.group_order = step.group().order();
    s.limit_isometry_order = iso.group().order();
    s.divides = s.limit_isometry_order % s.group_order == 0;
    if (!row.snapped_hom.empty()) {
      std::vector<Element> emb(step.group().order());
      bool ok = true;
      for (Element g = 0; g < emb.size() && ok; ++g) {
        const auto& perm = limit.perms()[row.snapped_hom[g]];
        const auto it = std::lower_bound(iso.perms().begin(), iso.perms().end(), perm);
        ok = it != iso.perms().end() && *it == perm;
        if (ok) emb[g] = static_cast<Element>(it - iso.perms().begin());
      }
      if (ok) {
        FiniteHomomorphism h{step.group(), iso.group(), emb};
        s.embeds = is_homomorphism(h) && check_monomorphism(h).injective;
        s.embedding = std::move(emb);
      }
    }
    rep.symmetry.rows.push_back(std::move(s));
  }
  const auto& last = rep.symmetry.rows.back();
  rep.symmetry.symmetry_lost = !last.divides || (last.embeds && !*last.embeds) || rep.rows.back().kernel_order > 1;
  if (rep.symmetry.symmetry_lost) rep.symmetry.kernel_witness = rep.rows.back().kernel_elements;
  return rep;
}

inline SymmetryReport symmetry_semicontinuity_check(const Scenario& sc) { return run_sequence(sc).symmetry; }

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string join(const std::vector<Element>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

}  // namespace detail

inline std::string report_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "step,label,epsilon,grid_step,forward_verified,backward_verified,psi_source,q,snapped,kernel_order,"
        "kernel_orbit_diameter,limit_symmetry_order,orbit_gh,fukaya_ok,divides_limit_order,embeds,error\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const auto& s = r.symmetry.rows[i];
    os << row.step << ',' << detail::csv_escape(row.label) << ',' << detail::fmt(row.epsilon) << ','
       << detail::fmt(row.grid_step) << ',' << row.forward_verified << ',' << row.backward_verified << ','
       << row.psi_source << ',' << detail::fmt(row.q) << ',' << row.snapped << ',' << row.kernel_order << ','
       << detail::fmt(row.kernel_orbit_diameter) << ',' << row.limit_symmetry_order << ','
       << detail::fmt(row.orbit_gh) << ',' << (row.fukaya_ok ? std::to_string(*row.fukaya_ok) : "") << ','
       << s.divides << ',' << (s.embeds ? std::to_string(*s.embeds) : "") << ','
       << detail::csv_escape(row.error) << '\n';
  }
  return os.str();
}

inline json report_json(const ConvergenceReport& r, bool with_certificates = true) {
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json rows = json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const auto& s = r.symmetry.rows[i];
    json j = {{"step", row.step},
              {"label", row.label},
              {"epsilon", num(row.epsilon)},
              {"grid_step", num(row.grid_step)},
              {"forward_verified", row.forward_verified},
              {"backward_verified", row.backward_verified},
              {"psi_source", row.psi_source},
              {"q", num(row.q)},
              {"snapped", row.snapped},
              {"snapped_hom", row.snapped_hom},
              {"kernel_order", row.kernel_order},
              {"kernel", row.kernel_elements},
              {"kernel_orbit_diameter", num(row.kernel_orbit_diameter)},
              {"limit_symmetry_order", row.limit_symmetry_order},
              {"orbit_gh", num(row.orbit_gh)},
              {"fukaya_ok", row.fukaya_ok ? json(*row.fukaya_ok) : json(nullptr)},
              {"divides_limit_order", s.divides},
              {"embeds", s.embeds ? json(*s.embeds) : json(nullptr)},
              {"embedding", s.embedding},
              {"note", row.note},
              {"error", row.error}};
    if (with_certificates) {
      j["forward_certificate"] = row.forward_certificate;
      j["backward_certificate"] = row.backward_certificate;
    }
    rows.push_back(std::move(j));
  }
  return {{"scenario", r.scenario},
          {"all_ok", r.all_ok()},
          {"symmetry_lost", r.symmetry.symmetry_lost},
          {"kernel_witness", r.symmetry.kernel_witness},
          {"symmetry_note", "finite groups have symmetry degree 0; order divisibility is reported as its shadow"},
          {"rows", rows}};
}

}  // namespace eqgh
