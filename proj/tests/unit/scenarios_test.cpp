#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eqgh/scenarios.hpp"

using namespace eqgh;
using std::numbers::pi;

namespace {

const ConvergenceReport& circle_report() {
  static const ConvergenceReport r = run_sequence(circle_scenario());
  return r;
}

const ConvergenceReport& torus_report() {
  static const ConvergenceReport r = run_sequence(torus_scenario());
  return r;
}

}  // namespace

TEST(Generators, CircleExamples) {
  EXPECT_EQ(gen_circle(12, 1).group().order(), 1u);
  EXPECT_EQ(isometry_group(gen_circle(12, 12).space()).group().order(), 24u);
  const auto os = orbit_space(gen_circle(12, 4));
  ASSERT_EQ(os.size(), 3u);
  for (PointIndex a = 0; a < 3; ++a)
    for (PointIndex b = 0; b < 3; ++b)
      if (a != b) {
        EXPECT_NEAR(os(a, b), pi / 6, 1e-12);
      }
  EXPECT_THROW(gen_circle(12, 5), DivisibilityError);
}

TEST(Generators, TorusFiberCollapse) {
  const auto big = gen_collapsing_torus(4, 6, 20.0);
  EXPECT_NEAR(kernel_orbit_diameter(big, {0, 1, 2, 3, 4, 5}), 10.0, 1e-12);
  const auto thin = gen_collapsing_torus(4, 6, 0.1);
  EXPECT_LE(kernel_orbit_diameter(thin, {0, 1, 2, 3, 4, 5}), 0.05 * pi);
  EXPECT_LE(gh_distance_bruteforce(orbit_space(thin), circle_space(4)), 0.05 * pi);
}

TEST(CircleScenario, EpsilonNonIncreasingAndInjective) {
  const auto& r = circle_report();
  ASSERT_EQ(r.rows.size(), 8u);
  EXPECT_TRUE(r.all_ok());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    EXPECT_TRUE(row.forward_verified && row.backward_verified) << row.label;
    if (i > 0) {
      EXPECT_LE(row.epsilon, r.rows[i - 1].epsilon) << row.label;
    }
    EXPECT_TRUE(row.snapped) << row.label;
    EXPECT_LT(row.q, 0.1);
    EXPECT_EQ(row.kernel_order, 1u) << row.label;
    EXPECT_EQ(row.limit_symmetry_order, 48u);
  }
  EXPECT_NEAR(r.rows.back().epsilon, pi / 24, 1e-12);
}

TEST(CircleScenario, EveryCyclicGroupEmbedsInTheLimitIsometries) {
  const auto& r = circle_report();
  EXPECT_FALSE(r.symmetry.symmetry_lost);
  for (const auto& s : r.symmetry.rows) {
    EXPECT_TRUE(s.divides);
    ASSERT_TRUE(s.embeds);
    EXPECT_TRUE(*s.embeds);
    EXPECT_EQ(s.embedding.size(), s.group_order);
  }
}

TEST(TorusScenario, KernelOrbitsShrink) {
  const auto& r = torus_report();
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_TRUE(r.all_ok());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double c = 1.0 / static_cast<double>(i + 1);
    const auto& row = r.rows[i];
    EXPECT_EQ(row.kernel_order, 3u);
    EXPECT_LE(row.kernel_orbit_diameter, c);
    EXPECT_NEAR(row.kernel_orbit_diameter / c, 1.0 / 3.0, 1e-12);
    if (i > 0) {
      EXPECT_LT(row.kernel_orbit_diameter, r.rows[i - 1].kernel_orbit_diameter);
    }
  }
  EXPECT_TRUE(r.symmetry.symmetry_lost);
  EXPECT_EQ(r.symmetry.kernel_witness, (std::vector<Element>{0, 1, 2}));
  EXPECT_FALSE(r.symmetry.rows.back().divides);
}

TEST(Scenarios, FukayaCheckWhereTheOracleReaches) {
  int checked = 0;
  for (const auto* r : {&circle_report(), &torus_report()})
    for (const auto& row : r->rows)
      if (row.fukaya_ok) {
        EXPECT_TRUE(*row.fukaya_ok) << row.label;
        EXPECT_LE(row.orbit_gh, row.epsilon + row.grid_step);
        ++checked;
      }
  EXPECT_GE(checked, 12);
}

TEST(Scenarios, CertificatesReverify) {
  for (const auto* r : {&circle_report(), &torus_report()})
    for (const auto& row : r->rows) {
      const auto fwd = json::parse(row.forward_certificate.dump());
      const auto bwd = json::parse(row.backward_certificate.dump());
      EXPECT_TRUE(reverify_certificate(fwd).pass()) << row.label;
      EXPECT_TRUE(reverify_certificate(bwd).pass()) << row.label;
      EXPECT_EQ(fwd.at("report").at("pass").get<bool>(), true);
    }
}

TEST(Scenarios, ReportsAreDeterministic) {
  const auto again = run_sequence(torus_scenario());
  EXPECT_EQ(report_csv(again), report_csv(torus_report()));
  EXPECT_EQ(report_json(again).dump(), report_json(torus_report()).dump());
}

TEST(Scenarios, ConstantSequence) {
  Scenario s;
  s.name = "constant";
  for (int i = 0; i < 3; ++i) s.steps.push_back(gen_circle(8, 4));
  const auto r = run_sequence(s);
  const auto grid = epsilon_grid(s.steps[0].space(), s.steps[0].space());
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.epsilon, grid.front());
    EXPECT_EQ(row.q, 0.0);
    EXPECT_EQ(row.kernel_order, 1u);
  }
  EXPECT_FALSE(r.symmetry.symmetry_lost);
}

TEST(Scenarios, TrivialGroupsVacuous) {
  Scenario s;
  s.name = "trivial";
  for (std::size_t n : {6u, 8u}) s.steps.push_back(trivial_action(circle_space(n)));
  const auto r = run_sequence(s);
  EXPECT_TRUE(r.all_ok());
  EXPECT_FALSE(r.symmetry.symmetry_lost);
  for (const auto& row : r.symmetry.rows) EXPECT_TRUE(row.divides);
}

TEST(Scenarios, ComponentErrorsAreRecorded) {
  Scenario s;
  s.name = "too_big";
  s.steps.push_back(gen_circle(24, 24));
  s.limit = gen_circle(24, 24);
  s.bounds = SearchBounds{};
  const auto r = run_sequence(s);
  EXPECT_FALSE(r.all_ok());
  EXPECT_FALSE(r.rows[0].error.empty());
  EXPECT_NE(report_json(r, false).at("rows")[0].at("error").get<std::string>(), "");
}

TEST(Scenarios, FromJson) {
  json j = {{"name", "pair"}, {"steps", {to_json(gen_circle(6, 3)), to_json(gen_circle(6, 6))}}, {"limit", to_json(gen_circle(6, 6))}};
  const auto s = scenario_from_json(j);
  EXPECT_EQ(s.steps.size(), 2u);
  EXPECT_TRUE(run_sequence(s).all_ok());
  EXPECT_THROW(scenario_from_json(json{{"steps", json::array()}}), JsonFormatError);
  EXPECT_THROW(scenario_from_json(json{{"name", "x"}}), JsonFormatError);
  j["step_angles"] = {{0.0}};
  EXPECT_THROW(scenario_from_json(j), JsonFormatError);
}
