// eqgh: run a convergence scenario and write its report.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "eqgh/json_io.hpp"
#include "eqgh/scenarios.hpp"

int main(int argc, char** argv) {
  using namespace eqgh;
  CLI::App app{"Equivariant GH convergence scenarios"};
  app.require_subcommand(1);
  auto* scenario = app.add_subcommand("scenario", "scenario commands");
  scenario->require_subcommand(1);
  auto* run = scenario->add_subcommand("run", "run a scenario: circle, torus, or a scenario JSON file");
  std::string which, out_path, certs_dir;
  std::size_t steps = 0;
  run->add_option("scenario", which)->required();
  run->add_option("--steps", steps, "number of steps (default: all)");
  run->add_option("--out", out_path, "CSV report path (JSON sidecar next to it)");
  run->add_option("--certs", certs_dir, "directory for per-step certificates");

  CLI11_PARSE(app, argc, argv);

  try {
    Scenario sc;
    if (which == "circle") {
      sc = circle_scenario(steps ? steps : 8);
    } else if (which == "torus") {
      sc = torus_scenario(steps ? steps : 5);
    } else {
      sc = scenario_from_json(load_json_file(which));
      if (steps && steps < sc.steps.size()) {
        sc.steps.erase(sc.steps.begin() + static_cast<std::ptrdiff_t>(steps), sc.steps.end());
        sc.step_labels.resize(steps);
        if (!sc.step_angles.empty()) sc.step_angles.resize(steps);
      }
    }
    const auto report = run_sequence(sc);
    const auto csv = report_csv(report);
    if (out_path.empty()) {
      std::cout << csv;
    } else {
      std::ofstream(out_path) << csv;
      auto sidecar = std::filesystem::path(out_path).replace_extension(".json");
      save_json_file(sidecar.string(), report_json(report, certs_dir.empty()));
    }
    if (!certs_dir.empty()) {
      std::filesystem::create_directories(certs_dir);
      for (const auto& row : report.rows) {
        if (!row.error.empty()) continue;
        const auto base = std::filesystem::path(certs_dir) / ("step_" + std::to_string(row.step));
        save_json_file(base.string() + "_forward.json", row.forward_certificate);
        save_json_file(base.string() + "_backward.json", row.backward_certificate);
      }
    }
    for (const auto& row : report.rows)
      if (!row.error.empty()) std::cerr << "step " << row.step << ": " << row.error << '\n';
    return report.all_ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "eqgh: " << e.what() << '\n';
    return 1;
  }
}
