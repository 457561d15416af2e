// lie: centers of mass on SO(n) and the continuify pipeline.
#include <CLI11.hpp>

#include <cmath>
#include <iostream>

#include "eqgh/json_io.hpp"
#include "eqgh/rotation.hpp"

int main(int argc, char** argv) {
  using namespace eqgh;
  CLI::App app{"Center-of-mass numerics on SO(n)"};
  app.require_subcommand(1);
  ComConfig cfg;

  auto* mean = app.add_subcommand("mean", "weighted center of mass");
  std::string points_path, weights_path;
  mean->add_option("points", points_path, "array of rotations")->required()->check(CLI::ExistingFile);
  mean->add_option("weights", weights_path, "array of weights summing to 1")->required()->check(CLI::ExistingFile);
  mean->add_option("--r-conv", cfg.r_conv, "trust radius r");
  mean->add_option("--N", cfg.N_max, "N in K = 1 + R + ... + R^N");

  auto* cont = app.add_subcommand("continuify", "continuous replacement of a sampled map");
  std::string psi_path;
  double nu = 0.0, eta = 0.0;
  int n_override = -1;
  cont->add_option("psi", psi_path, "{source: [rot], image: [rot], target_net?: [rot]}")
      ->required()
      ->check(CLI::ExistingFile);
  cont->add_option("--nu", nu)->required()->check(CLI::PositiveNumber);
  cont->add_option("--eta", eta)->required()->check(CLI::PositiveNumber);
  cont->add_option("--r-conv", cfg.r_conv, "trust radius r");
  cont->add_option("--N", n_override, "N (default: measured on the source points)");

  CLI11_PARSE(app, argc, argv);

  try {
    json out;
    if (*mean) {
      const auto pts = rotations_from_json(load_json_file(points_path));
      const auto w = load_json_file(weights_path).get<std::vector<double>>();
      const auto m = karcher_mean_detailed(pts, w, cfg);
      out = {{"mean", to_json(m.mean)}, {"iterations", m.iterations}, {"gradient_norm", m.gradient_norm}};
    } else {
      const auto j = load_json_file(psi_path);
      RotationMap psi{rotations_from_json(j.at("source")), rotations_from_json(j.at("image"))};
      std::vector<RotationElement> target;
      if (j.contains("target_net")) {
        target = rotations_from_json(j.at("target_net"));
      } else if (!psi.image.empty() && psi.image[0].n() == 2) {
        target = so2_grid(static_cast<std::size_t>(std::floor(2.0 / eta)));
      } else {
        throw std::invalid_argument("continuify: target_net is required unless the target is SO(2)");
      }
      cfg.N_max = 1;
      auto rep = continuify(psi, nu, eta, cfg, target);
      cfg.N_max = n_override >= 0 ? n_override : std::max(1, partition_multiplicity(rep.partition(), psi.source));
      rep = continuify(psi, nu, eta, cfg, target);
      json values = json::array();
      double worst = 0.0;
      for (std::size_t i = 0; i < psi.source.size(); ++i) {
        const auto v = rep(psi.source[i]);
        worst = std::max(worst, distance(v, psi.image[i]));
        values.push_back(to_json(v));
      }
      out = {{"nu", nu},
             {"eta", eta},
             {"N", cfg.N_max},
             {"K", cfg.K()},
             {"deviation_bound", rep.deviation_bound()},
             {"max_deviation_on_source", worst},
             {"net", rep.net_indices()},
             {"alpha", rep.alpha()},
             {"values", values}};
    }
    std::cout << out.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "lie: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
