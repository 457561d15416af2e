// actiongeo: action seminorms and minimal nets.
#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "eqgh/action_geometry.hpp"
#include "eqgh/json_io.hpp"

int main(int argc, char** argv) {
  using namespace eqgh;
  CLI::App app{"Geometry of a finite group action"};
  app.require_subcommand(1);

  auto* sn = app.add_subcommand("seminorm", "||g||_R for one or all elements, plus the metric regime");
  std::string action_path;
  double R = 0.0;
  std::optional<std::size_t> element;
  sn->add_option("action", action_path)->required()->check(CLI::ExistingFile);
  sn->add_option("--R", R, "ball radius")->required()->check(CLI::PositiveNumber);
  sn->add_option("--element", element, "only this element");

  auto* nt = app.add_subcommand("net", "greedy minimal mu-net");
  std::string space_path;
  double mu = 0.0;
  nt->add_option("space", space_path)->required()->check(CLI::ExistingFile);
  nt->add_option("--mu", mu)->required()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    json out;
    if (*sn) {
      const auto a = action_from_json(load_json_file(action_path));
      if (element) {
        if (*element >= a.group().order()) throw std::out_of_range("element out of range");
        out = {{"R", R}, {"element", *element}, {"seminorm", action_seminorm(a, *element, R)}};
      } else {
        const auto t = seminorm_table(a, R);
        const auto reg = metric_regime(a, R);
        out = {{"R", R},
               {"values", t.values},
               {"separates", reg.separates},
               {"triangle", reg.triangle},
               {"separation_witness", reg.separation_witness ? json(*reg.separation_witness) : json(nullptr)},
               {"triangle_witness", reg.triangle_witness ? json(*reg.triangle_witness) : json(nullptr)},
               {"submultiplicative_failure",
                reg.submultiplicative_failure ? json(*reg.submultiplicative_failure) : json(nullptr)},
               {"subadditive_failure", reg.subadditive_failure ? json(*reg.subadditive_failure) : json(nullptr)}};
      }
    } else {
      const auto s = space_from_json(load_json_file(space_path));
      const auto net = minimal_net(s, mu);
      out = {{"mu", mu},
             {"members", net.members},
             {"covers", net_covers(s, net)},
             {"separated", net_separated(s, net)},
             {"covering_multiplicity", covering_multiplicity(s, net)}};
    }
    std::cout << out.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "actiongeo: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
