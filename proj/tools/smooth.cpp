// smooth: snap an almost homomorphism to an exact one.
#include <CLI11.hpp>

#include <iostream>

#include "eqgh/json_io.hpp"
#include "eqgh/smoothing.hpp"

int main(int argc, char** argv) {
  using namespace eqgh;
  CLI::App app{"Almost-homomorphism defect and snapping"};
  app.require_subcommand(1);

  auto* snap = app.add_subcommand("snap", "nearest exact homomorphism");
  std::string psi_path, source_path, target;
  SnapOptions opt;
  double scale = 1.0;
  snap->add_option("psi", psi_path, "{images: [int] | [rotation]}")->required()->check(CLI::ExistingFile);
  snap->add_option("--source", source_path, "source group (JSON)")->required()->check(CLI::ExistingFile);
  snap->add_option("--target", target, "group.json, so2 or so3")->required();
  snap->add_option("--q-max", opt.q_max, "largest defect accepted");
  snap->add_option("--scale", scale, "discrete metric scale for finite targets");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto src = group_from_json(load_json_file(source_path));
    const auto images = load_json_file(psi_path).at("images");
    json out;
    if (target == "so2" || target == "so3") {
      const auto map = rotations_from_json(images);
      const auto r = target == "so2" ? snap_to_so2(src, map, opt) : snap_to_so3(src, map, opt);
      out = to_json(r);
      out["kernel"] = kernel(r.hom).kernel.embedding;
      out["defect"] = to_json(homomorphism_defect(src, map));
    } else {
      const auto dst = group_from_json(load_json_file(target));
      const auto map = images.get<std::vector<Element>>();
      const auto dist = discrete_distance(scale);
      const auto r = snap_to_homomorphism(src, dst, map, dist, opt);
      const auto mono = check_monomorphism(r.hom);
      out = to_json(r);
      out["kernel"] = kernel(r.hom).kernel.embedding;
      out["injective"] = mono.injective;
      out["defect"] = to_json(homomorphism_defect(src, dst, map, dist));
    }
    std::cout << out.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "smooth: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
