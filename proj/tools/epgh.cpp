// epgh: equivariant pointed GH distance between two actions.
#include <CLI11.hpp>

#include <iostream>

#include "eqgh/epgh.hpp"
#include "eqgh/json_io.hpp"

int main(int argc, char** argv) {
  using namespace eqgh;
  CLI::App app{"Equivariant pointed Gromov-Hausdorff distance between finite actions"};
  app.require_subcommand(1);

  auto* dist = app.add_subcommand("dist", "smallest grid epsilon with approximations both ways");
  std::string a_path, b_path, cert_path;
  std::size_t max_size = 0;
  dist->add_option("A", a_path, "first action (JSON)")->required()->check(CLI::ExistingFile);
  dist->add_option("B", b_path, "second action (JSON)")->required()->check(CLI::ExistingFile);
  dist->add_option("--max-size", max_size, "instance-size guard for points and group elements");
  dist->add_option("--emit-certificate", cert_path, "write both certificates to this file");

  auto* verify = app.add_subcommand("verify", "re-verify a certificate file");
  std::string verify_path;
  verify->add_option("certificate", verify_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dist) {
      const auto a = action_from_json(load_json_file(a_path));
      const auto b = action_from_json(load_json_file(b_path));
      SearchOptions opt;
      if (max_size > 0) opt.bounds.epgh_points = opt.bounds.epgh_group = max_size;
      const auto d = epgh_distance_with_certificates(a, b, opt);
      const auto fwd = certificate_json(a, b, d.forward);
      const auto bwd = certificate_json(b, a, d.backward);
      json out = {{"epsilon", d.epsilon},
                  {"forward_pass", fwd["report"]["pass"]},
                  {"backward_pass", bwd["report"]["pass"]}};
      if (!cert_path.empty()) save_json_file(cert_path, {{"forward", fwd}, {"backward", bwd}});
      std::cout << out.dump(2) << '\n';
    } else {
      const auto j = load_json_file(verify_path);
      json out = json::object();
      if (j.contains("forward")) {
        out["forward"] = to_json(reverify_certificate(j.at("forward")));
        out["backward"] = to_json(reverify_certificate(j.at("backward")));
      } else {
        out = to_json(reverify_certificate(j));
      }
      std::cout << out.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "epgh: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
