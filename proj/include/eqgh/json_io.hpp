#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqgh/epgh.hpp"
#include "eqgh/groups.hpp"
#include "eqgh/metric_space.hpp"
#include "eqgh/rotation.hpp"
#include "eqgh/smoothing.hpp"

namespace eqgh {

using nlohmann::json;

class JsonFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

template <typename T>
T field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw JsonFormatError(std::string(what) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw JsonFormatError(std::string(what) + ": bad \"" + key + "\": " + e.what());
  }
}

}  // namespace detail

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw JsonFormatError(path + ": " + e.what());
  }
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

// { "n": int, "basepoint": int, "dist": [[real]] }
inline json to_json(const FiniteMetricSpace& s) {
  return {{"n", s.size()}, {"basepoint", s.basepoint()}, {"dist", s.matrix()}};
}

inline FiniteMetricSpace space_from_json(const json& j) {
  const auto n = detail::field<std::size_t>(j, "n", "space");
  const auto d = detail::field<DistanceMatrix>(j, "dist", "space");
  if (d.size() != n) throw JsonFormatError("space: \"n\" does not match the number of rows");
  return validate_space(d, detail::field<PointIndex>(j, "basepoint", "space"));
}

// { "order": int, "cayley": [[int]] }
inline json to_json(const FiniteGroup& g) { return {{"order", g.order()}, {"cayley", g.table()}}; }

inline FiniteGroup group_from_json(const json& j) {
  const auto n = detail::field<std::size_t>(j, "order", "group");
  const auto t = detail::field<CayleyTable>(j, "cayley", "group");
  if (t.size() != n) throw JsonFormatError("group: \"order\" does not match the table");
  return validate_group(t);
}

// { "group": <group>, "space": <space>, "perm": [[int]] }
inline json to_json(const GroupAction& a) {
  return {{"group", to_json(a.group())}, {"space", to_json(a.space())}, {"perm", a.perms()}};
}

inline GroupAction action_from_json(const json& j) {
  return validate_action(group_from_json(detail::field<json>(j, "group", "action")),
                         space_from_json(detail::field<json>(j, "space", "action")),
                         detail::field<std::vector<Permutation>>(j, "perm", "action"));
}

// { "n": int, "matrix": [[real]] }
inline json to_json(const RotationElement& r) {
  std::vector<std::vector<double>> rows(r.n(), std::vector<double>(r.n()));
  for (std::size_t i = 0; i < r.n(); ++i)
    for (std::size_t k = 0; k < r.n(); ++k)
      rows[i][k] = r.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  return {{"n", r.n()}, {"matrix", rows}};
}

inline RotationElement rotation_from_json(const json& j) {
  const auto n = detail::field<std::size_t>(j, "n", "rotation");
  const auto rows = detail::field<std::vector<std::vector<double>>>(j, "matrix", "rotation");
  if (rows.size() != n) throw JsonFormatError("rotation: \"n\" does not match the matrix");
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw JsonFormatError("rotation: matrix is not square");
    for (std::size_t k = 0; k < n; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return RotationElement::from_matrix(std::move(m));
}

inline std::vector<RotationElement> rotations_from_json(const json& j) {
  if (!j.is_array()) throw JsonFormatError("expected an array of rotations");
  std::vector<RotationElement> out;
  for (const auto& r : j) out.push_back(rotation_from_json(r));
  return out;
}

inline json to_json(const std::vector<RotationElement>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(to_json(r));
  return out;
}

// Triples serialize their maps as [key, value] pairs in key order.
inline json to_json(const ApproximationTriple& t) {
  auto pairs = [](const auto& m) {
    json a = json::array();
    for (const auto& [k, v] : m) a.push_back({k, v});
    return a;
  };
  return {{"epsilon", t.epsilon}, {"f", pairs(t.f)}, {"phi", pairs(t.phi)}, {"psi", pairs(t.psi)}};
}

inline ApproximationTriple triple_from_json(const json& j) {
  ApproximationTriple t;
  t.epsilon = detail::field<double>(j, "epsilon", "triple");
  auto read = [&](const char* key, auto& m) {
    for (const auto& kv : detail::field<std::vector<std::pair<std::size_t, std::size_t>>>(j, key, "triple"))
      if (!m.emplace(kv.first, kv.second).second) throw JsonFormatError(std::string("triple: duplicate key in ") + key);
  };
  read("f", t.f);
  read("phi", t.phi);
  read("psi", t.psi);
  return t;
}

inline json to_json(const CertificateReport& r) {
  json conds = json::array();
  for (std::size_t i = 0; i < r.conditions.size(); ++i)
    conds.push_back({{"condition", i + 1},
                     {"pass", r.conditions[i].pass},
                     {"measured", r.conditions[i].measured},
                     {"witness", r.conditions[i].witness}});
  return {{"epsilon", r.epsilon},
          {"pass", r.pass()},
          {"worst_slack", r.worst_slack},
          {"condition2_uses_image", r.condition2_uses_image},
          {"conditions", conds}};
}

/// A self-contained certificate: both actions, the triple and its report.
inline json certificate_json(const GroupAction& src, const GroupAction& dst, const ApproximationTriple& t) {
  return {{"source", to_json(src)},
          {"target", to_json(dst)},
          {"triple", to_json(t)},
          {"report", to_json(verify_approximation(src, dst, t))}};
}

/// Re-verifies a certificate produced by certificate_json.
inline CertificateReport reverify_certificate(const json& cert) {
  return verify_approximation(action_from_json(detail::field<json>(cert, "source", "certificate")),
                              action_from_json(detail::field<json>(cert, "target", "certificate")),
                              triple_from_json(detail::field<json>(cert, "triple", "certificate")));
}

inline json to_json(const DefectReport& d) { return {{"q", d.q}, {"witness", {d.witness.first, d.witness.second}}}; }

inline json to_json(const SnapResult<FiniteHomomorphism>& s) {
  return {{"hom", s.hom.image}, {"displacement", s.displacement}, {"q", s.q}, {"bound_check", s.bound_check}};
}

inline json to_json(const SnapResult<RotationHomomorphism>& s) {
  return {{"hom", to_json(s.hom.image)},
          {"displacement", s.displacement},
          {"q", s.q},
          {"bound_check", s.bound_check}};
}

}  // namespace eqgh
