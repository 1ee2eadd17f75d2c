#include "dimlab/catalog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dimlab {
namespace catalog {
namespace {

Ifs homotheties(double r, const std::vector<Vec>& translations, Separation sep,
                const std::string& name) {
  std::vector<Similarity> maps;
  for (const auto& a : translations) maps.emplace_back(r, 0.0, a);
  return Ifs(std::move(maps), 2, sep, name);
}

Ifs rotational_with(const std::vector<Vec>& translations, const std::string& name) {
  std::vector<Similarity> maps;
  for (const auto& a : translations) maps.emplace_back(0.5, 1.0, a);
  Ifs ifs(std::move(maps), 2, Separation::Unverified, name);
  ifs.dense_rotations = true;
  return ifs;
}

}  // namespace

Ifs unit_square() {
  Ifs ifs = homotheties(0.5, {{0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5}}, Separation::OscAssumed,
                        "unit-square");
  ifs.projection_hull_condition = true;
  ifs.dense_rotations = false;
  return ifs;
}

Ifs sierpinski_triangle() {
  Ifs ifs = homotheties(0.5, {{0, 0}, {0.5, 0}, {0.25, std::sqrt(3.0) / 4.0}},
                        Separation::OscAssumed, "sierpinski-triangle");
  ifs.projection_hull_condition = true;
  ifs.dense_rotations = false;
  return ifs;
}

Ifs sierpinski_carpet() {
  std::vector<Vec> t;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      if (i == 1 && j == 1) continue;
      t.push_back(Vec{i / 3.0, j / 3.0});
    }
  }
  Ifs ifs = homotheties(1.0 / 3.0, t, Separation::OscAssumed, "sierpinski-carpet");
  ifs.projection_hull_condition = true;
  ifs.dense_rotations = false;
  return ifs;
}

Ifs rotational() {
  return rotational_with({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}}, "rotational");
}

Ifs one_dim_sierpinski() {
  Ifs ifs = homotheties(1.0 / 3.0, {{0, 0}, {2.0 / 3.0, 0}, {0, 2.0 / 3.0}},
                        Separation::SscVerified, "one-dim-sierpinski");
  ifs.projection_hull_condition = false;
  ifs.dense_rotations = false;
  return ifs;
}

Ifs cantor_product() {
  std::vector<Vec> t;
  for (double y : {0.0, 1.0 / 3.0, 2.0 / 3.0}) {
    for (double x : {0.0, 2.0 / 3.0}) t.push_back(Vec{x, y});
  }
  Ifs ifs = homotheties(1.0 / 3.0, t, Separation::OscAssumed, "cantor-product");
  ifs.projection_hull_condition = false;
  ifs.dense_rotations = false;
  return ifs;
}

Ifs degenerate_rotational() {
  return rotational_with({{0, 0}, {0, 0}, {0, 0}}, "degenerate-rotational");
}

std::vector<std::string> names() {
  return {"unit-square",        "sierpinski-triangle", "sierpinski-carpet",    "rotational",
          "one-dim-sierpinski", "cantor-product",      "degenerate-rotational"};
}

Ifs by_name(const std::string& name) {
  if (name == "unit-square") return unit_square();
  if (name == "sierpinski-triangle") return sierpinski_triangle();
  if (name == "sierpinski-carpet") return sierpinski_carpet();
  if (name == "rotational") return rotational();
  if (name == "one-dim-sierpinski") return one_dim_sierpinski();
  if (name == "cantor-product") return cantor_product();
  if (name == "degenerate-rotational") return degenerate_rotational();
  throw Error(ErrorCode::InvalidArgument, "unknown catalog entry '" + name + "'");
}

}  // namespace catalog

nlohmann::json ifs_to_json(const Ifs& ifs) {
  nlohmann::json j;
  j["name"] = ifs.name();
  j["ambient_dim"] = ifs.ambient_dim();
  j["separation"] = to_string(ifs.separation());
  auto& maps = j["maps"] = nlohmann::json::array();
  for (const auto& f : ifs.maps()) {
    nlohmann::json t = nlohmann::json::array();
    for (int i = 0; i < ifs.ambient_dim(); ++i) t.push_back(f.translation()[i]);
    maps.push_back({{"ratio", f.ratio()}, {"angle", f.angle()}, {"translation", t}});
  }
  if (!ifs.labels.empty()) j["labels"] = ifs.labels;
  if (ifs.projection_hull_condition) j["projection_hull_condition"] = *ifs.projection_hull_condition;
  if (ifs.dense_rotations) j["dense_rotations"] = *ifs.dense_rotations;
  return j;
}

Ifs ifs_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::Validation, what); };
  if (!j.is_object()) bad("IFS document must be an object");
  if (!j.contains("maps") || !j["maps"].is_array()) bad("maps: expected a list");
  const int dim = j.value("ambient_dim", 2);
  std::vector<Similarity> maps;
  for (std::size_t i = 0; i < j["maps"].size(); ++i) {
    const auto& m = j["maps"][i];
    const std::string path = "maps[" + std::to_string(i) + "]";
    if (!m.is_object() || !m.contains("ratio") || !m["ratio"].is_number()) {
      bad(path + ".ratio: expected a number");
    }
    const double angle = m.value("angle", 0.0);
    Vec a;
    if (m.contains("translation")) {
      const auto& t = m["translation"];
      if (!t.is_array() || static_cast<int>(t.size()) != dim) {
        bad(path + ".translation: expected " + std::to_string(dim) + " numbers");
      }
      for (int k = 0; k < dim; ++k) {
        if (!t[static_cast<std::size_t>(k)].is_number()) bad(path + ".translation: not a number");
        a[k] = t[static_cast<std::size_t>(k)].get<double>();
      }
    }
    try {
      maps.emplace_back(m["ratio"].get<double>(), angle, a);
    } catch (const Error& e) {
      bad(path + ": " + e.what());
    }
  }
  const Separation sep = separation_from_string(j.value("separation", std::string("unverified")));
  Ifs ifs(std::move(maps), dim, sep, j.value("name", std::string()));
  if (j.contains("labels")) ifs.labels = j["labels"].get<std::vector<std::string>>();
  if (j.contains("projection_hull_condition")) {
    ifs.projection_hull_condition = j["projection_hull_condition"].get<bool>();
  }
  if (j.contains("dense_rotations")) ifs.dense_rotations = j["dense_rotations"].get<bool>();
  return ifs;
}

Ifs load_ifs(const std::string& source) {
  constexpr std::string_view prefix = "catalog:";
  if (source.rfind(prefix, 0) == 0) return catalog::by_name(source.substr(prefix.size()));
  std::ifstream in(source);
  if (!in) throw Error(ErrorCode::Io, "cannot read IFS file '" + source + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Validation, source + ": " + e.what());
  }
  return ifs_from_json(j);
}

void save_ifs(const Ifs& ifs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << ifs_to_json(ifs).dump(2) << '\n';
}

}  // namespace dimlab
