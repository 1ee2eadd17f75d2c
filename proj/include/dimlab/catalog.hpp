#pragma once

#include <string>
#include <vector>

#include "dimlab/ifs.hpp"
#include <json.hpp>

namespace dimlab {

namespace catalog {

// [0,1]^2 as four maps of ratio 1/2.
Ifs unit_square();
// Three maps of ratio 1/2 at the vertices of an equilateral triangle.
Ifs sierpinski_triangle();
// Eight maps of ratio 1/3, middle cell removed.
Ifs sierpinski_carpet();
// m = 3, r = 1/2, common rotation theta = 1.0 rad.
Ifs rotational();
// (x/3, y/3), (x/3 + 2/3, y/3), (x/3, y/3 + 2/3).
Ifs one_dim_sierpinski();
// Middle-thirds Cantor set times [0,1].
Ifs cantor_product();
// m = 3, r = 1/2, theta = 1.0, all translations zero (b = 0).
Ifs degenerate_rotational();

std::vector<std::string> names();
Ifs by_name(const std::string& name);

}  // namespace catalog

nlohmann::json ifs_to_json(const Ifs& ifs);
Ifs ifs_from_json(const nlohmann::json& j);

// Reads a file path, or "catalog:<name>" for a built-in example.
Ifs load_ifs(const std::string& source);
void save_ifs(const Ifs& ifs, const std::string& path);

}  // namespace dimlab
