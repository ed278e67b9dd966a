#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "siflab/field_expr.hpp"
#include "siflab/mesh.hpp"
#include "siflab/spectral.hpp"

namespace siflab {

struct RunConfig {
  // [domain]
  std::string shape = "lshape";  // lshape | polygon
  double size = 1.0;
  std::vector<Vec2> vertices;  // for shape = polygon
  int corner = 0;
  std::string mesh_file;       // required for non axis-aligned polygons
  // [mesh]
  double h = 0.05;
  double grading_ratio = 0.5;
  int grading_levels = 6;
  // [material]
  double mu = 1.0;
  double eps = 1e-3;
  std::vector<double> eps_grid;
  double eps_floor = 1e-5;
  // [data]
  std::string f_x = "0", f_y = "0", zeta;
  std::map<int, std::pair<std::string, std::string>> g;  // edge -> (x, y) expressions
  // derivative cross-checks: name -> (expr, d/dx, d/dy)
  std::map<std::string, std::array<std::string, 3>> checks;
  // [manufactured]
  std::string manufactured_case = "penalized";
  double c1 = 0.7, c2 = -0.3;
  std::vector<double> h_levels;
  // [solver]
  double tol = 1e-10;
  int max_iter = 1;
  // [output]
  std::string out_path = "-";
  std::string format = "csv";
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

CornerPolygon config_polygon(const RunConfig& cfg);
TriMesh config_mesh(const RunConfig& cfg, const CornerPolygon& polygon);

struct ConfigFields {
  VectorField f;
  ScalarField zeta;
  std::vector<VectorField> g;
};
// Parses every data expression (ConfigError on failure) and runs the
// derivative cross-checks at 20 random interior points.
ConfigFields config_fields(const RunConfig& cfg, const CornerPolygon& polygon);

}  // namespace siflab
