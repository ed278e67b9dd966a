#pragma once

#include <array>
#include <string>
#include <vector>

#include "siflab/geometry.hpp"

namespace siflab {

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int tag = 0;  // 1-based edge index Gamma_tag
};

struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;  // counterclockwise
  std::vector<BoundaryEdge> bedges;
  double grading_ratio = 0.0;
  int grading_levels = 0;
  std::string id;

  double tri_area(int k) const;
  double total_area() const;
  // Longest edge of triangle k.
  double diameter(int k) const;
};

// Checks positive areas, conformity and boundary tagging. With a polygon,
// also checks that tags match polygon edges and that the tagged edges cover
// the boundary.
void validate_mesh(const TriMesh& mesh, const CornerPolygon* polygon = nullptr);

// Structured mesh of an axis-aligned polygon whose vertices sit on the h-grid,
// refined by newest-vertex bisection toward the origin.
TriMesh generate_lshape_mesh(const CornerPolygon& polygon, double h, double grading_ratio,
                             int levels);

// Structured mesh of [x0,x1]x[y0,y1]; tags 1..4 = bottom, right, top, left.
TriMesh generate_rectangle_mesh(double x0, double y0, double x1, double y1, int nx, int ny);

TriMesh load_mesh(const std::string& text, const CornerPolygon* polygon = nullptr);
std::string serialize_mesh(const TriMesh& mesh);

}  // namespace siflab
