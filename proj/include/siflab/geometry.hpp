#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace siflab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline Vec2 e_r(double th) { return {std::cos(th), std::sin(th)}; }
inline Vec2 e_theta(double th) { return {-std::sin(th), std::cos(th)}; }

// Polar frame of the re-entrant corner. Angles are measured so that the
// sector is [omega1, omega2]; the theta branch cut sits on the ray opposite
// the bisector, which is always outside the sector.
struct CornerFrame {
  double omega1 = 0.0;
  double omega2 = 0.0;

  double omega() const { return omega2 - omega1; }
  double bisector() const { return 0.5 * (omega1 + omega2); }
  double theta_of(double x, double y) const;
  double theta_of(const Vec2& p) const { return theta_of(p.x(), p.y()); }
};

struct PolygonEdge {
  Vec2 a;
  Vec2 b;
  Vec2 normal;
  double length = 0.0;
  Vec2 point(double s) const { return a + s * (b - a); }
};

class CornerPolygon {
 public:
  // Vertices S_1..S_J in counterclockwise order with S_1 = origin.
  const std::vector<Vec2>& vertices() const { return vertices_; }
  int edge_count() const { return static_cast<int>(vertices_.size()); }
  // Edge Gamma_j, j = 1..J, runs from S_j to S_{j+1}.
  const PolygonEdge& edge(int j) const { return edges_.at(j - 1); }
  const CornerFrame& frame() const { return frame_; }
  double area() const { return area_; }
  double perimeter() const;
  // Distance from the corner to the nearest far edge (j = 2..J-1).
  double far_distance() const;
  bool point_inside(const Vec2& p) const;

  friend CornerPolygon build_polygon(std::vector<Vec2> vertices, int corner_index);

 private:
  std::vector<Vec2> vertices_;
  std::vector<PolygonEdge> edges_;
  CornerFrame frame_;
  double area_ = 0.0;
};

CornerPolygon build_polygon(std::vector<Vec2> vertices, int corner_index);

// Default benchmark: L-shape covering quadrants 1 to 3, scaled by `size`.
CornerPolygon lshape_polygon(double size = 1.0);

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;

struct BoundaryData {
  // g[j-1] is the Dirichlet data on Gamma_j.
  std::vector<VectorField> g;
  std::optional<ScalarField> zeta;
};

struct BoundaryReport {
  double flux_defect = 0.0;
  double max_vertex_mismatch = 0.0;
  double corner_value_first = 0.0;
  double corner_value_last = 0.0;
  bool corner_vanishes = false;
  bool ok = false;
};

BoundaryReport validate_boundary_data(const CornerPolygon& polygon, const BoundaryData& data,
                                      double tol = 1e-10);

// Integral of g_j . n_j over each edge by composite Gauss rule.
double edge_flux(const CornerPolygon& polygon, const BoundaryData& data, int j);

}  // namespace siflab
