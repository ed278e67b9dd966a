#include "siflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "siflab/error.hpp"
#include "siflab/quadrature.hpp"

namespace siflab {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotReentrant: return "NotReentrant";
    case ErrorCode::MultipleReentrant: return "MultipleReentrant";
    case ErrorCode::DegenerateEdge: return "DegenerateEdge";
    case ErrorCode::UnsupportedPolygon: return "UnsupportedPolygon";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonConforming: return "NonConforming";
    case ErrorCode::NegativeArea: return "NegativeArea";
    case ErrorCode::UntaggedBoundaryEdge: return "UntaggedBoundaryEdge";
    case ErrorCode::NoRootInBracket: return "NoRootInBracket";
    case ErrorCode::MultipleRootsInBracket: return "MultipleRootsInBracket";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
    case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::GammaNearZero: return "GammaNearZero";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::MissingEdgeData: return "MissingEdgeData";
    case ErrorCode::InconsistentEdgeData: return "InconsistentEdgeData";
    case ErrorCode::SolverBreakdown: return "SolverBreakdown";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::CornerDataNonzero: return "CornerDataNonzero";
    case ErrorCode::ZetaCornerNonzero: return "ZetaCornerNonzero";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::EvalDomainError: return "EvalDomainError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

double CornerFrame::theta_of(double x, double y) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double lo = bisector() - std::numbers::pi;
  double th = std::atan2(y, x);
  while (th < lo) th += two_pi;
  while (th >= lo + two_pi) th -= two_pi;
  return th;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

CornerPolygon build_polygon(std::vector<Vec2> vertices, int corner_index) {
  const int n = static_cast<int>(vertices.size());
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "polygon needs at least 3 vertices");
  if (corner_index < 0 || corner_index >= n)
    throw Error(ErrorCode::InvalidArgument, "corner index out of range");
  if (vertices[corner_index].norm() > 1e-14)
    throw Error(ErrorCode::InvalidArgument, "corner vertex must be at the origin");
  vertices[corner_index] = Vec2::Zero();

  std::rotate(vertices.begin(), vertices.begin() + corner_index, vertices.end());
  double signed_area = 0.0;
  for (int k = 0; k < n; ++k) signed_area += cross(vertices[k], vertices[(k + 1) % n]);
  signed_area *= 0.5;
  if (signed_area < 0) {
    std::reverse(vertices.begin() + 1, vertices.end());
    signed_area = -signed_area;
  }

  for (int k = 0; k < n; ++k) {
    if ((vertices[(k + 1) % n] - vertices[k]).norm() == 0.0) {
      std::ostringstream os;
      os << "edge " << k + 1 << " has zero length";
      throw Error(ErrorCode::DegenerateEdge, os.str());
    }
  }

  auto is_reflex = [&](int k) {
    const Vec2& prev = vertices[(k + n - 1) % n];
    const Vec2& cur = vertices[k];
    const Vec2& next = vertices[(k + 1) % n];
    return cross(cur - prev, next - cur) < 0.0;
  };
  if (!is_reflex(0)) throw Error(ErrorCode::NotReentrant, "interior angle at the corner is <= pi");
  for (int k = 1; k < n; ++k)
    if (is_reflex(k)) throw Error(ErrorCode::MultipleReentrant, "more than one re-entrant vertex");

  CornerPolygon p;
  p.vertices_ = vertices;
  p.area_ = signed_area;
  for (int k = 0; k < n; ++k) {
    PolygonEdge e;
    e.a = vertices[k];
    e.b = vertices[(k + 1) % n];
    Vec2 d = e.b - e.a;
    e.length = d.norm();
    e.normal = Vec2(d.y(), -d.x()) / e.length;
    p.edges_.push_back(e);
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w1 = std::atan2(vertices[1].y(), vertices[1].x());
  double wj = std::atan2(vertices[n - 1].y(), vertices[n - 1].x());
  double omega = std::fmod(wj - w1 + 2.0 * two_pi, two_pi);
  p.frame_.omega1 = w1;
  p.frame_.omega2 = w1 + omega;
  return p;
}

CornerPolygon lshape_polygon(double size) {
  return build_polygon({{0, 0}, {size, 0}, {size, size}, {-size, size}, {-size, -size}, {0, -size}},
                       0);
}

double CornerPolygon::perimeter() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

double CornerPolygon::far_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 2; j < edge_count(); ++j) {
    const PolygonEdge& e = edge(j);
    Vec2 d = e.b - e.a;
    double s = std::clamp(-e.a.dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, e.point(s).norm());
  }
  return best;
}

bool CornerPolygon::point_inside(const Vec2& p) const {
  bool inside = false;
  const int n = edge_count();
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

double edge_flux(const CornerPolygon& polygon, const BoundaryData& data, int j) {
  const PolygonEdge& e = polygon.edge(j);
  const VectorField& g = data.g.at(j - 1);
  Rule1D q = composite_gauss(0.0, 1.0, 8, 12);
  double s = 0.0;
  for (size_t k = 0; k < q.x.size(); ++k) s += q.w[k] * g(e.point(q.x[k])).dot(e.normal);
  return s * e.length;
}

BoundaryReport validate_boundary_data(const CornerPolygon& polygon, const BoundaryData& data,
                                      double tol) {
  BoundaryReport rep;
  const int J = polygon.edge_count();
  if (static_cast<int>(data.g.size()) != J)
    throw Error(ErrorCode::MissingEdgeData, "boundary data must give one field per edge");
  double flux = 0.0;
  for (int j = 1; j <= J; ++j) flux += edge_flux(polygon, data, j);
  rep.flux_defect = std::abs(flux);
  for (int j = 1; j <= J; ++j) {
    int next = j % J + 1;
    Vec2 s = polygon.edge(j).b;
    double mismatch = (data.g[j - 1](s) - data.g[next - 1](s)).norm();
    rep.max_vertex_mismatch = std::max(rep.max_vertex_mismatch, mismatch);
  }
  rep.corner_value_first = data.g.front()(Vec2::Zero()).norm();
  rep.corner_value_last = data.g.back()(Vec2::Zero()).norm();
  rep.corner_vanishes = rep.corner_value_first <= tol && rep.corner_value_last <= tol;
  rep.ok = rep.corner_vanishes && rep.max_vertex_mismatch <= tol;
  return rep;
}

}  // namespace siflab
