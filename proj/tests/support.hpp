#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "siflab/fem.hpp"
#include "siflab/geometry.hpp"
#include "siflab/mesh.hpp"
#include "siflab/modes.hpp"
#include "siflab/quadrature.hpp"

namespace testing {

using siflab::Vec2;

// Romberg on composite midpoint sums; n0 panels at the coarsest level.
inline double midpoint_romberg(const std::function<double(double)>& f, double a, double b, int n0,
                               int levels = 3) {
  std::vector<double> m;
  for (int l = 0; l < levels; ++l) {
    const int n = n0 << l;
    const double h = (b - a) / n;
    double s = 0;
    for (int k = 0; k < n; ++k) s += f(a + (k + 0.5) * h);
    m.push_back(s * h);
  }
  for (int j = 1; j < levels; ++j) {
    const double fac = std::pow(4.0, j);
    for (int l = levels - 1; l >= j; --l) m[l] = (fac * m[l] - m[l - 1]) / (fac - 1);
  }
  return m.back();
}

// Fan triangulation of a star-shaped polygon around the origin followed by
// uniform red refinement.
inline siflab::TriMesh fan_mesh(const siflab::CornerPolygon& poly, int refinements) {
  siflab::TriMesh m;
  const auto& v = poly.vertices();
  const int J = static_cast<int>(v.size());
  m.nodes = v;
  for (int j = 1; j + 1 < J; ++j) m.tris.push_back({0, j, j + 1});
  for (int j = 0; j < J; ++j) m.bedges.push_back({j, (j + 1) % J, j + 1});
  for (int r = 0; r < refinements; ++r) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.nodes.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
      const int id = static_cast<int>(m.nodes.size()) - 1;
      mid[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> tris;
    for (auto t : m.tris) {
      int a = midpoint(t[1], t[2]), b = midpoint(t[0], t[2]), c = midpoint(t[0], t[1]);
      tris.push_back({t[0], c, b});
      tris.push_back({c, t[1], a});
      tris.push_back({b, a, t[2]});
      tris.push_back({a, b, c});
    }
    std::vector<siflab::BoundaryEdge> be;
    for (auto e : m.bedges) {
      int c = midpoint(e.a, e.b);
      be.push_back({e.a, c, e.tag});
      be.push_back({c, e.b, e.tag});
    }
    m.tris = tris;
    m.bedges = be;
  }
  m.id = "fan";
  return m;
}

// Brute-force point location with a bucket grid.
class Locator {
 public:
  explicit Locator(const siflab::Discretization& d, int buckets = 64) : d_(d), nb_(buckets) {
    lo_ = hi_ = d.mesh().nodes[0];
    for (const auto& p : d.mesh().nodes) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    hi_ += Vec2(1e-9, 1e-9);
    grid_.resize(nb_ * nb_);
    for (int e = 0; e < d.n_elements(); ++e) {
      auto g = d.geometry(e);
      Vec2 a = g.v[0].cwiseMin(g.v[1]).cwiseMin(g.v[2]), b = g.v[0].cwiseMax(g.v[1]).cwiseMax(g.v[2]);
      auto [i0, j0] = cell(a);
      auto [i1, j1] = cell(b);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) grid_[i * nb_ + j].push_back(e);
    }
  }
  // Element and barycentric coordinates of x; element -1 if outside.
  std::pair<int, Eigen::Vector3d> find(const Vec2& x) const {
    auto [i, j] = cell(x);
    int best = -1;
    double best_min = -1e300;
    Eigen::Vector3d bestL;
    for (int e : grid_[i * nb_ + j]) {
      auto g = d_.geometry(e);
      Eigen::Vector3d L;
      for (int k = 0; k < 3; ++k) L[k] = 1.0 / 3.0 + g.grad_bary[k].dot(x - (g.v[0] + g.v[1] + g.v[2]) / 3.0);
      if (L.minCoeff() > best_min) {
        best_min = L.minCoeff();
        best = e;
        bestL = L;
      }
    }
    if (best_min < -1e-10) return {-1, bestL};
    return {best, bestL};
  }

 private:
  std::pair<int, int> cell(const Vec2& x) const {
    auto c = [&](double v, double l, double h) {
      return std::clamp(static_cast<int>((v - l) / (h - l) * nb_), 0, nb_ - 1);
    };
    return {c(x.x(), lo_.x(), hi_.x()), c(x.y(), lo_.y(), hi_.y())};
  }
  const siflab::Discretization& d_;
  int nb_;
  Vec2 lo_, hi_;
  std::vector<std::vector<int>> grid_;
};

// Smooth divergence-free test solution on the unit square: curl of a bubble.
struct SquareStokes {
  static double a(double x) { return x * x * (1 - x) * (1 - x); }
  static double a1(double x) { return 2 * x - 6 * x * x + 4 * x * x * x; }
  static double a2(double x) { return 2 - 12 * x + 12 * x * x; }
  static double a3(double x) { return -12 + 24 * x; }
  static Vec2 u(const Vec2& p) { return {a(p.x()) * a1(p.y()), -a1(p.x()) * a(p.y())}; }
  static siflab::Mat2 grad(const Vec2& p) {
    const double x = p.x(), y = p.y();
    siflab::Mat2 g;
    g << a1(x) * a1(y), a(x) * a2(y), -a2(x) * a(y), -a1(x) * a1(y);
    return g;
  }
  static double p(const Vec2& q) { return q.x() - 0.5; }
  static Vec2 lap(const Vec2& q) {
    const double x = q.x(), y = q.y();
    return {a2(x) * a1(y) + a(x) * a3(y), -(a3(x) * a(y) + a1(x) * a2(y))};
  }
  // -mu lap u + grad p
  static Vec2 f(const Vec2& q, double mu) { return -mu * lap(q) + Vec2(1, 0); }
};

// Finite-difference residual of the governing operator applied to a mode,
// from central differences of the analytic gradient (and pressure), with one
// Richardson step.
struct FdResidual {
  double raw = 0;           // |R(h)|
  double half = 0;          // |R(h/2)|
  double extrapolated = 0;  // |(4 R(h/2) - R(h)) / 3|
  double scale = 0;         // magnitude of the individual derivative terms
};

inline FdResidual mode_residual(const siflab::SingularMode& m, const Vec2& x, double h) {
  using siflab::Mat2;
  const bool stokes = m.family == siflab::Family::Stokes;
  const double visc = m.mu;
  const double grad_div = stokes ? 0.0 : 1.0 / m.eps;  // mu + nu
  auto residual = [&](double step, double& scale) {
    std::array<Mat2, 2> dG;
    Vec2 dp(0, 0);
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e[k] = step;
      dG[k] = (siflab::eval_grad_at(m, x + e) - siflab::eval_grad_at(m, x - e)) / (2 * step);
      if (stokes) dp[k] = (siflab::pressure_at(m, x + e) - siflab::pressure_at(m, x - e)) / (2 * step);
    }
    Vec2 r;
    scale = 0;
    for (int j = 0; j < 2; ++j) {
      double lap = dG[0](j, 0) + dG[1](j, 1);
      double gd = dG[j](0, 0) + dG[j](1, 1);
      r[j] = -visc * lap - grad_div * gd + dp[j];
      scale += visc * (std::abs(dG[0](j, 0)) + std::abs(dG[1](j, 1))) +
               grad_div * (std::abs(dG[j](0, 0)) + std::abs(dG[j](1, 1))) + std::abs(dp[j]);
    }
    return r;
  };
  FdResidual out;
  double s1, s2;
  Vec2 r1 = residual(h, s1), r2 = residual(h / 2, s2);
  out.raw = r1.norm();
  out.half = r2.norm();
  out.extrapolated = ((4 * r2 - r1) / 3).norm();
  out.scale = std::max(s1, s2);
  return out;
}

// Error of a discrete field against an exact solution.
inline siflab::FieldNorms error_norms(const siflab::MixedField& u, const siflab::VectorField& ue, const std::function<siflab::Mat2(const Vec2&)>& ge,
                       const siflab::ScalarField& pe) {
  return siflab::integrate_norms(*u.disc, [&](int e, const Eigen::Vector3d& L, const Vec2& x) {
    siflab::PointSample s;
    s.u = u.velocity(e, L) - ue(x);
    s.grad = u.velocity_grad(e, L) - ge(x);
    s.p = u.pressure(e, L) - pe(x);
    return s;
  });
}

inline std::vector<siflab::VectorField> same_on_all(const siflab::VectorField& g, int n) { return std::vector<siflab::VectorField>(n, g); }

struct SquareRun {
  siflab::FieldNorms err;
  double residual;
};

inline SquareRun square_stokes(int n, double eps) {
  auto d = siflab::make_discretization(siflab::generate_rectangle_mesh(0, 0, 1, 1, n, n));
  siflab::MaterialParams m{1.0, eps};
  // penalized data keeps the same exact pair: div u + eps p = zeta
  siflab::ScalarField zeta = [eps](const Vec2& x) { return eps * SquareStokes::p(x); };
  siflab::SparseSystem sys = siflab::assemble(d, m, [](const Vec2& x) { return SquareStokes::f(x, 1.0); },
                              eps > 0 ? zeta : siflab::ScalarField());
  siflab::apply_dirichlet(sys, same_on_all(SquareStokes::u, 4));
  if (eps == 0) siflab::fix_pressure_gauge(sys);
  siflab::MixedSolver solver(sys);
  siflab::MixedField u = solver.solve(sys);
  return {error_norms(u, SquareStokes::u, SquareStokes::grad, SquareStokes::p), solver.last_residual()};
}

}  // namespace testing
