#include "siflab/angular.hpp"

#include <cmath>
#include <functional>

#include "siflab/error.hpp"
#include "siflab/quadrature.hpp"

namespace siflab {

double K_closed(const SingularMode& m, double theta) {
  const double l = m.lambda, w = m.frame.omega(), C = m.C;
  const double t = theta - m.frame.bisector();
  const double minus = C * std::cos(l * w) - l * std::cos(w);
  const double plus = C * std::cos(l * w) + l * std::cos(w);
  if (m.index == 1) {
    const double s1 = std::sin((1 - l) * t), s2 = std::sin((1 + l) * t);
    return 4 * m.mu * l * (2 * C * s1 * s2 - minus * s1 * s1 - plus * s2 * s2);
  }
  const double c1 = std::cos((1 - l) * t), c2 = std::cos((1 + l) * t);
  return 4 * m.mu * l * (2 * C * c1 * c2 - minus * c2 * c2 - plus * c1 * c1);
}

double ij_raw(const SingularMode& p, const SingularMode& d, double theta) {
  const Vec2 er = e_r(theta), et = e_theta(theta);
  const double Tr = p.T(theta).dot(er), Tdr = d.T(theta).dot(er);
  const double I = 2 * p.lambda * Tr * Tdr;
  const double J = p.dT(theta).dot(et) * Tdr - Tr * d.dT(theta).dot(et);
  return I + J;
}

namespace {

void check_pair(const SingularMode& p, const SingularMode& d, Family family) {
  if (p.family != family || d.family != family)
    throw Error(ErrorCode::FamilyMismatch, "modes are not of the requested family");
  if (p.kind != Kind::Primal || d.kind != Kind::Dual || p.index != d.index ||
      p.lambda != d.lambda)
    throw Error(ErrorCode::FamilyMismatch, "need a primal/dual pair from one exponent table");
}

using Integrand = std::function<std::vector<double>(double)>;

// Integrates a vector-valued integrand at order n and 2n; returns the order-n sums.
std::vector<double> integrate(const Integrand& f, double a, double b, int n, double& err) {
  auto run = [&](int order) {
    Rule1D q = gauss_nodes(order, a, b);
    std::vector<double> acc;
    for (size_t k = 0; k < q.x.size(); ++k) {
      std::vector<double> v = f(q.x[k]);
      if (acc.empty()) acc.assign(v.size(), 0.0);
      for (size_t c = 0; c < v.size(); ++c) acc[c] += q.w[k] * v[c];
    }
    return acc;
  };
  std::vector<double> lo = run(n), hi = run(2 * n);
  double s_lo = 0, s_hi = 0;
  for (double v : lo) s_lo += v;
  for (double v : hi) s_hi += v;
  err = std::abs(s_hi - s_lo);
  return lo;
}

AngularIntegrals finish(AngularIntegrals out) {
  out.gamma = 0.0;
  for (double v : out.terms) out.gamma += v;
  if (out.error_estimate > 1e-11 * std::abs(out.gamma) && out.error_estimate > 1e-15)
    throw Error(ErrorCode::QuadratureNotConverged, "gamma quadrature did not converge");
  if (!(std::abs(out.gamma) > 1e-8))
    throw Error(ErrorCode::GammaNearZero, "normalizer gamma is numerically zero");
  return out;
}

}  // namespace

AngularIntegrals gamma_lame(const SingularMode& p, const SingularMode& d, int order) {
  check_pair(p, d, Family::Lame);
  AngularIntegrals out;
  out.family = Family::Lame;
  out.index = p.index;
  out.eps = p.eps;
  out.order = order;
  Integrand f = [&](double th) {
    return std::vector<double>{p.mu * 2 * p.lambda * p.T(th).dot(d.T(th)), K_closed(p, th)};
  };
  out.terms = integrate(f, p.frame.omega1, p.frame.omega2, order, out.error_estimate);
  return finish(out);
}

AngularIntegrals gamma_stokes(const SingularMode& p, const SingularMode& d, int order) {
  check_pair(p, d, Family::Stokes);
  AngularIntegrals out;
  out.family = Family::Stokes;
  out.index = p.index;
  out.order = order;
  const double bis = p.frame.bisector();
  Integrand f = [&](double th) {
    const Vec2 er = e_r(th);
    const double xi = p.pressure_coeff(th - bis), xid = d.pressure_coeff(th - bis);
    return std::vector<double>{2 * p.lambda * p.T(th).dot(d.T(th)), -xi * d.T(th).dot(er),
                               p.T(th).dot(er) * xid};
  };
  out.terms = integrate(f, p.frame.omega1, p.frame.omega2, order, out.error_estimate);
  return finish(out);
}

namespace {

CornerFrame frame_for(double omega) { return CornerFrame{0.0, omega}; }

}  // namespace

AngularIntegrals gamma_lame(int index, double omega, const MaterialParams& material, int order) {
  ExponentTable t = lame_exponents(omega, material.lame_C());
  CornerFrame fr = frame_for(omega);
  return gamma_lame(make_mode(Family::Lame, Kind::Primal, index, fr, material, t),
                    make_mode(Family::Lame, Kind::Dual, index, fr, material, t), order);
}

AngularIntegrals gamma_stokes(int index, double omega, double mu, int order) {
  ExponentTable t = stokes_exponents(omega);
  CornerFrame fr = frame_for(omega);
  MaterialParams m{mu, 0.0};
  return gamma_stokes(make_mode(Family::Stokes, Kind::Primal, index, fr, m, t),
                      make_mode(Family::Stokes, Kind::Dual, index, fr, m, t), order);
}

IdentityReport check_ij_identity(int index, double omega, const MaterialParams& material,
                                 int grid_points) {
  if (!(material.eps > 0 && material.eps <= 0.1))
    throw Error(ErrorCode::InvalidArgument, "identity check needs eps in (0, 0.1]");
  ExponentTable t = lame_exponents(omega, material.lame_C());
  CornerFrame fr = frame_for(omega);
  SingularMode p = make_mode(Family::Lame, Kind::Primal, index, fr, material, t);
  SingularMode d = make_mode(Family::Lame, Kind::Dual, index, fr, material, t);
  IdentityReport rep;
  for (int k = 0; k < grid_points; ++k) {
    double th = fr.omega1 + omega * k / (grid_points - 1.0);
    double raw = ij_raw(p, d, th);
    double K = K_closed(p, th);
    const Vec2 er = e_r(th), et = e_theta(th);
    const double Tr = p.T(th).dot(er), Tdr = d.T(th).dot(er);
    // floating point scale of the cancelling summands
    const double size = std::abs(2 * p.lambda * Tr * Tdr) + std::abs(p.dT(th).dot(et) * Tdr) +
                        std::abs(Tr * d.dT(th).dot(et));
    rep.max_deviation = std::max(rep.max_deviation, std::abs(raw - material.eps * K));
    rep.scale = std::max(rep.scale, size);
    rep.sup_K = std::max(rep.sup_K, std::abs(K));
  }
  return rep;
}

GammaLimitStudy gamma_limit_study(int index, double omega, double mu,
                                  const std::vector<double>& eps_grid) {
  if (eps_grid.size() < 4)
    throw Error(ErrorCode::InvalidArgument, "gamma limit study needs at least 4 eps values");
  for (size_t k = 1; k < eps_grid.size(); ++k)
    if (!(eps_grid[k] < eps_grid[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "eps grid must be strictly decreasing");
  GammaLimitStudy s;
  s.gamma_stokes = gamma_stokes(index, omega, mu).gamma;
  for (size_t k = 0; k < eps_grid.size(); ++k) {
    GammaLimitRow row;
    row.eps = eps_grid[k];
    row.gamma = gamma_lame(index, omega, MaterialParams{mu, row.eps}).gamma;
    row.difference = std::abs(row.gamma - mu * s.gamma_stokes);
    if (k > 0) {
      const GammaLimitRow& prev = s.rows.back();
      row.slope = std::log(row.difference / prev.difference) / std::log(row.eps / prev.eps);
    }
    s.rows.push_back(row);
  }
  s.final_slope = s.rows.back().slope;
  return s;
}

}  // namespace siflab
