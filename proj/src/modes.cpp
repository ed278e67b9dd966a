#include "siflab/modes.hpp"

#include <cmath>

#include "siflab/error.hpp"

namespace siflab {

const char* kind_name(Kind k) { return k == Kind::Primal ? "primal" : "dual"; }

SingularMode make_mode(Family family, Kind kind, int index, const CornerFrame& frame,
                       const MaterialParams& material, const ExponentTable& table) {
  if (index != 1 && index != 2) throw Error(ErrorCode::IndexOutOfRange, "mode index must be 1 or 2");
  if (table.family != family)
    throw Error(ErrorCode::FamilyMismatch, "exponent table family differs from requested family");
  if (std::abs(table.omega - frame.omega()) > 1e-12)
    throw Error(ErrorCode::FamilyMismatch, "exponent table angle differs from corner angle");
  if (index > table.mode_count)
    throw Error(ErrorCode::IndexOutOfRange, "mode index exceeds the number of singular modes");
  if (family == Family::Lame && std::abs(table.C - material.lame_C()) > 1e-15)
    throw Error(ErrorCode::FamilyMismatch, "exponent table C differs from 1 + 2 mu eps");
  if (!(material.mu > 0)) throw Error(ErrorCode::InvalidArgument, "mu must be positive");

  SingularMode m;
  m.family = family;
  m.kind = kind;
  m.index = index;
  m.lambda = table.exponents[index - 1];
  m.exponent = kind == Kind::Primal ? m.lambda : -m.lambda;
  m.frame = frame;
  m.mu = material.mu;
  m.eps = family == Family::Lame ? material.eps : 0.0;
  m.C = family == Family::Lame ? table.C : 1.0;
  m.prefactor = family == Family::Lame ? 1.0 : 1.0 / material.mu;
  return m;
}

AngularValues SingularMode::angular(double t) const {
  const double a = exponent, w = frame.omega();
  const double p = (1.0 - a) * t, q = (1.0 + a) * t;
  const double sp = std::sin(p), cp = std::cos(p), sq = std::sin(q), cq = std::cos(q);
  AngularValues v;
  if (index == 1) {
    const double K = C * std::cos(a * w) + a * std::cos(w);
    v.A = -(C - a) * sp + K * sq;
    v.B = -(C + a) * cp + K * cq;
    v.dA = -(C - a) * (1.0 - a) * cp + K * (1.0 + a) * cq;
    v.dB = (C + a) * (1.0 - a) * sp - K * (1.0 + a) * sq;
  } else {
    const double K = C * std::cos(a * w) - a * std::cos(w);
    v.A = -(C - a) * cp + K * cq;
    v.B = (C + a) * sp - K * sq;
    v.dA = (C - a) * (1.0 - a) * sp - K * (1.0 + a) * sq;
    v.dB = (C + a) * (1.0 - a) * cp - K * (1.0 + a) * cq;
  }
  return v;
}

double SingularMode::pressure_coeff(double t) const {
  const double p = (1.0 - exponent) * t;
  return 4.0 * exponent * (index == 1 ? std::sin(p) : std::cos(p));
}

Vec2 SingularMode::T(double theta) const {
  AngularValues v = angular(theta - frame.bisector());
  return v.A * e_r(theta) + v.B * e_theta(theta);
}

Vec2 SingularMode::dT(double theta) const {
  AngularValues v = angular(theta - frame.bisector());
  return (v.dA - v.B) * e_r(theta) + (v.A + v.dB) * e_theta(theta);
}

namespace {

void check_radius(double r) {
  if (!(r > 0)) throw Error(ErrorCode::NonpositiveRadius, "r must be positive");
}

}  // namespace

Vec2 eval(const SingularMode& m, double r, double theta) {
  check_radius(r);
  return m.prefactor * std::pow(r, m.exponent) * m.T(theta);
}

Mat2 eval_grad(const SingularMode& m, double r, double theta) {
  check_radius(r);
  const double s = m.prefactor * std::pow(r, m.exponent - 1.0);
  return s * (m.exponent * m.T(theta) * e_r(theta).transpose() +
              m.dT(theta) * e_theta(theta).transpose());
}

double eval_div(const SingularMode& m, double r, double theta) {
  check_radius(r);
  AngularValues v = m.angular(theta - m.frame.bisector());
  return m.prefactor * std::pow(r, m.exponent - 1.0) * ((m.exponent + 1.0) * v.A + v.dB);
}

double eval_div_scaled(const SingularMode& m, double r, double theta) {
  check_radius(r);
  if (m.family != Family::Lame)
    throw Error(ErrorCode::FamilyMismatch, "scaled divergence is defined for Lame modes");
  // (a+1)A + B' = 2a(1 - C) S((1-a)t) and 1 - C = -2 mu eps
  return -m.mu * std::pow(r, m.exponent - 1.0) * m.pressure_coeff(theta - m.frame.bisector());
}

double pressure(const SingularMode& m, double r, double theta) {
  check_radius(r);
  const double base = std::pow(r, m.exponent - 1.0) * m.pressure_coeff(theta - m.frame.bisector());
  return m.family == Family::Stokes ? base : m.mu * base;
}

Vec2 eval_at(const SingularMode& m, const Vec2& p) {
  double r = p.norm();
  if (r == 0.0 && m.exponent > 0) return Vec2::Zero();
  return eval(m, r, m.frame.theta_of(p));
}

Mat2 eval_grad_at(const SingularMode& m, const Vec2& p) {
  return eval_grad(m, p.norm(), m.frame.theta_of(p));
}

double pressure_at(const SingularMode& m, const Vec2& p) {
  return pressure(m, p.norm(), m.frame.theta_of(p));
}

double eval_div_scaled_at(const SingularMode& m, const Vec2& p) {
  return eval_div_scaled(m, p.norm(), m.frame.theta_of(p));
}

std::vector<Vec2> trace_on_edge(const SingularMode& m, const CornerPolygon& polygon, int j,
                                const std::vector<double>& s) {
  std::vector<Vec2> out(s.size(), Vec2::Zero());
  if (j == 1 || j == polygon.edge_count()) return out;
  const PolygonEdge& e = polygon.edge(j);
  for (size_t k = 0; k < s.size(); ++k) out[k] = eval_at(m, e.point(s[k]));
  return out;
}

}  // namespace siflab
