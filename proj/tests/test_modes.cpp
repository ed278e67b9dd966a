#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "siflab/error.hpp"
#include "siflab/modes.hpp"
#include "support.hpp"

using namespace siflab;

namespace {

const double kL = 1.5 * M_PI;

struct Setup {
  CornerFrame frame;
  MaterialParams mat;
  ExponentTable table;
};

Setup lame(double eps, double mu = 1.0, double omega1 = -0.5 * M_PI, double omega = kL) {
  MaterialParams m{mu, eps};
  return {CornerFrame{omega1, omega1 + omega}, m, lame_exponents(omega, m.lame_C())};
}
Setup stokes(double mu = 1.0, double omega1 = -0.5 * M_PI, double omega = kL) {
  return {CornerFrame{omega1, omega1 + omega}, MaterialParams{mu, 0.0}, stokes_exponents(omega)};
}

SingularMode mode(const Setup& s, Kind k, int i) {
  return make_mode(s.table.family, k, i, s.frame, s.mat, s.table);
}

std::vector<SingularMode> all_modes() {
  std::vector<SingularMode> out;
  for (const Setup& s : {lame(1e-2), lame(1e-5, 2.5, 0.3), stokes(), stokes(0.4, 1.0)})
    for (Kind k : {Kind::Primal, Kind::Dual})
      for (int i : {1, 2}) out.push_back(mode(s, k, i));
  return out;
}

double sup_T(const SingularMode& m) {
  double s = 0;
  for (int k = 0; k <= 720; ++k) s = std::max(s, m.T(m.frame.omega1 + m.frame.omega() * k / 720.0).norm());
  return s;
}

}  // namespace

TEST_CASE("modes vanish on both corner edges") {
  for (const auto& m : all_modes()) {
    CHECK(m.T(m.frame.omega1).norm() < 1e-12);
    CHECK(m.T(m.frame.omega2).norm() < 1e-12);
    for (double r : {1e-3, 0.5, 2.0}) {
      CHECK(siflab::eval(m, r, m.frame.omega1).norm() < 1e-12 * std::pow(r, m.exponent) * sup_T(m) + 1e-300);
      CHECK(siflab::eval(m, r, m.frame.omega2).norm() < 1e-12 * std::pow(r, m.exponent) * sup_T(m) + 1e-300);
    }
  }
}

TEST_CASE("homogeneity of value and gradient") {
  for (const auto& m : all_modes())
    for (double th : {m.frame.omega1 + 0.3, m.frame.bisector(), m.frame.omega2 - 0.2}) {
      Vec2 v1 = siflab::eval(m, 0.37, th), v2 = siflab::eval(m, 0.74, th);
      CHECK((v2 - std::pow(2.0, m.exponent) * v1).norm() < 1e-14 * v2.norm());
      Mat2 g1 = eval_grad(m, 0.37, th), g2 = eval_grad(m, 0.74, th);
      CHECK((g2 - std::pow(2.0, m.exponent - 1) * g1).norm() < 1e-14 * g2.norm());
    }
}

TEST_CASE("Lame primal mode 1 on the bisector") {
  Setup s = lame(1e-2);
  SingularMode m = mode(s, Kind::Primal, 1);
  const double l = m.lambda, C = s.mat.lame_C();
  AngularValues a = m.angular(0.0);
  CHECK(a.A == 0.0);
  CHECK(std::abs(a.B - (-(C + l) + (C * std::cos(l * kL) + l * std::cos(kL)))) < 1e-15);
}

TEST_CASE("Stokes primal mode 1 pressure vanishes on the bisector") {
  SingularMode m = mode(stokes(), Kind::Primal, 1);
  CHECK(m.pressure_coeff(0.0) == 0.0);
  CHECK(pressure(m, 0.3, m.frame.bisector()) == 0.0);
}

TEST_CASE("dual Lame mode 1 at r = 1 on the bisector") {
  // direct evaluation of the angular formulas with a = -lambda at t = 0
  Setup s = lame(1e-3);
  SingularMode m = mode(s, Kind::Dual, 1);
  const double a = -m.lambda, C = s.mat.lame_C();
  const double K = C * std::cos(a * kL) + a * std::cos(kL);
  const double A = 0.0, B = -(C + a) + K;
  const double th = m.frame.bisector();
  Vec2 expect = A * e_r(th) + B * e_theta(th);
  CHECK((siflab::eval(m, 1.0, th) - expect).norm() < 1e-15 * expect.norm());
}

TEST_CASE("primal modes decay at the corner") {
  for (const auto& m : all_modes()) {
    if (m.kind != Kind::Primal) continue;
    const double th = m.frame.bisector() + 0.4;
    CHECK(siflab::eval(m, 1e-8, th).norm() < 1e-4 * m.prefactor * sup_T(m));
  }
}

TEST_CASE("gradient matches central differences") {
  for (const auto& m : all_modes()) {
    const double r = 0.7, th = m.frame.bisector() + 0.3, h = 1e-5;
    Vec2 x = r * e_r(th);
    Mat2 G = eval_grad_at(m, x), F;
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e[k] = h;
      F.col(k) = (eval_at(m, x + e) - eval_at(m, x - e)) / (2 * h);
    }
    CHECK((G - F).norm() <= 1e-8 * G.norm());
  }
}

TEST_CASE("radial derivative is the exponent times the value") {
  for (const auto& m : all_modes())
    for (int k = 0; k <= 90; ++k) {
      const double th = m.frame.omega1 + m.frame.omega() * k / 90.0;
      Vec2 lhs = eval_grad(m, 1.0, th) * e_r(th);
      Vec2 rhs = m.exponent * m.prefactor * m.T(th);
      CHECK((lhs - rhs).norm() < 1e-13 * (1 + rhs.norm()));
    }
}

TEST_CASE("scaled divergence of the dual mode 1 vanishes on the bisector") {
  SingularMode m = mode(lame(1e-3), Kind::Dual, 1);
  for (double r : {0.1, 1.0, 3.0}) CHECK(eval_div_scaled(m, r, m.frame.bisector()) == 0.0);
}

TEST_CASE("scaled divergence agrees with the trace of the gradient") {
  const double eps = 1e-3;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (Kind k : {Kind::Primal, Kind::Dual})
    for (int i : {1, 2}) {
      SingularMode m = mode(lame(eps, 1.3), k, i);
      for (int n = 0; n < 50; ++n) {
        const double r = 0.1 + 0.9 * U(rng), th = m.frame.omega1 + m.frame.omega() * U(rng);
        const double raw = eval_grad(m, r, th).trace() / eps;
        const double closed = eval_div_scaled(m, r, th);
        CHECK(std::abs(raw - closed) < 1e-9 * m.mu * 4 * std::pow(r, m.exponent - 1));
        CHECK(std::abs(pressure(m, r, th) + closed) < 1e-15 * (1 + std::abs(closed)));
      }
    }
}

TEST_CASE("scaled divergence is uniformly bounded in eps") {
  double sup = 0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6})
    for (Kind k : {Kind::Primal, Kind::Dual})
      for (int i : {1, 2}) {
        SingularMode m = mode(lame(eps), k, i);
        for (int n = 0; n <= 720; ++n) {
          const double th = m.frame.omega1 + m.frame.omega() * n / 720.0;
          sup = std::max(sup, std::abs(eval_div_scaled(m, 0.5, th)) * std::pow(0.5, 1 - m.exponent) / m.mu);
        }
      }
  CHECK(sup <= 4.0);
  CHECK(sup > 0.5);
}

TEST_CASE("Stokes velocity modes are divergence free") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (const auto& m : all_modes()) {
    if (m.family != Family::Stokes) continue;
    for (int n = 0; n < 25; ++n) {
      const double r = 0.05 + U(rng), th = m.frame.omega1 + m.frame.omega() * U(rng);
      Mat2 G = eval_grad(m, r, th);
      CHECK(std::abs(G.trace()) < 1e-10 * G.norm());
    }
  }
}

TEST_CASE("finite-difference residual of the governing operators") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  for (const auto& m : all_modes())
    for (int n = 0; n < 25; ++n) {
      const double r = 0.2 + 0.8 * U(rng), th = m.frame.omega1 + 0.05 + (m.frame.omega() - 0.1) * U(rng);
      auto res = testing::mode_residual(m, r * e_r(th), 2e-3 * r);
      CHECK(res.extrapolated < 1e-8 * res.scale);
      // second order in the step, unless already at rounding level
      if (res.raw > 1e-10 * res.scale) {
        CHECK(res.raw / res.half > 3.5);
        CHECK(res.raw / res.half < 4.5);
      }
    }
}

TEST_CASE("Lame modes converge to the scaled Stokes modes") {
  Setup st = stokes(1.0);
  for (Kind k : {Kind::Primal, Kind::Dual})
    for (int i : {1, 2}) {
      SingularMode ms = mode(st, k, i);
      std::vector<double> err;
      for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
        SingularMode ml = mode(lame(eps), k, i);
        double e = 0;
        for (int n = 0; n <= 720; ++n) {
          const double th = ml.frame.omega1 + ml.frame.omega() * n / 720.0;
          e = std::max(e, (siflab::eval(ml, 1.0, th) - ms.mu * siflab::eval(ms, 1.0, th)).norm());
        }
        err.push_back(e);
      }
      for (size_t n = 1; n < err.size(); ++n) {
        CHECK(err[n] < err[n - 1]);
        const double slope = std::log10(err[n - 1] / err[n]);
        CHECK(slope > 0.9);
        CHECK(slope < 1.1);
      }
    }
}

TEST_CASE("dual mode is the primal formula with a negated exponent") {
  for (const auto& m : all_modes()) {
    if (m.kind != Kind::Dual) continue;
    CHECK(m.exponent == -m.lambda);
    const double th = m.frame.bisector() - 0.7;
    Vec2 a = siflab::eval(m, 0.5, th), b = siflab::eval(m, 0.25, th);
    CHECK((b - std::pow(0.5, -m.lambda) * a).norm() < 1e-14 * b.norm());
  }
}

TEST_CASE("edge traces") {
  CornerPolygon p = lshape_polygon();
  MaterialParams mat{1.0, 1e-3};
  ExponentTable t = lame_exponents(p.frame().omega(), mat.lame_C());
  std::vector<double> s16;
  for (int k = 0; k < 16; ++k) s16.push_back(0.5 - 0.5 * std::cos(M_PI * (k + 0.5) / 16));
  for (Kind k : {Kind::Primal, Kind::Dual}) {
    SingularMode m = make_mode(Family::Lame, k, 1, p.frame(), mat, t);
    for (int j : {1, 6}) {
      auto v = trace_on_edge(m, p, j, s16);
      for (const auto& x : v) CHECK(x.norm() == 0.0);
    }
    const double rmin = p.far_distance(), rmax = std::sqrt(2.0);
    const double bound = m.prefactor * std::pow(m.exponent > 0 ? rmax : rmin, m.exponent) * sup_T(m);
    for (int j = 2; j <= 5; ++j) {
      auto v = trace_on_edge(m, p, j, s16);
      for (size_t n = 0; n < v.size(); ++n) {
        CHECK(std::isfinite(v[n].x()));
        CHECK(v[n].norm() <= bound * (1 + 1e-12));
        CHECK((v[n] - eval_at(m, p.edge(j).point(s16[n]))).norm() == 0.0);
      }
      // 2-point and 16-point samplings describe one smooth trace: the Chebyshev
      // interpolant through 16 points reproduces the 2-point samples within the
      // error estimated from a 12-point interpolant
      std::vector<double> s12;
      for (int k = 0; k < 12; ++k) s12.push_back(0.5 - 0.5 * std::cos(M_PI * (k + 0.5) / 12));
      auto v12 = trace_on_edge(m, p, j, s12);
      auto lagrange = [](const std::vector<double>& nodes, const std::vector<Vec2>& vals, double x) {
        Vec2 out = Vec2::Zero();
        for (size_t a = 0; a < nodes.size(); ++a) {
          double L = 1;
          for (size_t b = 0; b < nodes.size(); ++b)
            if (b != a) L *= (x - nodes[b]) / (nodes[a] - nodes[b]);
          out += L * vals[a];
        }
        return out;
      };
      std::vector<double> s2 = {0.25, 0.75};
      auto v2 = trace_on_edge(m, p, j, s2);
      for (size_t q = 0; q < s2.size(); ++q) {
        Vec2 i16 = lagrange(s16, v, s2[q]), i12 = lagrange(s12, v12, s2[q]);
        CHECK((i16 - v2[q]).norm() <= (i12 - i16).norm() + 1e-14 * bound);
      }
    }
  }
}

TEST_CASE("construction errors") {
  Setup s = lame(1e-2);
  CHECK_THROWS_AS(make_mode(Family::Lame, Kind::Primal, 3, s.frame, s.mat, s.table), Error);
  try {
    make_mode(Family::Lame, Kind::Primal, 0, s.frame, s.mat, s.table);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
  try {
    make_mode(Family::Stokes, Kind::Primal, 1, s.frame, s.mat, s.table);
    FAIL("expected FamilyMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FamilyMismatch);
  }
  try {
    MaterialParams other{1.0, 2e-2};
    make_mode(Family::Lame, Kind::Primal, 1, s.frame, other, s.table);
    FAIL("expected FamilyMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FamilyMismatch);
  }
  Setup narrow = stokes(1.0, 0.0, 1.2 * M_PI);
  try {
    make_mode(Family::Stokes, Kind::Primal, 2, narrow.frame, narrow.mat, narrow.table);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
}
