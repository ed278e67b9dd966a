#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "siflab/error.hpp"
#include "siflab/spectral.hpp"

using namespace siflab;

namespace {

const double kL = 1.5 * M_PI;

// Plain bisection on C sin(l w) + s l sin(w), an independent factorized form.
double bisect_factor(double C, double w, double sgn, double a, double b) {
  auto f = [&](double l) { return C * std::sin(l * w) + sgn * l * std::sin(w); };
  double fa = f(a);
  REQUIRE(fa * f(b) < 0);
  while (b - a > 1e-15) {
    double m = 0.5 * (a + b), fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

void check_lame_chain(const ExponentTable& t) {
  const double w = t.omega;
  CHECK(0.5 < t.exponents[0]);
  CHECK(t.exponents[0] < M_PI / w);
  CHECK(M_PI / w < t.exponents[1]);
  CHECK(t.exponents[1] < 1.0);
  CHECK(1.0 < t.exponents[2]);
  CHECK(t.exponents[2] < 2 * M_PI / w);
}

}  // namespace

TEST_CASE("C = 1 reproduces the Stokes exponent") {
  ExponentTable l = lame_exponents(kL, 1.0), s = stokes_exponents(kL);
  CHECK(std::abs(l.exponents[0] - s.exponents[0]) < 1e-14);
  CHECK(std::abs(l.exponents[1] - s.exponents[1]) < 1e-14);
  CHECK(l.family == Family::Lame);
}

TEST_CASE("Lame exponent at eps = 1e-2") {
  const double C = 1 + 2 * 1 * 0.01;
  ExponentTable t = lame_exponents(kL, C);
  CHECK(t.C == C);
  CHECK(t.exponents[0] > 0.5);
  CHECK(t.exponents[0] < 2.0 / 3.0);
  for (double r : t.residuals) CHECK(std::abs(r) < 1e-12);
  check_lame_chain(t);
  const double kappa1 = stokes_exponents(kL).exponents[0];
  CHECK(t.exponents[0] > kappa1);
  // root of C sin(l w) + l sin w in (1/2, 2/3)
  const double oracle = bisect_factor(C, kL, 1.0, 0.5, 2.0 / 3.0);
  CHECK(std::abs(t.exponents[0] - oracle) < 1e-14);
}

TEST_CASE("exponent gap to the Stokes root is first order in eps") {
  ExponentTable s = stokes_exponents(kL);
  const double eps[] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double gap[5];
  for (int k = 0; k < 5; ++k) gap[k] = lame_exponents(kL, 1 + 2 * eps[k]).exponents[0] - s.exponents[0];
  const double K = gap[0] / eps[0];
  for (int k = 0; k < 5; ++k) {
    CHECK(gap[k] > 0);
    CHECK(gap[k] <= 1.2 * K * eps[k]);
  }
  for (int k = 1; k < 5; ++k) {
    double slope = std::log(gap[k] / gap[k - 1]) / std::log(eps[k] / eps[k - 1]);
    CHECK(std::abs(slope - 1.0) < 0.1);
  }
  for (int i = 1; i < 2; ++i) {
    double g1 = lame_exponents(kL, 1 + 2e-4).exponents[i] - s.exponents[i];
    double g2 = lame_exponents(kL, 1 + 2e-5).exponents[i] - s.exponents[i];
    CHECK(std::abs(std::log(g1 / g2) / std::log(10.0) - 1.0) < 0.1);
  }
}

TEST_CASE("Stokes exponents at 3pi/2") {
  ExponentTable t = stokes_exponents(kL);
  CHECK(std::abs(t.exponents[0] - 0.544484) < 1e-6);
  CHECK(std::abs(t.exponents[1] - 0.908529) < 1e-6);
  CHECK(t.exponents[2] == 1.0);
  CHECK(t.mode_count == 2);
  CHECK(std::abs(t.exponents[0] - bisect_factor(1.0, kL, 1.0, 0.5, 2.0 / 3.0)) < 1e-14);
  CHECK(std::abs(t.exponents[1] - bisect_factor(1.0, kL, -1.0, 2.0 / 3.0, 0.99)) < 1e-14);
}

TEST_CASE("Case 1 below the critical angle") {
  ExponentTable t = stokes_exponents(1.2 * M_PI);
  CHECK(t.mode_count == 1);
  CHECK(t.exponents[1] == 1.0);
  CHECK(t.exponents[0] > 0.5);
  CHECK(t.exponents[0] < 1 / 1.2);
  CHECK(t.exponents[2] > 1.0);
  CHECK(t.exponents[2] < 2 / 1.2);
}

TEST_CASE("unit exponent is an exact root") {
  for (int k = 1; k < 100; ++k) {
    double w = M_PI * (1 + k / 100.0);
    CHECK(stokes_residual(1.0, w) == 0.0);
  }
}

TEST_CASE("critical angle") {
  const double w = critical_angle();
  CHECK(w / M_PI >= 1.4302);
  CHECK(w / M_PI <= 1.4304);
  CHECK(std::abs(std::tan(w) - w) < 1e-9);
  CHECK(stokes_exponents(w - 1e-4).mode_count == 1);
  CHECK(stokes_exponents(w + 1e-4).mode_count == 2);
}

TEST_CASE("ordering and residuals over the angle and C grids") {
  for (double f : {1.05, 1.1, 1.25, 1.4, 1.5, 1.6, 1.75, 1.9, 1.95}) {
    const double w = f * M_PI;
    for (double C : {1.0 + 1e-9, 1.001, 1.02, 1.2, 1.5}) {
      ExponentTable t = lame_exponents(w, C);
      check_lame_chain(t);
      CHECK(t.mode_count == 2);
      // re-evaluation of the defining equation on a 128-point neighbourhood grid
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(lame_residual(t.exponents[i], w, C)) < 1e-12);
        for (int k = -64; k < 64; ++k) {
          double l = t.exponents[i] + k * 1e-17;
          CHECK(std::abs(lame_residual(l, w, C)) < 1e-12);
        }
      }
    }
    ExponentTable s = stokes_exponents(w);
    for (double r : s.residuals) CHECK(std::abs(r) < 1e-12);
  }
}

TEST_CASE("exponents move monotonically with C") {
  for (double f : {1.25, 1.5, 1.75}) {
    const double w = f * M_PI;
    ExponentTable prev = lame_exponents(w, 1.0);
    ExponentTable s = stokes_exponents(w);
    const int unit = s.mode_count == 2 ? 2 : 1;
    for (int i = 0; i < 3; ++i)
      if (i != unit) CHECK(std::abs(prev.exponents[i] - s.exponents[i]) < 1e-10);
    int sign[3] = {0, 0, 0};
    for (int k = 1; k <= 50; ++k) {
      ExponentTable t = lame_exponents(w, 1.0 + 0.5 * k / 50.0);
      for (int i = 0; i < 3; ++i) {
        double d = t.exponents[i] - prev.exponents[i];
        int sg = (d > 0) - (d < 0);
        if (k > 1) CHECK(sg == sign[i]);
        sign[i] = sg;
        CHECK(std::abs(d) < 0.05);
      }
      prev = t;
    }
  }
}

TEST_CASE("material identities") {
  for (double mu : {0.3, 1.0, 7.0})
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      MaterialParams m{mu, eps};
      const double nu = m.nu();
      CHECK(std::abs((3 * mu + nu) / (mu + nu) - m.lame_C()) < 1e-15 * m.lame_C() * 8);
      CHECK(m.lame_C() > 1.0);
    }
  CHECK_THROWS_AS(MaterialParams({1.0, 0.0}).nu(), Error);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(lame_exponents(0.9 * M_PI, 1.1), Error);
  CHECK_THROWS_AS(lame_exponents(2.1 * M_PI, 1.1), Error);
  CHECK_THROWS_AS(lame_exponents(kL, 0.9), Error);
  CHECK_THROWS_AS(stokes_exponents(M_PI), Error);
}

TEST_CASE("deterministic results") {
  ExponentTable a = lame_exponents(kL, 1.02), b = lame_exponents(kL, 1.02);
  CHECK(a.exponents == b.exponents);
  CHECK(a.residuals == b.residuals);
}
