#pragma once

#include <array>
#include <string>
#include <utility>

namespace siflab {

enum class Family { Lame, Stokes };

const char* family_name(Family f);

struct MaterialParams {
  double mu = 1.0;
  double eps = 0.0;

  // Second Lame constant of the reduced system; needs eps > 0.
  double nu() const;
  // (3mu + nu)/(mu + nu) = 1 + 2 mu eps, evaluated without forming nu.
  double lame_C() const { return 1.0 + 2.0 * mu * eps; }
};

struct ExponentTable {
  Family family = Family::Lame;
  double omega = 0.0;
  double C = 1.0;
  std::array<double, 3> exponents{};
  int mode_count = 0;  // N for Lame, M for Stokes
  std::array<std::pair<double, double>, 3> brackets{};
  std::array<double, 3> residuals{};
};

// C^2 sin^2(l w) - l^2 sin^2(w)
double lame_residual(double lambda, double omega, double C);
double stokes_residual(double kappa, double omega);

ExponentTable lame_exponents(double omega, double C);
ExponentTable stokes_exponents(double omega);

// Root of tan(w) = w in (pi, 3pi/2).
double critical_angle();

}  // namespace siflab
