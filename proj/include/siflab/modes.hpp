#pragma once

#include <vector>

#include "siflab/geometry.hpp"
#include "siflab/spectral.hpp"

namespace siflab {

enum class Kind { Primal, Dual };

const char* kind_name(Kind k);

struct AngularValues {
  double A = 0, B = 0, dA = 0, dB = 0;
};

// r^a T(theta) family of corner solutions; a = +lambda_i (primal) or -lambda_i (dual).
struct SingularMode {
  Family family = Family::Lame;
  Kind kind = Kind::Primal;
  int index = 1;
  double lambda = 0.0;    // positive root from the exponent table
  double exponent = 0.0;  // +lambda or -lambda
  CornerFrame frame;
  double mu = 1.0;
  double eps = 0.0;
  double C = 1.0;
  double prefactor = 1.0;  // 1 for Lame, 1/mu for Stokes

  // A, B and their t-derivatives at t = theta - bisector.
  AngularValues angular(double t) const;
  // 4 a S((1-a) t); S = sin (i = 1) or cos (i = 2).
  double pressure_coeff(double t) const;
  // T(theta) and dT/dtheta in Cartesian components.
  Vec2 T(double theta) const;
  Vec2 dT(double theta) const;
};

SingularMode make_mode(Family family, Kind kind, int index, const CornerFrame& frame,
                       const MaterialParams& material, const ExponentTable& table);

Vec2 eval(const SingularMode& m, double r, double theta);
// Jacobian G(j,k) = d u_j / d x_k.
Mat2 eval_grad(const SingularMode& m, double r, double theta);
// Raw divergence (trace of the Jacobian), any family.
double eval_div(const SingularMode& m, double r, double theta);
// eps^{-1} div for Lame modes, from the cancellation-free closed form.
double eval_div_scaled(const SingularMode& m, double r, double theta);
// Stokes: r^{a-1} C^s. Lame: -eps^{-1} div, the pressure of the mixed form.
double pressure(const SingularMode& m, double r, double theta);

// Cartesian helpers; the corner itself maps to 0 for primal modes.
Vec2 eval_at(const SingularMode& m, const Vec2& p);
Mat2 eval_grad_at(const SingularMode& m, const Vec2& p);
double pressure_at(const SingularMode& m, const Vec2& p);
double eval_div_scaled_at(const SingularMode& m, const Vec2& p);

// Values at edge parameters s in [0, 1] of Gamma_j; exact zeros on Gamma_1, Gamma_J.
std::vector<Vec2> trace_on_edge(const SingularMode& m, const CornerPolygon& polygon, int j,
                                const std::vector<double>& s);

}  // namespace siflab
