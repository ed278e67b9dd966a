#pragma once

#include <vector>

#include "siflab/modes.hpp"

namespace siflab {

struct AngularIntegrals {
  Family family = Family::Lame;
  int index = 1;
  double eps = 0.0;
  double gamma = 0.0;
  // Lame: {mu * 2 lambda T.T~, eps^{-1}(I + J)}; Stokes: the three summands.
  std::vector<double> terms;
  int order = 0;
  double error_estimate = 0.0;
};

// Closed form of eps^{-1}(I_i + J_i) at t = theta - bisector.
double K_closed(const SingularMode& primal, double theta);
// Raw I_i + J_i from the angular functions (no division by eps).
double ij_raw(const SingularMode& primal, const SingularMode& dual, double theta);

AngularIntegrals gamma_lame(const SingularMode& primal, const SingularMode& dual, int order = 64);
AngularIntegrals gamma_stokes(const SingularMode& primal, const SingularMode& dual,
                              int order = 64);

// Convenience: build modes from (omega, material) and integrate.
AngularIntegrals gamma_lame(int index, double omega, const MaterialParams& material,
                            int order = 64);
AngularIntegrals gamma_stokes(int index, double omega, double mu = 1.0, int order = 64);

struct IdentityReport {
  double max_deviation = 0.0;  // max over the grid of |raw - eps K|
  double scale = 0.0;          // max over the grid of the summand magnitudes
  double sup_K = 0.0;          // max over the grid of |K|
};

IdentityReport check_ij_identity(int index, double omega, const MaterialParams& material,
                                 int grid_points = 720);

struct GammaLimitRow {
  double eps = 0.0;
  double gamma = 0.0;
  double difference = 0.0;  // |gamma^eps - mu gamma^s|
  double slope = 0.0;       // log-log slope to the previous row (0 for the first)
};

struct GammaLimitStudy {
  double gamma_stokes = 0.0;
  std::vector<GammaLimitRow> rows;
  double final_slope = 0.0;
};

GammaLimitStudy gamma_limit_study(int index, double omega, double mu,
                                  const std::vector<double>& eps_grid);

}  // namespace siflab
