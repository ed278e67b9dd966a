#pragma once

#include <string>
#include <vector>

#include "siflab/config.hpp"
#include "siflab/extraction.hpp"

namespace siflab {

// Exact solution built from a smooth divergence-free polynomial plus a known
// combination of singular modes; f, zeta and g follow from it.
struct ManufacturedCase {
  Family family = Family::Lame;
  MaterialParams material;
  double c1 = 0, c2 = 0;
  std::vector<SingularMode> primal;
  VectorField u;       // exact velocity
  ScalarField p;       // exact pressure
  VectorField w_poly;  // smooth part
  VectorField f;
  ScalarField zeta;
  std::vector<VectorField> g;
};

// Smooth polynomial used by the manufactured cases: curl of x^2 y + x y^2 + x^2 y^2.
Vec2 manufactured_w(const Vec2& x);
Mat2 manufactured_w_grad(const Vec2& x);
Vec2 manufactured_minus_laplacian_w(const Vec2& x);

ManufacturedCase make_manufactured(Family family, const CornerPolygon& polygon, const MaterialParams& material,
                                   double c1, double c2);
ProblemData manufactured_data(const ManufacturedCase& mc, const CornerPolygon& polygon, DiscretizationPtr disc);

struct ManufacturedRow {
  double h = 0;
  int elements = 0;
  double c1 = 0, c2 = 0;
  double err1 = 0, err2 = 0;    // |c - c_true|
  double rel1 = 0, rel2 = 0;    // relative to |c_true| (absolute if c_true = 0)
  SifReport report;
};

struct ManufacturedReport {
  Family family = Family::Lame;
  double eps = 0;
  double c1_true = 0, c2_true = 0;
  std::vector<ManufacturedRow> rows;
  std::vector<double> rate1, rate2;  // observed rates between consecutive rows
};

ManufacturedReport run_manufactured(const RunConfig& cfg);

struct SweepRecord {
  double eps = 0;
  double lambda1 = 0, lambda2 = 0;
  double gamma1 = 0, gamma2 = 0;
  double c1 = 0, c2 = 0;
  double c1s = 0, c2s = 0;
  double dc1 = 0, dc2 = 0;  // |c_i^eps - c_i^s / mu|
  double w_h1 = 0;          // ||w^eps - w^s||_1
  double sigma_l2 = 0;      // ||sigma^eps - sigma^s||_0
  double wall_time = 0;
};

struct SweepResult {
  std::vector<SweepRecord> rows;
  SifReport stokes;
  double slope_dc1 = 0, slope_dc2 = 0, slope_regular = 0;  // log-log, first to last row
  std::string mesh_id;
};

SweepResult run_eps_sweep(const RunConfig& cfg);

}  // namespace siflab
