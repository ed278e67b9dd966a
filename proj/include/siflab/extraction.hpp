#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "siflab/angular.hpp"
#include "siflab/fem.hpp"
#include "siflab/modes.hpp"

namespace siflab {

struct ProblemData {
  CornerPolygon polygon;
  DiscretizationPtr disc;
  MaterialParams material;
  VectorField f;             // null means zero
  ScalarField zeta;          // Stokes only; null means zero
  std::vector<VectorField> g;  // one per edge
};

struct TermBreakdown {
  double volume = 0.0;
  std::vector<double> edges;  // per Gamma_j boundary integrals (before the minus sign)
  double total = 0.0;
};

struct SifReport {
  Family family = Family::Lame;
  double eps = 0.0;
  double mu = 1.0;
  int mode_count = 2;
  double lambda1 = 0, lambda2 = 0;
  double gamma1 = 0, gamma2 = 0;
  double C1 = 0, C2 = 0, Cstar = 0;
  double c1 = 0, c2 = 0;
  bool has_c2 = true;
  TermBreakdown terms1, terms2, terms_star;
  std::string mesh_id;
};

// Everything that depends only on (polygon, mesh, material, family): modes,
// normalizers, the factorized system and both Psi fields.
struct ExtractionSetup {
  Family family = Family::Lame;
  CornerPolygon polygon;
  DiscretizationPtr disc;
  MaterialParams material;
  ExponentTable table;
  std::vector<SingularMode> primal, dual;  // index i-1
  std::vector<AngularIntegrals> gamma;
  std::shared_ptr<MixedSolver> solver;
  std::vector<MixedField> psi;
  double weight_scale = 1.0;  // 1 (penalized) or mu (Stokes) in front of the dual mode
};

// family Lame means the penalized system with material.eps > 0; Stokes uses eps = 0.
ExtractionSetup prepare_extraction(Family family, const CornerPolygon& polygon, DiscretizationPtr disc,
                                   const MaterialParams& material);

// Psi-problem solution for mode i using the setup's factorization.
MixedField solve_psi(const ExtractionSetup& setup, int i);
// Standalone variant that assembles and factors its own system.
MixedField solve_psi(int i, Family family, const MaterialParams& material, const CornerPolygon& polygon,
                     DiscretizationPtr disc);

// C_i for either family; psi must solve the Psi-problem for the same mode.
TermBreakdown compute_Ci(const ProblemData& data, const SingularMode& dual, double weight_scale,
                         const MixedField& psi);
TermBreakdown compute_Ci_penalized(const ProblemData& data, int i, const SingularMode& dual,
                                   const MixedField& psi);
TermBreakdown compute_Ci_stokes(const ProblemData& data, int i, const SingularMode& dual,
                                const MixedField& psi);
// C_* = sum over far edges of the pairing of the primal mode 1 with mode-2 weights.
TermBreakdown compute_Cstar(const CornerPolygon& polygon, const VectorField& primal1, double mu,
                            const SingularMode& dual2, double weight_scale, const MixedField& psi2);

SifReport extract_sifs(const ExtractionSetup& setup, const ProblemData& data);
SifReport extract_sifs_penalized(const ProblemData& data);
SifReport extract_sifs_stokes(const ProblemData& data);

// Solves the main problem on the setup's factorization.
MixedField solve_problem(const ExtractionSetup& setup, const ProblemData& data);

struct RegularPart {
  MixedField w_nodal;  // nodal P2/P1 representation (corner pressure set to 0)
  SampleFn sample;     // exact pointwise w, grad w, sigma
};

RegularPart regular_part(const MixedField& u, const SifReport& report,
                         const std::vector<SingularMode>& primal);
FieldNorms regular_difference_norms(const RegularPart& a, const RegularPart& b);

}  // namespace siflab
