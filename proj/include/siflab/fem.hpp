#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "siflab/mesh.hpp"
#include "siflab/quadrature.hpp"
#include "siflab/spectral.hpp"

namespace siflab {

// P2 velocity / P1 pressure numbering on a mesh. Scalar P2 index: vertices
// first, then edges. Unknowns: [u_x (P2) | u_y (P2) | p (P1)].
class Discretization {
 public:
  explicit Discretization(TriMesh mesh);

  const TriMesh& mesh() const { return mesh_; }
  int n_vertices() const { return static_cast<int>(mesh_.nodes.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_p2() const { return n_vertices() + n_edges(); }
  int n_dofs() const { return 2 * n_p2() + n_vertices(); }
  int n_elements() const { return static_cast<int>(mesh_.tris.size()); }
  int ux(int s) const { return s; }
  int uy(int s) const { return n_p2() + s; }
  int p(int v) const { return 2 * n_p2() + v; }

  // Local dofs: 3 vertices, then edges opposite vertex 0, 1, 2.
  const std::array<int, 6>& element_dofs(int e) const { return elem_dofs_[e]; }
  Vec2 p2_point(int s) const;
  // Local corner vertex (0..2) of element e, or -1 if it does not touch the origin.
  int corner_vertex(int e) const { return corner_vertex_[e]; }

  struct BoundaryFacet {
    int element = 0;
    int local_edge = 0;  // opposite local vertex
    int tag = 0;
    int a = 0, b = 0;    // mesh nodes in boundary orientation
  };
  const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }

  struct Geometry {
    std::array<Vec2, 3> v;
    double area = 0;
    std::array<Vec2, 3> grad_bary;
  };
  Geometry geometry(int e) const;
  Vec2 point(int e, const Eigen::Vector3d& bary) const;

 private:
  TriMesh mesh_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 6>> elem_dofs_;
  std::vector<int> corner_vertex_;
  std::vector<BoundaryFacet> facets_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;
DiscretizationPtr make_discretization(TriMesh mesh);

// P2 shape functions and their gradients at barycentric point L.
std::array<double, 6> p2_values(const Eigen::Vector3d& L);
std::array<Vec2, 6> p2_gradients(const Eigen::Vector3d& L, const std::array<Vec2, 3>& grad_bary);

struct MixedField {
  DiscretizationPtr disc;
  MaterialParams material;
  Eigen::VectorXd x;
  double gauge_shift = 0.0;  // record of the constant already removed from the pressure dofs

  Vec2 velocity(int e, const Eigen::Vector3d& L) const;
  Mat2 velocity_grad(int e, const Eigen::Vector3d& L) const;  // G(j,k) = d u_j / d x_k
  double pressure(int e, const Eigen::Vector3d& L) const;
};

MixedField operator-(const MixedField& a, const MixedField& b);
MixedField operator*(double s, const MixedField& a);

struct SparseSystem {
  DiscretizationPtr disc;
  MaterialParams material;
  Eigen::SparseMatrix<double> K;  // unconstrained block matrix
  Eigen::VectorXd rhs;
  std::vector<char> constrained;
  Eigen::VectorXd values;  // prescribed values at constrained dofs
  bool gauge_fixed = false;
};

SparseSystem assemble(DiscretizationPtr disc, const MaterialParams& material,
                      const VectorField& f = nullptr, const ScalarField& zeta = nullptr);

// Load vector only (same layout as assemble's rhs).
Eigen::VectorXd assemble_load(const Discretization& disc, const VectorField& f,
                              const ScalarField& zeta);

// traces[j-1] gives the Dirichlet data on Gamma_j.
void apply_dirichlet(SparseSystem& sys, const std::vector<VectorField>& traces,
                     double consistency_tol = 1e-10);
// Pins one pressure dof; the solution is shifted to zero mean afterwards.
void fix_pressure_gauge(SparseSystem& sys);

// Factorization of the constrained matrix, reusable for new loads and data.
class MixedSolver {
 public:
  explicit MixedSolver(const SparseSystem& sys);
  ~MixedSolver();
  MixedSolver(const MixedSolver&) = delete;
  MixedSolver& operator=(const MixedSolver&) = delete;

  MixedField solve(const Eigen::VectorXd& load, const Eigen::VectorXd& values) const;
  MixedField solve(const SparseSystem& sys) const { return solve(sys.rhs, sys.values); }
  double last_residual() const { return last_residual_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  DiscretizationPtr disc_;
  MaterialParams material_;
  Eigen::SparseMatrix<double> K_;
  std::vector<char> constrained_;
  bool gauge_ = false;
  mutable double last_residual_ = 0.0;
};

MixedField solve(const SparseSystem& sys);

// Dirichlet values vector for given traces (used with MixedSolver).
Eigen::VectorXd dirichlet_values(const Discretization& disc, const std::vector<VectorField>& traces,
                                 double consistency_tol = 1e-10);

struct FieldNorms {
  double h1_semi = 0;     // |u|_1
  double l2_velocity = 0; // ||u||_0
  double h1 = 0;          // ||u||_1
  double l2_pressure = 0; // ||p||_0
};

FieldNorms norms(const MixedField& field, int degree = 6);
FieldNorms norms(const MixedField& a, const MixedField& b, int degree = 6);

struct PointSample {
  Vec2 u = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
  double p = 0.0;
};
using SampleFn = std::function<PointSample(int e, const Eigen::Vector3d& L, const Vec2& x)>;

// Norms of an arbitrary pointwise field; elements touching the origin use a
// rule graded toward the corner.
FieldNorms integrate_norms(const Discretization& disc, const SampleFn& sample, int degree = 6,
                           bool corner_graded = true);

// Quadrature points (element, barycentric, weight) for element e; corner
// elements can use a graded rule.
struct ElementRule {
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> w;  // physical weights
};
ElementRule element_rule(const Discretization& disc, int e, int degree, bool corner_graded);

// Pressure mean (integral / area).
double pressure_mean(const MixedField& field);

}  // namespace siflab
