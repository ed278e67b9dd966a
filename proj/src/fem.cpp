#include "siflab/fem.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <Eigen/UmfPackSupport>

#include "siflab/error.hpp"

namespace siflab {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Discretization::Discretization(TriMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.tris.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no triangles");
  std::unordered_map<std::uint64_t, int> edge_id;
  std::unordered_map<std::uint64_t, std::pair<int, int>> owner;
  const int nv = n_vertices();
  elem_dofs_.resize(mesh_.tris.size());
  corner_vertex_.assign(mesh_.tris.size(), -1);
  for (int e = 0; e < static_cast<int>(mesh_.tris.size()); ++e) {
    const auto& t = mesh_.tris[e];
    for (int k = 0; k < 3; ++k) elem_dofs_[e][k] = t[k];
    for (int k = 0; k < 3; ++k) {
      int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      auto key = edge_key(a, b);
      auto it = edge_id.find(key);
      if (it == edge_id.end()) {
        it = edge_id.emplace(key, static_cast<int>(edges_.size())).first;
        edges_.push_back({a, b});
        owner.emplace(key, std::make_pair(e, k));
      }
      elem_dofs_[e][3 + k] = nv + it->second;
    }
    for (int k = 0; k < 3; ++k)
      if (mesh_.nodes[t[k]].norm() == 0.0) corner_vertex_[e] = k;
  }
  for (const auto& be : mesh_.bedges) {
    auto it = owner.find(edge_key(be.a, be.b));
    if (it == owner.end()) throw Error(ErrorCode::NonConforming, "boundary edge not in mesh");
    facets_.push_back({it->second.first, it->second.second, be.tag, be.a, be.b});
  }
}

DiscretizationPtr make_discretization(TriMesh mesh) {
  return std::make_shared<const Discretization>(std::move(mesh));
}

Vec2 Discretization::p2_point(int s) const {
  if (s < n_vertices()) return mesh_.nodes[s];
  const auto& ed = edges_[s - n_vertices()];
  return 0.5 * (mesh_.nodes[ed[0]] + mesh_.nodes[ed[1]]);
}

Discretization::Geometry Discretization::geometry(int e) const {
  Geometry g;
  const auto& t = mesh_.tris[e];
  for (int k = 0; k < 3; ++k) g.v[k] = mesh_.nodes[t[k]];
  const Vec2 d1 = g.v[1] - g.v[0], d2 = g.v[2] - g.v[0];
  const double det = d1.x() * d2.y() - d1.y() * d2.x();
  g.area = 0.5 * det;
  // gradient of L_k is the rotated opposite edge over det
  for (int k = 0; k < 3; ++k) {
    const Vec2 opp = g.v[(k + 2) % 3] - g.v[(k + 1) % 3];
    g.grad_bary[k] = Vec2(-opp.y(), opp.x()) / det;
  }
  return g;
}

Vec2 Discretization::point(int e, const Eigen::Vector3d& L) const {
  const auto& t = mesh_.tris[e];
  return L[0] * mesh_.nodes[t[0]] + L[1] * mesh_.nodes[t[1]] + L[2] * mesh_.nodes[t[2]];
}

std::array<double, 6> p2_values(const Eigen::Vector3d& L) {
  return {L[0] * (2 * L[0] - 1), L[1] * (2 * L[1] - 1), L[2] * (2 * L[2] - 1),
          4 * L[1] * L[2],       4 * L[2] * L[0],       4 * L[0] * L[1]};
}

std::array<Vec2, 6> p2_gradients(const Eigen::Vector3d& L, const std::array<Vec2, 3>& g) {
  return {(4 * L[0] - 1) * g[0],
          (4 * L[1] - 1) * g[1],
          (4 * L[2] - 1) * g[2],
          4 * (L[2] * g[1] + L[1] * g[2]),
          4 * (L[0] * g[2] + L[2] * g[0]),
          4 * (L[1] * g[0] + L[0] * g[1])};
}

Vec2 MixedField::velocity(int e, const Eigen::Vector3d& L) const {
  const auto& d = disc->element_dofs(e);
  const auto N = p2_values(L);
  Vec2 u = Vec2::Zero();
  for (int k = 0; k < 6; ++k) u += N[k] * Vec2(x[disc->ux(d[k])], x[disc->uy(d[k])]);
  return u;
}

Mat2 MixedField::velocity_grad(int e, const Eigen::Vector3d& L) const {
  const auto& d = disc->element_dofs(e);
  const auto G = p2_gradients(L, disc->geometry(e).grad_bary);
  Mat2 J = Mat2::Zero();
  for (int k = 0; k < 6; ++k) {
    J.row(0) += x[disc->ux(d[k])] * G[k].transpose();
    J.row(1) += x[disc->uy(d[k])] * G[k].transpose();
  }
  return J;
}

double MixedField::pressure(int e, const Eigen::Vector3d& L) const {
  const auto& t = disc->mesh().tris[e];
  return L[0] * x[disc->p(t[0])] + L[1] * x[disc->p(t[1])] + L[2] * x[disc->p(t[2])];
}

MixedField operator-(const MixedField& a, const MixedField& b) {
  if (a.disc != b.disc) throw Error(ErrorCode::MeshMismatch, "fields live on different meshes");
  MixedField r = a;
  r.x = a.x - b.x;
  return r;
}

MixedField operator*(double s, const MixedField& a) {
  MixedField r = a;
  r.x = s * a.x;
  return r;
}

Eigen::VectorXd assemble_load(const Discretization& disc, const VectorField& f,
                              const ScalarField& zeta) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(disc.n_dofs());
  if (!f && !zeta) return b;
  const TriRule rule = triangle_rule(4);
  for (int e = 0; e < disc.n_elements(); ++e) {
    const auto geo = disc.geometry(e);
    const auto& d = disc.element_dofs(e);
    const auto& t = disc.mesh().tris[e];
    for (size_t q = 0; q < rule.w.size(); ++q) {
      const Eigen::Vector3d& L = rule.bary[q];
      const double w = rule.w[q] * 2 * geo.area;
      const Vec2 x = disc.point(e, L);
      if (f) {
        const Vec2 fv = f(x);
        const auto N = p2_values(L);
        for (int k = 0; k < 6; ++k) {
          b[disc.ux(d[k])] += w * fv.x() * N[k];
          b[disc.uy(d[k])] += w * fv.y() * N[k];
        }
      }
      if (zeta) {
        const double z = zeta(x);
        for (int k = 0; k < 3; ++k) b[disc.p(t[k])] -= w * z * L[k];
      }
    }
  }
  return b;
}

SparseSystem assemble(DiscretizationPtr disc, const MaterialParams& material, const VectorField& f,
                      const ScalarField& zeta) {
  if (!disc || disc->n_elements() == 0) throw Error(ErrorCode::EmptyMesh, "mesh has no triangles");
  if (!(material.mu > 0) || material.eps < 0)
    throw Error(ErrorCode::InvalidArgument, "need mu > 0 and eps >= 0");
  SparseSystem sys;
  sys.disc = disc;
  sys.material = material;
  const int n = disc->n_dofs();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(disc->n_elements()) * (2 * 36 + 2 * 36 + 9));
  const TriRule rule = triangle_rule(4);
  for (int e = 0; e < disc->n_elements(); ++e) {
    const auto geo = disc->geometry(e);
    const auto& d = disc->element_dofs(e);
    const auto& t = disc->mesh().tris[e];
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 3, 6> Bx = Eigen::Matrix<double, 3, 6>::Zero(), By = Bx;
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    for (size_t q = 0; q < rule.w.size(); ++q) {
      const Eigen::Vector3d& L = rule.bary[q];
      const double w = rule.w[q] * 2 * geo.area;
      const auto G = p2_gradients(L, geo.grad_bary);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) A(i, j) += w * material.mu * G[i].dot(G[j]);
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 6; ++j) {
          Bx(k, j) -= w * L[k] * G[j].x();
          By(k, j) -= w * L[k] * G[j].y();
        }
        for (int l = 0; l < 3; ++l) M(k, l) += w * L[k] * L[l];
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        trip.emplace_back(disc->ux(d[i]), disc->ux(d[j]), A(i, j));
        trip.emplace_back(disc->uy(d[i]), disc->uy(d[j]), A(i, j));
      }
    }
    for (int k = 0; k < 3; ++k) {
      const int pk = disc->p(t[k]);
      for (int j = 0; j < 6; ++j) {
        trip.emplace_back(pk, disc->ux(d[j]), Bx(k, j));
        trip.emplace_back(disc->ux(d[j]), pk, Bx(k, j));
        trip.emplace_back(pk, disc->uy(d[j]), By(k, j));
        trip.emplace_back(disc->uy(d[j]), pk, By(k, j));
      }
      if (material.eps > 0)
        for (int l = 0; l < 3; ++l) trip.emplace_back(pk, disc->p(t[l]), -material.eps * M(k, l));
    }
  }
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.makeCompressed();
  sys.rhs = assemble_load(*disc, f, zeta);
  sys.constrained.assign(n, 0);
  sys.values = Eigen::VectorXd::Zero(n);
  return sys;
}

Eigen::VectorXd dirichlet_values(const Discretization& disc, const std::vector<VectorField>& traces,
                                 double tol) {
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(disc.n_dofs());
  std::vector<int> seen_tag(disc.n_p2(), 0);
  const int nv = disc.n_vertices();
  for (const auto& f : disc.boundary_facets()) {
    if (f.tag < 1 || f.tag > static_cast<int>(traces.size()) || !traces[f.tag - 1])
      throw Error(ErrorCode::MissingEdgeData, "no Dirichlet data for boundary edge Gamma_" +
                                                  std::to_string(f.tag));
    const auto& d = disc.element_dofs(f.element);
    const int k = f.local_edge;
    const int nodes[3] = {d[(k + 1) % 3], d[(k + 2) % 3], d[3 + k]};
    for (int s : nodes) {
      const Vec2 g = traces[f.tag - 1](disc.p2_point(s));
      if (seen_tag[s] != 0) {
        const Vec2 old(vals[disc.ux(s)], vals[disc.uy(s)]);
        if (seen_tag[s] != f.tag && (old - g).norm() > tol * std::max(1.0, old.norm()))
          throw Error(ErrorCode::InconsistentEdgeData,
                      "Dirichlet data of Gamma_" + std::to_string(seen_tag[s]) + " and Gamma_" +
                          std::to_string(f.tag) + " disagree at a shared vertex");
        if (s < nv) continue;
      }
      seen_tag[s] = f.tag;
      vals[disc.ux(s)] = g.x();
      vals[disc.uy(s)] = g.y();
    }
  }
  return vals;
}

void apply_dirichlet(SparseSystem& sys, const std::vector<VectorField>& traces, double tol) {
  const Discretization& disc = *sys.disc;
  Eigen::VectorXd vals = dirichlet_values(disc, traces, tol);
  for (const auto& f : disc.boundary_facets()) {
    const auto& d = disc.element_dofs(f.element);
    const int k = f.local_edge;
    for (int s : {d[(k + 1) % 3], d[(k + 2) % 3], d[3 + k]}) {
      sys.constrained[disc.ux(s)] = sys.constrained[disc.uy(s)] = 1;
      sys.values[disc.ux(s)] = vals[disc.ux(s)];
      sys.values[disc.uy(s)] = vals[disc.uy(s)];
    }
  }
}

void fix_pressure_gauge(SparseSystem& sys) {
  const int dof = sys.disc->p(0);
  sys.constrained[dof] = 1;
  sys.values[dof] = 0.0;
  sys.gauge_fixed = true;
}

struct MixedSolver::Impl {
  Eigen::SparseMatrix<double> Kc;
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
};

MixedSolver::MixedSolver(const SparseSystem& sys)
    : impl_(std::make_unique<Impl>()),
      disc_(sys.disc),
      material_(sys.material),
      K_(sys.K),
      constrained_(sys.constrained),
      gauge_(sys.gauge_fixed) {
  if (sys.material.eps == 0.0 && !sys.gauge_fixed)
    throw Error(ErrorCode::SingularSystem,
                "eps = 0 leaves the constant pressure undetermined; fix the pressure gauge");
  const int n = static_cast<int>(K_.rows());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(K_.nonZeros() + n);
  for (int c = 0; c < K_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K_, c); it; ++it) {
      if (constrained_[it.row()] || constrained_[it.col()]) continue;
      trip.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int i = 0; i < n; ++i)
    if (constrained_[i]) trip.emplace_back(i, i, 1.0);
  impl_->Kc.resize(n, n);
  impl_->Kc.setFromTriplets(trip.begin(), trip.end());
  impl_->Kc.makeCompressed();
  impl_->lu.compute(impl_->Kc);
  if (impl_->lu.info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "factorization of the constrained system failed");
}

MixedSolver::~MixedSolver() = default;

MixedField MixedSolver::solve(const Eigen::VectorXd& load, const Eigen::VectorXd& values) const {
  const int n = static_cast<int>(K_.rows());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    if (constrained_[i]) g[i] = values[i];
  Eigen::VectorXd b = load - K_ * g;
  for (int i = 0; i < n; ++i)
    if (constrained_[i]) b[i] = g[i];
  Eigen::VectorXd x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success)
    throw Error(ErrorCode::SolverBreakdown, "triangular solves failed");
  const double bnorm = std::max(b.norm(), 1e-300);
  Eigen::VectorXd r = b - impl_->Kc * x;
  for (int it = 0; it < 3 && r.norm() > 1e-13 * bnorm; ++it) {
    x += impl_->lu.solve(r);
    r = b - impl_->Kc * x;
  }
  last_residual_ = b.norm() > 0 ? r.norm() / bnorm : r.norm();
  if (!std::isfinite(last_residual_) || last_residual_ > 1e-10)
    throw Error(ErrorCode::SolverBreakdown,
                "relative residual " + std::to_string(last_residual_) + " exceeds 1e-10");
  MixedField field;
  field.disc = disc_;
  field.material = material_;
  field.x = std::move(x);
  if (gauge_) {
    field.gauge_shift = pressure_mean(field);
    for (int v = 0; v < disc_->n_vertices(); ++v) field.x[disc_->p(v)] -= field.gauge_shift;
  }
  return field;
}

MixedField solve(const SparseSystem& sys) { return MixedSolver(sys).solve(sys); }

ElementRule element_rule(const Discretization& disc, int e, int degree, bool corner_graded) {
  static const TriRule graded = vertex_graded_rule(0.5, 16, 8);
  const double area = disc.geometry(e).area;
  ElementRule out;
  const int cv = disc.corner_vertex(e);
  if (corner_graded && cv >= 0) {
    for (size_t q = 0; q < graded.w.size(); ++q) {
      const auto& b = graded.bary[q];
      Eigen::Vector3d L;
      L[cv] = b[0];
      L[(cv + 1) % 3] = b[1];
      L[(cv + 2) % 3] = b[2];
      out.bary.push_back(L);
      out.w.push_back(graded.w[q] * 2 * area);
    }
    return out;
  }
  const TriRule rule = triangle_rule(degree);
  out.bary = rule.bary;
  for (double w : rule.w) out.w.push_back(w * 2 * area);
  return out;
}

FieldNorms integrate_norms(const Discretization& disc, const SampleFn& sample, int degree,
                           bool corner_graded) {
  double semi = 0, l2u = 0, l2p = 0;
  for (int e = 0; e < disc.n_elements(); ++e) {
    const ElementRule rule = element_rule(disc, e, degree, corner_graded);
    for (size_t q = 0; q < rule.w.size(); ++q) {
      const PointSample s = sample(e, rule.bary[q], disc.point(e, rule.bary[q]));
      semi += rule.w[q] * s.grad.squaredNorm();
      l2u += rule.w[q] * s.u.squaredNorm();
      l2p += rule.w[q] * s.p * s.p;
    }
  }
  FieldNorms n;
  n.h1_semi = std::sqrt(semi);
  n.l2_velocity = std::sqrt(l2u);
  n.h1 = std::sqrt(semi + l2u);
  n.l2_pressure = std::sqrt(l2p);
  return n;
}

FieldNorms norms(const MixedField& field, int degree) {
  if (degree < 4) throw Error(ErrorCode::InvalidArgument, "norm quadrature degree must be >= 4");
  return integrate_norms(
      *field.disc,
      [&](int e, const Eigen::Vector3d& L, const Vec2&) {
        return PointSample{field.velocity(e, L), field.velocity_grad(e, L), field.pressure(e, L)};
      },
      degree, false);
}

FieldNorms norms(const MixedField& a, const MixedField& b, int degree) {
  return norms(a - b, degree);
}

double pressure_mean(const MixedField& field) {
  const Discretization& disc = *field.disc;
  double s = 0, area = 0;
  for (int e = 0; e < disc.n_elements(); ++e) {
    const auto& t = disc.mesh().tris[e];
    const double a = disc.geometry(e).area;
    s += a * (field.x[disc.p(t[0])] + field.x[disc.p(t[1])] + field.x[disc.p(t[2])]) / 3.0;
    area += a;
  }
  return s / area;
}

}  // namespace siflab
