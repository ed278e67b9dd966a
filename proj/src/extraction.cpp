#include "siflab/extraction.hpp"

#include <cmath>

#include "siflab/error.hpp"
#include "siflab/quadrature.hpp"

namespace siflab {

namespace {

constexpr double kCornerTol = 1e-10;

// Rule for an edge parameter s in [0,1]; graded toward s = 0 or s = 1 when
// that end is the re-entrant corner.
Rule1D edge_rule(bool corner_at_start, bool corner_at_end) {
  if (corner_at_start) return graded_gauss(0.0, 1.0, 0.5, 30, 8);
  if (corner_at_end) {
    Rule1D r = graded_gauss(0.0, 1.0, 0.5, 30, 8);
    for (double& x : r.x) x = 1.0 - x;
    return r;
  }
  return composite_gauss(0.0, 1.0, 16, 8);
}

// Barycentric coordinates of x in element e.
Eigen::Vector3d barycentric(const Discretization& disc, int e, const Vec2& x) {
  const auto geo = disc.geometry(e);
  const Vec2 c = (geo.v[0] + geo.v[1] + geo.v[2]) / 3.0;
  Eigen::Vector3d L;
  for (int k = 0; k < 3; ++k) L[k] = 1.0 / 3.0 + geo.grad_bary[k].dot(x - c);
  return L;
}

// Pairing of a boundary field h with the weights (v, q) on one polygon edge:
// integral of mu h.dv/dn - (h.n) q. The analytic dual part and the discrete
// Psi part are integrated separately.
double edge_pairing(const CornerPolygon& polygon, int j, const VectorField& h, double mu,
                    const SingularMode& dual, double scale, const MixedField& psi) {
  const PolygonEdge& edge = polygon.edge(j);
  const int J = polygon.edge_count();
  const Vec2 n = edge.normal;
  double analytic = 0.0;
  {
    Rule1D q = edge_rule(j == 1, j == J);
    for (size_t k = 0; k < q.x.size(); ++k) {
      const Vec2 x = edge.point(q.x[k]);
      const Vec2 hv = h(x);
      if (hv.squaredNorm() == 0.0) continue;
      const Mat2 G = eval_grad_at(dual, x);
      const double p = pressure_at(dual, x);
      analytic += q.w[k] * scale * (mu * hv.dot(G * n) - hv.dot(n) * p);
    }
    analytic *= edge.length;
  }
  double discrete = 0.0;
  const Discretization& disc = *psi.disc;
  for (const auto& f : disc.boundary_facets()) {
    if (f.tag != j) continue;
    const Vec2 a = disc.mesh().nodes[f.a], b = disc.mesh().nodes[f.b];
    const bool at_a = a.norm() == 0.0, at_b = b.norm() == 0.0;
    Rule1D q = (at_a || at_b) ? edge_rule(at_a, at_b) : gauss_nodes(6, 0.0, 1.0);
    const double len = (b - a).norm();
    double s = 0.0;
    for (size_t k = 0; k < q.x.size(); ++k) {
      const Vec2 x = a + q.x[k] * (b - a);
      const Vec2 hv = h(x);
      if (hv.squaredNorm() == 0.0) continue;
      const Eigen::Vector3d L = barycentric(disc, f.element, x);
      const Mat2 G = psi.velocity_grad(f.element, L);
      const double p = psi.pressure(f.element, L);
      s += q.w[k] * (mu * hv.dot(G * n) - hv.dot(n) * p);
    }
    discrete += s * len;
  }
  return analytic + discrete;
}

void check_corner_data(const ProblemData& data, Family family) {
  const int J = data.polygon.edge_count();
  if (static_cast<int>(data.g.size()) != J)
    throw Error(ErrorCode::MissingEdgeData, "boundary data must give one field per edge");
  for (int j : {1, J}) {
    if (!data.g[j - 1]) throw Error(ErrorCode::MissingEdgeData, "missing data on a corner edge");
    if (data.g[j - 1](Vec2::Zero()).norm() > kCornerTol)
      throw Error(ErrorCode::CornerDataNonzero,
                  "boundary data on Gamma_" + std::to_string(j) + " does not vanish at the corner");
  }
  if (family == Family::Stokes && data.zeta && std::abs(data.zeta(Vec2::Zero())) > kCornerTol)
    throw Error(ErrorCode::ZetaCornerNonzero, "zeta does not vanish at the corner");
}

}  // namespace

ExtractionSetup prepare_extraction(Family family, const CornerPolygon& polygon, DiscretizationPtr disc,
                                   const MaterialParams& material) {
  ExtractionSetup s;
  s.family = family;
  s.polygon = polygon;
  s.disc = disc;
  s.material = material;
  const double omega = polygon.frame().omega();
  if (family == Family::Lame) {
    if (!(material.eps > 0))
      throw Error(ErrorCode::InvalidArgument, "penalized extraction needs eps > 0");
    s.table = lame_exponents(omega, material.lame_C());
    s.weight_scale = 1.0;
  } else {
    s.material.eps = 0.0;
    s.table = stokes_exponents(omega);
    s.weight_scale = material.mu;
  }
  const int count = std::min(2, s.table.mode_count);
  for (int i = 1; i <= count; ++i) {
    s.primal.push_back(make_mode(family, Kind::Primal, i, polygon.frame(), s.material, s.table));
    s.dual.push_back(make_mode(family, Kind::Dual, i, polygon.frame(), s.material, s.table));
    s.gamma.push_back(family == Family::Lame ? gamma_lame(s.primal.back(), s.dual.back())
                                             : gamma_stokes(s.primal.back(), s.dual.back()));
  }
  SparseSystem sys = assemble(disc, s.material);
  std::vector<VectorField> zero(polygon.edge_count(), [](const Vec2&) { return Vec2::Zero(); });
  apply_dirichlet(sys, zero);
  if (family == Family::Stokes) fix_pressure_gauge(sys);
  s.solver = std::make_shared<MixedSolver>(sys);
  for (int i = 1; i <= count; ++i) s.psi.push_back(solve_psi(s, i));
  return s;
}

MixedField solve_psi(const ExtractionSetup& setup, int i) {
  const int J = setup.polygon.edge_count();
  const SingularMode& dual = setup.dual.at(i - 1);
  const double scale = setup.weight_scale;
  std::vector<VectorField> traces(J);
  for (int j = 1; j <= J; ++j) {
    if (j == 1 || j == J)
      traces[j - 1] = [](const Vec2&) { return Vec2::Zero(); };
    else
      traces[j - 1] = [&dual, scale](const Vec2& x) -> Vec2 { return -scale * eval_at(dual, x); };
  }
  Eigen::VectorXd values = dirichlet_values(*setup.disc, traces);
  return setup.solver->solve(Eigen::VectorXd::Zero(setup.disc->n_dofs()), values);
}

MixedField solve_psi(int i, Family family, const MaterialParams& material, const CornerPolygon& polygon,
                     DiscretizationPtr disc) {
  return prepare_extraction(family, polygon, disc, material).psi.at(i - 1);
}

TermBreakdown compute_Ci(const ProblemData& data, const SingularMode& dual, double scale,
                         const MixedField& psi) {
  if (psi.disc != data.disc) throw Error(ErrorCode::MeshMismatch, "Psi field lives on another mesh");
  check_corner_data(data, dual.family);
  const Discretization& disc = *data.disc;
  const double mu = data.material.mu;
  TermBreakdown t;
  if (data.f || data.zeta) {
    double vol = 0.0;
    for (int e = 0; e < disc.n_elements(); ++e) {
      const ElementRule rule = element_rule(disc, e, 8, true);
      for (size_t q = 0; q < rule.w.size(); ++q) {
        const Vec2 x = disc.point(e, rule.bary[q]);
        double val = 0.0;
        if (data.f) {
          const Vec2 v = scale * eval_at(dual, x) + psi.velocity(e, rule.bary[q]);
          val += data.f(x).dot(v);
        }
        if (data.zeta) {
          const double qv = scale * pressure_at(dual, x) + psi.pressure(e, rule.bary[q]);
          val -= data.zeta(x) * qv;
        }
        vol += rule.w[q] * val;
      }
    }
    t.volume = vol;
  }
  t.total = t.volume;
  for (int j = 1; j <= data.polygon.edge_count(); ++j) {
    const double b = edge_pairing(data.polygon, j, data.g[j - 1], mu, dual, scale, psi);
    t.edges.push_back(b);
    t.total -= b;
  }
  return t;
}

TermBreakdown compute_Ci_penalized(const ProblemData& data, int i, const SingularMode& dual,
                                   const MixedField& psi) {
  if (dual.family != Family::Lame || dual.kind != Kind::Dual || dual.index != i)
    throw Error(ErrorCode::FamilyMismatch, "expected the penalized dual mode of index i");
  return compute_Ci(data, dual, 1.0, psi);
}

TermBreakdown compute_Ci_stokes(const ProblemData& data, int i, const SingularMode& dual,
                                const MixedField& psi) {
  if (dual.family != Family::Stokes || dual.kind != Kind::Dual || dual.index != i)
    throw Error(ErrorCode::FamilyMismatch, "expected the Stokes dual mode of index i");
  return compute_Ci(data, dual, data.material.mu, psi);
}

TermBreakdown compute_Cstar(const CornerPolygon& polygon, const VectorField& primal1, double mu,
                            const SingularMode& dual2, double scale, const MixedField& psi2) {
  TermBreakdown t;
  const int J = polygon.edge_count();
  for (int j = 1; j <= J; ++j) {
    double b = 0.0;
    if (j != 1 && j != J) b = edge_pairing(polygon, j, primal1, mu, dual2, scale, psi2);
    t.edges.push_back(b);
    t.total += b;
  }
  return t;
}

SifReport extract_sifs(const ExtractionSetup& s, const ProblemData& data) {
  if (data.disc != s.disc) throw Error(ErrorCode::MeshMismatch, "data and setup use different meshes");
  if (data.material.mu != s.material.mu ||
      (s.family == Family::Lame && data.material.eps != s.material.eps))
    throw Error(ErrorCode::InvalidArgument, "data and setup use different materials");
  SifReport r;
  r.family = s.family;
  r.eps = s.material.eps;
  r.mu = s.material.mu;
  r.mode_count = static_cast<int>(s.primal.size());
  r.mesh_id = s.disc->mesh().id;
  r.lambda1 = s.primal[0].lambda;
  r.gamma1 = s.gamma[0].gamma;
  r.terms1 = compute_Ci(data, s.dual[0], s.weight_scale, s.psi[0]);
  r.C1 = r.terms1.total;
  r.c1 = r.C1 / r.gamma1;
  r.has_c2 = r.mode_count >= 2;
  if (r.has_c2) {
    r.lambda2 = s.primal[1].lambda;
    r.gamma2 = s.gamma[1].gamma;
    r.terms2 = compute_Ci(data, s.dual[1], s.weight_scale, s.psi[1]);
    r.C2 = r.terms2.total;
    const SingularMode& p1 = s.primal[0];
    r.terms_star = compute_Cstar(s.polygon, [&p1](const Vec2& x) { return eval_at(p1, x); }, r.mu,
                                 s.dual[1], s.weight_scale, s.psi[1]);
    r.Cstar = r.terms_star.total;
    r.c2 = (r.C2 + r.c1 * r.Cstar) / r.gamma2;
  } else {
    r.c2 = std::nan("");
  }
  return r;
}

SifReport extract_sifs_penalized(const ProblemData& data) {
  return extract_sifs(prepare_extraction(Family::Lame, data.polygon, data.disc, data.material), data);
}

SifReport extract_sifs_stokes(const ProblemData& data) {
  return extract_sifs(prepare_extraction(Family::Stokes, data.polygon, data.disc, data.material), data);
}

MixedField solve_problem(const ExtractionSetup& s, const ProblemData& data) {
  if (data.disc != s.disc) throw Error(ErrorCode::MeshMismatch, "data and setup use different meshes");
  Eigen::VectorXd load = assemble_load(*s.disc, data.f, s.family == Family::Stokes ? data.zeta : nullptr);
  return s.solver->solve(load, dirichlet_values(*s.disc, data.g));
}

RegularPart regular_part(const MixedField& u, const SifReport& report,
                         const std::vector<SingularMode>& primal) {
  const std::vector<double> c = report.has_c2 ? std::vector<double>{report.c1, report.c2}
                                              : std::vector<double>{report.c1};
  if (primal.size() < c.size()) throw Error(ErrorCode::InvalidArgument, "missing primal modes");
  RegularPart rp;
  rp.w_nodal = u;
  const Discretization& disc = *u.disc;
  for (int s = 0; s < disc.n_p2(); ++s) {
    const Vec2 x = disc.p2_point(s);
    for (size_t i = 0; i < c.size(); ++i) {
      const Vec2 v = eval_at(primal[i], x);
      rp.w_nodal.x[disc.ux(s)] -= c[i] * v.x();
      rp.w_nodal.x[disc.uy(s)] -= c[i] * v.y();
    }
  }
  for (int v = 0; v < disc.n_vertices(); ++v) {
    const Vec2 x = disc.mesh().nodes[v];
    if (x.norm() == 0.0) continue;
    for (size_t i = 0; i < c.size(); ++i) rp.w_nodal.x[disc.p(v)] -= c[i] * pressure_at(primal[i], x);
  }
  const MixedField field = u;
  const std::vector<SingularMode> modes(primal.begin(), primal.begin() + c.size());
  rp.sample = [field, modes, c](int e, const Eigen::Vector3d& L, const Vec2& x) {
    PointSample s{field.velocity(e, L), field.velocity_grad(e, L), field.pressure(e, L)};
    for (size_t i = 0; i < c.size(); ++i) {
      s.u -= c[i] * eval_at(modes[i], x);
      s.grad -= c[i] * eval_grad_at(modes[i], x);
      s.p -= c[i] * pressure_at(modes[i], x);
    }
    return s;
  };
  return rp;
}

FieldNorms regular_difference_norms(const RegularPart& a, const RegularPart& b) {
  if (a.w_nodal.disc != b.w_nodal.disc)
    throw Error(ErrorCode::MeshMismatch, "regular parts live on different meshes");
  return integrate_norms(*a.w_nodal.disc, [&](int e, const Eigen::Vector3d& L, const Vec2& x) {
    PointSample sa = a.sample(e, L, x), sb = b.sample(e, L, x);
    return PointSample{sa.u - sb.u, sa.grad - sb.grad, sa.p - sb.p};
  });
}

}  // namespace siflab
