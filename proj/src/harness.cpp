#include "siflab/harness.hpp"

#include <chrono>
#include <cmath>

#include "siflab/error.hpp"

namespace siflab {

// stream function s = x^2 y + x y^2 + x^2 y^2, w = (ds/dy, -ds/dx)
Vec2 manufactured_w(const Vec2& p) {
  const double x = p.x(), y = p.y();
  return {x * x + 2 * x * y + 2 * x * x * y, -2 * x * y - y * y - 2 * x * y * y};
}

Mat2 manufactured_w_grad(const Vec2& p) {
  const double x = p.x(), y = p.y();
  Mat2 g;
  g << 2 * x + 2 * y + 4 * x * y, 2 * x + 2 * x * x,
      -2 * y - 2 * y * y, -2 * x - 2 * y - 4 * x * y;
  return g;
}

Vec2 manufactured_minus_laplacian_w(const Vec2& p) {
  return {-(2 + 4 * p.y()), 2 + 4 * p.x()};
}

ManufacturedCase make_manufactured(Family family, const CornerPolygon& polygon, const MaterialParams& material,
                                   double c1, double c2) {
  ManufacturedCase mc;
  mc.family = family;
  mc.material = material;
  mc.c1 = c1;
  mc.c2 = c2;
  const double omega = polygon.frame().omega();
  ExponentTable t;
  if (family == Family::Lame) {
    t = lame_exponents(omega, material.lame_C());
  } else {
    mc.material.eps = 0.0;
    t = stokes_exponents(omega);
  }
  const int count = std::min(2, t.mode_count);
  for (int i = 1; i <= count; ++i)
    mc.primal.push_back(make_mode(family, Kind::Primal, i, polygon.frame(), mc.material, t));
  if (count < 2) mc.c2 = 0.0;
  const auto modes = mc.primal;
  const double a1 = mc.c1, a2 = mc.c2;
  const double mu = material.mu;
  mc.w_poly = manufactured_w;
  mc.u = [modes, a1, a2](const Vec2& x) {
    Vec2 v = manufactured_w(x) + a1 * eval_at(modes[0], x);
    if (modes.size() > 1) v += a2 * eval_at(modes[1], x);
    return v;
  };
  // pressure: smooth x y (Stokes only) plus the singular pressures
  const bool stokes = family == Family::Stokes;
  mc.p = [modes, a1, a2, stokes](const Vec2& x) {
    double v = stokes ? x.x() * x.y() : 0.0;
    if (x.norm() == 0.0) return v;
    v += a1 * pressure_at(modes[0], x);
    if (modes.size() > 1) v += a2 * pressure_at(modes[1], x);
    return v;
  };
  mc.f = [mu, stokes](const Vec2& x) {
    Vec2 f = mu * manufactured_minus_laplacian_w(x);
    if (stokes) f += Vec2(x.y(), x.x());
    return f;
  };
  const int J = polygon.edge_count();
  for (int j = 1; j <= J; ++j) mc.g.push_back(mc.u);
  return mc;
}

ProblemData manufactured_data(const ManufacturedCase& mc, const CornerPolygon& polygon, DiscretizationPtr disc) {
  ProblemData d{polygon, disc, mc.material, mc.f, mc.zeta, mc.g};
  return d;
}

ManufacturedReport run_manufactured(const RunConfig& cfg) {
  const CornerPolygon polygon = config_polygon(cfg);
  Family family;
  if (cfg.manufactured_case == "penalized") family = Family::Lame;
  else if (cfg.manufactured_case == "stokes") family = Family::Stokes;
  else throw Error(ErrorCode::ConfigError, "manufactured.case must be penalized or stokes");
  if (family == Family::Lame && !(cfg.eps > 0))
    throw Error(ErrorCode::ConfigError, "penalized manufactured case needs material.eps > 0");
  const MaterialParams material{cfg.mu, family == Family::Lame ? cfg.eps : 0.0};
  ManufacturedCase mc = make_manufactured(family, polygon, material, cfg.c1, cfg.c2);
  std::vector<double> levels = cfg.h_levels.empty() ? std::vector<double>{cfg.h} : cfg.h_levels;

  ManufacturedReport rep;
  rep.family = family;
  rep.eps = material.eps;
  rep.c1_true = mc.c1;
  rep.c2_true = mc.c2;
  for (double h : levels) {
    auto disc = make_discretization(generate_lshape_mesh(polygon, h, cfg.grading_ratio, cfg.grading_levels));
    ProblemData data = manufactured_data(mc, polygon, disc);
    ManufacturedRow row;
    row.h = h;
    row.elements = disc->n_elements();
    row.report = family == Family::Lame ? extract_sifs_penalized(data) : extract_sifs_stokes(data);
    row.c1 = row.report.c1;
    row.c2 = row.report.has_c2 ? row.report.c2 : 0.0;
    row.err1 = std::abs(row.c1 - mc.c1);
    row.err2 = std::abs(row.c2 - mc.c2);
    row.rel1 = mc.c1 != 0 ? row.err1 / std::abs(mc.c1) : row.err1;
    row.rel2 = mc.c2 != 0 ? row.err2 / std::abs(mc.c2) : row.err2;
    rep.rows.push_back(row);
  }
  for (size_t k = 1; k < rep.rows.size(); ++k) {
    const auto& a = rep.rows[k - 1];
    const auto& b = rep.rows[k];
    const double lh = std::log(a.h / b.h);
    rep.rate1.push_back(std::log(a.err1 / b.err1) / lh);
    rep.rate2.push_back(std::log(a.err2 / b.err2) / lh);
  }
  return rep;
}

SweepResult run_eps_sweep(const RunConfig& cfg) {
  if (cfg.eps_grid.size() < 4)
    throw Error(ErrorCode::ConfigError, "material.eps_grid needs at least 4 values");
  for (size_t k = 0; k < cfg.eps_grid.size(); ++k) {
    if (!(cfg.eps_grid[k] > 0)) throw Error(ErrorCode::ConfigError, "eps_grid values must be positive");
    if (k > 0 && !(cfg.eps_grid[k] < cfg.eps_grid[k - 1]))
      throw Error(ErrorCode::ConfigError, "eps_grid must be strictly decreasing");
    if (cfg.eps_grid[k] < cfg.eps_floor)
      throw Error(ErrorCode::ConfigError, "eps_grid value below material.eps_floor");
  }
  const CornerPolygon polygon = config_polygon(cfg);
  auto disc = make_discretization(config_mesh(cfg, polygon));
  const ConfigFields fields = config_fields(cfg, polygon);
  const double mu = cfg.mu;

  SweepResult res;
  res.mesh_id = disc->mesh().id;
  const MaterialParams stokes_mat{mu, 0.0};
  ExtractionSetup ss = prepare_extraction(Family::Stokes, polygon, disc, stokes_mat);
  ProblemData sd{polygon, disc, stokes_mat, fields.f, fields.zeta, fields.g};
  res.stokes = extract_sifs(ss, sd);
  const MixedField us = solve_problem(ss, sd);
  const RegularPart rs = regular_part(us, res.stokes, ss.primal);
  const double c1s = res.stokes.c1, c2s = res.stokes.has_c2 ? res.stokes.c2 : 0.0;

  for (double eps : cfg.eps_grid) {
    const auto t0 = std::chrono::steady_clock::now();
    const MaterialParams mat{mu, eps};
    ExtractionSetup se = prepare_extraction(Family::Lame, polygon, disc, mat);
    ProblemData pd{polygon, disc, mat, fields.f, nullptr, fields.g};
    const SifReport r = extract_sifs(se, pd);
    const MixedField ue = solve_problem(se, pd);
    const RegularPart re = regular_part(ue, r, se.primal);
    const FieldNorms dn = regular_difference_norms(re, rs);
    SweepRecord row;
    row.eps = eps;
    row.lambda1 = r.lambda1;
    row.lambda2 = r.lambda2;
    row.gamma1 = r.gamma1;
    row.gamma2 = r.gamma2;
    row.c1 = r.c1;
    row.c2 = r.c2;
    row.c1s = c1s;
    row.c2s = c2s;
    row.dc1 = std::abs(r.c1 - c1s / mu);
    row.dc2 = std::abs(r.c2 - c2s / mu);
    row.w_h1 = dn.h1;
    row.sigma_l2 = dn.l2_pressure;
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.rows.push_back(row);
  }
  const auto& first = res.rows.front();
  const auto& last = res.rows.back();
  const double le = std::log(last.eps / first.eps);
  res.slope_dc1 = std::log(last.dc1 / first.dc1) / le;
  res.slope_dc2 = std::log(last.dc2 / first.dc2) / le;
  res.slope_regular = std::log((last.w_h1 + last.sigma_l2) / (first.w_h1 + first.sigma_l2)) / le;
  return res;
}

}  // namespace siflab
