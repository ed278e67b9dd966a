#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siflab/angular.hpp"
#include "siflab/config.hpp"
#include "siflab/error.hpp"
#include "siflab/extraction.hpp"
#include "siflab/harness.hpp"
#include "siflab/report.hpp"

using namespace siflab;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Family parse_family(const std::string& s) {
  if (s == "lame" || s == "penalized") return Family::Lame;
  if (s == "stokes") return Family::Stokes;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + s + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + item + "'");
    }
  }
  return out;
}

// lo,hi,n -> n log-spaced values from hi down to lo
std::vector<double> log_grid(const std::string& spec) {
  auto v = parse_list(spec);
  if (v.size() != 3 || v[0] <= 0 || v[1] <= 0 || v[2] < 2)
    throw Error(ErrorCode::InvalidArgument, "--eps-grid expects lo,hi,n");
  const int n = static_cast<int>(v[2]);
  double lo = std::min(v[0], v[1]), hi = std::max(v[0], v[1]);
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(hi * std::pow(lo / hi, double(k) / (n - 1)));
  return out;
}

std::string field_csv(const MixedField& u) {
  const auto& d = *u.disc;
  std::vector<char> seen(d.n_p2(), 0);
  std::vector<std::array<double, 5>> rows(d.n_p2());
  static const Eigen::Vector3d nodes[6] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                           {0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}};
  for (int e = 0; e < d.n_elements(); ++e) {
    const auto& dofs = d.element_dofs(e);
    for (int k = 0; k < 6; ++k) {
      if (seen[dofs[k]]) continue;
      seen[dofs[k]] = 1;
      Vec2 x = d.point(e, nodes[k]);
      Vec2 v = u.velocity(e, nodes[k]);
      rows[dofs[k]] = {x.x(), x.y(), v.x(), v.y(), u.pressure(e, nodes[k])};
    }
  }
  std::ostringstream os;
  os << "node,x,y,ux,uy,p\n";
  for (int s = 0; s < d.n_p2(); ++s) {
    os << s;
    for (double v : rows[s]) os << "," << num(v);
    os << "\n";
  }
  return os.str();
}

ProblemData config_problem(const RunConfig& cfg, const CornerPolygon& poly, DiscretizationPtr disc,
                           const MaterialParams& mat) {
  auto fields = config_fields(cfg, poly);
  return ProblemData{poly, disc, mat, fields.f, fields.zeta, fields.g};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sif-lab: corner singularity coefficients for penalized and Stokes flow"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out = "-", format;
  app.add_option("--out", out, "output path, - for stdout");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string family = "lame", kind = "primal", at, eps_grid, config;
  double omega = 1.5 * M_PI, mu = 1.0, eps = 1e-3;
  int index = 1;

  auto* eigen = app.add_subcommand("eigen", "corner exponents");
  eigen->add_option("--family", family)->required();
  eigen->add_option("--omega", omega)->required();
  eigen->add_option("--mu", mu);
  eigen->add_option("--eps", eps);

  auto* mode = app.add_subcommand("mode", "evaluate a singular mode");
  mode->add_option("--family", family)->required();
  mode->add_option("--kind", kind)->check(CLI::IsMember({"primal", "dual"}));
  mode->add_option("--index", index);
  mode->add_option("--omega", omega)->required();
  mode->add_option("--mu", mu);
  mode->add_option("--eps", eps);
  mode->add_option("--at", at, "r,theta")->required();

  auto* gamma = app.add_subcommand("gamma", "normalizer integrals");
  auto* ident = app.add_subcommand("identity-check", "I+J identity on a grid");
  for (auto* sc : {gamma, ident}) {
    sc->add_option("--family", family);
    sc->add_option("--index", index);
    sc->add_option("--omega", omega)->required();
    sc->add_option("--mu", mu);
    sc->add_option("--eps", eps);
    sc->add_option("--eps-grid", eps_grid, "lo,hi,n");
  }

  auto* solve_cmd = app.add_subcommand("solve", "solve the boundary value problem");
  auto* extract = app.add_subcommand("extract", "extract coefficients");
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep");
  auto* manuf = app.add_subcommand("manufactured", "manufactured recovery study");
  for (auto* sc : {solve_cmd, extract, sweep, manuf}) sc->add_option("--config", config)->required();
  solve_cmd->add_option("--eps", eps);
  extract->add_option("--family", family);
  extract->add_option("--eps", eps);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eigen) {
      Family fam = parse_family(family);
      MaterialParams mat{mu, eps};
      ExponentTable t = fam == Family::Stokes ? stokes_exponents(omega) : lame_exponents(omega, mat.lame_C());
      std::ostringstream os;
      os << "family,omega,C,e1,e2,e3,M_or_N,res1,res2,res3\n"
         << (fam == Family::Stokes ? "stokes" : "lame") << "," << num(omega) << "," << num(t.C);
      for (double e : t.exponents) os << "," << num(e);
      os << "," << t.mode_count;
      for (double r : t.residuals) os << "," << num(r);
      os << "\n";
      emit_text(os.str(), out);
    } else if (*mode) {
      Family fam = parse_family(family);
      auto rt = parse_list(at);
      if (rt.size() != 2) throw Error(ErrorCode::InvalidArgument, "--at expects r,theta");
      MaterialParams mat{mu, fam == Family::Stokes ? 0.0 : eps};
      CornerFrame frame{0.0, omega};
      ExponentTable t = fam == Family::Stokes ? stokes_exponents(omega) : lame_exponents(omega, mat.lame_C());
      SingularMode m = make_mode(fam, kind == "dual" ? Kind::Dual : Kind::Primal, index, frame, mat, t);
      Vec2 v = siflab::eval(m, rt[0], rt[1]);
      Mat2 g = eval_grad(m, rt[0], rt[1]);
      std::ostringstream os;
      os << "r,theta,exponent,ux,uy,dux_dx,dux_dy,duy_dx,duy_dy,div,pressure\n"
         << num(rt[0]) << "," << num(rt[1]) << "," << num(m.exponent) << "," << num(v.x()) << ","
         << num(v.y()) << "," << num(g(0, 0)) << "," << num(g(0, 1)) << "," << num(g(1, 0)) << ","
         << num(g(1, 1)) << "," << num(eval_div(m, rt[0], rt[1])) << ","
         << num(pressure(m, rt[0], rt[1])) << "\n";
      emit_text(os.str(), out);
    } else if (*gamma || *ident) {
      Family fam = parse_family(family);
      std::vector<double> grid = eps_grid.empty() ? std::vector<double>{eps} : log_grid(eps_grid);
      std::ostringstream os;
      if (*gamma) {
        os << "family,index,eps,gamma,order,error_estimate\n";
        if (fam == Family::Stokes) grid = {0.0};
        for (double e : grid) {
          AngularIntegrals a = fam == Family::Stokes ? gamma_stokes(index, omega, mu)
                                                     : gamma_lame(index, omega, MaterialParams{mu, e});
          os << (fam == Family::Stokes ? "stokes" : "lame") << "," << index << "," << num(a.eps) << ","
             << num(a.gamma) << "," << a.order << "," << num(a.error_estimate) << "\n";
        }
      } else {
        os << "index,eps,max_deviation,scale,sup_K\n";
        for (double e : grid) {
          IdentityReport r = check_ij_identity(index, omega, MaterialParams{mu, e});
          os << index << "," << num(e) << "," << num(r.max_deviation) << "," << num(r.scale) << ","
             << num(r.sup_K) << "\n";
        }
      }
      emit_text(os.str(), out);
    } else {
      RunConfig cfg = load_config_file(config);
      if (out == "-" && cfg.out_path != "-") out = cfg.out_path;
      if (format.empty()) format = cfg.format;
      if (*solve_cmd) {
        if (solve_cmd->count("--eps") == 0) eps = cfg.eps;
        CornerPolygon poly = config_polygon(cfg);
        auto disc = make_discretization(config_mesh(cfg, poly));
        MaterialParams mat{cfg.mu, eps};
        auto fields = config_fields(cfg, poly);
        SparseSystem sys = assemble(disc, mat, fields.f, fields.zeta);
        apply_dirichlet(sys, fields.g);
        if (eps == 0.0) fix_pressure_gauge(sys);
        MixedSolver solver(sys);
        MixedField u = solver.solve(sys);
        emit_text(field_csv(u), out);
        FieldNorms n = norms(u);
        std::cerr << "mesh " << disc->mesh().id << " elements " << disc->n_elements() << " dofs "
                  << disc->n_dofs() << "\n"
                  << "h1 " << num(n.h1) << " h1_semi " << num(n.h1_semi) << " l2_velocity "
                  << num(n.l2_velocity) << " l2_pressure " << num(n.l2_pressure) << " residual "
                  << num(solver.last_residual()) << "\n";
      } else if (*extract) {
        Family fam = extract->count("--family") ? parse_family(family) : Family::Lame;
        if (extract->count("--eps") == 0) eps = cfg.eps;
        CornerPolygon poly = config_polygon(cfg);
        auto disc = make_discretization(config_mesh(cfg, poly));
        MaterialParams mat{cfg.mu, fam == Family::Stokes ? 0.0 : eps};
        ExtractionSetup setup = prepare_extraction(fam, poly, disc, mat);
        SifReport r = extract_sifs(setup, config_problem(cfg, poly, disc, mat));
        if (format == "json") {
          emit(r, "json", out);
          std::cerr << sif_csv_row(r) << "\n";
        } else {
          emit(r, "csv", out);
        }
      } else if (*sweep) {
        emit(run_eps_sweep(cfg), format, out);
      } else if (*manuf) {
        emit(run_manufactured(cfg), format, out);
      }
    }
  } catch (const Error& e) {
    std::cerr << "sif-lab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sif-lab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
