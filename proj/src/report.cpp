#include "siflab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "siflab/error.hpp"

namespace siflab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json terms_json(const TermBreakdown& t) {
  return {{"volume", t.volume}, {"edges", t.edges}, {"total", t.total}};
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "eps",  "lambda1", "lambda2", "gamma1", "gamma2",  "c1",      "c2",
      "c1s", "c2s",     "dc1",     "dc2",    "w_h1_diff", "sigma_l2_diff", "wall_time"};
  return cols;
}

nlohmann::json to_json(const SifReport& r) {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["family"] = r.family == Family::Lame ? "penalized" : "stokes";
  j["eps"] = r.eps;
  j["mu"] = r.mu;
  j["mesh"] = r.mesh_id;
  j["lambda1"] = r.lambda1;
  j["gamma1"] = r.gamma1;
  j["C1"] = r.C1;
  j["c1"] = r.c1;
  if (r.has_c2) {
    j["lambda2"] = r.lambda2;
    j["gamma2"] = r.gamma2;
    j["C2"] = r.C2;
    j["Cstar"] = r.Cstar;
    j["c2"] = number_or_null(r.c2);
  } else {
    j["gamma2"] = nullptr;
    j["C2"] = nullptr;
    j["Cstar"] = nullptr;
    j["c2"] = nullptr;
  }
  j["terms"] = {{"C1", terms_json(r.terms1)}};
  if (r.has_c2) {
    j["terms"]["C2"] = terms_json(r.terms2);
    j["terms"]["Cstar"] = terms_json(r.terms_star);
  }
  return j;
}

nlohmann::json to_json(const SweepResult& s) {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["kind"] = "eps-sweep";
  j["mesh"] = s.mesh_id;
  j["columns"] = sweep_columns();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows)
    rows.push_back({r.eps, r.lambda1, r.lambda2, r.gamma1, r.gamma2, r.c1, r.c2, r.c1s, r.c2s, r.dc1,
                    r.dc2, r.w_h1, r.sigma_l2, r.wall_time});
  j["rows"] = rows;
  j["stokes"] = to_json(s.stokes);
  j["slopes"] = {{"dc1", s.slope_dc1}, {"dc2", s.slope_dc2}, {"regular", s.slope_regular}};
  return j;
}

nlohmann::json to_json(const ManufacturedReport& m) {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["kind"] = "manufactured";
  j["family"] = m.family == Family::Lame ? "penalized" : "stokes";
  j["eps"] = m.eps;
  j["c_true"] = {m.c1_true, m.c2_true};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m.rows)
    rows.push_back({{"h", r.h}, {"elements", r.elements}, {"c1", r.c1}, {"c2", r.c2},
                    {"err1", r.err1}, {"err2", r.err2}, {"rel1", r.rel1}, {"rel2", r.rel2}});
  j["rows"] = rows;
  j["rate1"] = m.rate1;
  j["rate2"] = m.rate2;
  return j;
}

std::string sif_csv_header() { return "family,eps,gamma1,gamma2,C1,C2,Cstar,c1,c2"; }

std::string sif_csv_row(const SifReport& r) {
  std::ostringstream os;
  os << (r.family == Family::Lame ? "penalized" : "stokes") << "," << fmt(r.eps) << "," << fmt(r.gamma1)
     << "," << (r.has_c2 ? fmt(r.gamma2) : "") << "," << fmt(r.C1) << "," << (r.has_c2 ? fmt(r.C2) : "")
     << "," << (r.has_c2 ? fmt(r.Cstar) : "") << "," << fmt(r.c1) << "," << (r.has_c2 ? fmt(r.c2) : "");
  return os.str();
}

std::string sweep_csv(const std::vector<SweepRecord>& rows) {
  std::ostringstream os;
  const auto& cols = sweep_columns();
  for (size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << "\n";
  for (const auto& r : rows) {
    const double v[] = {r.eps, r.lambda1, r.lambda2, r.gamma1, r.gamma2, r.c1, r.c2,
                        r.c1s, r.c2s, r.dc1, r.dc2, r.w_h1, r.sigma_l2, r.wall_time};
    for (size_t k = 0; k < std::size(v); ++k) os << (k ? "," : "") << fmt(v[k]);
    os << "\n";
  }
  return os.str();
}

std::string manufactured_csv(const ManufacturedReport& m) {
  std::ostringstream os;
  os << "h,elements,c1,c2,err1,err2,rel1,rel2\n";
  for (const auto& r : m.rows)
    os << fmt(r.h) << "," << r.elements << "," << fmt(r.c1) << "," << fmt(r.c2) << "," << fmt(r.err1)
       << "," << fmt(r.err2) << "," << fmt(r.rel1) << "," << fmt(r.rel2) << "\n";
  return os.str();
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoError, "write to stdout failed");
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

void emit(const SweepResult& s, const std::string& format, const std::string& path) {
  emit_text(format == "json" ? to_json(s).dump(2) + "\n" : sweep_csv(s.rows), path);
}

void emit(const SifReport& r, const std::string& format, const std::string& path) {
  emit_text(format == "json" ? to_json(r).dump(2) + "\n" : sif_csv_header() + "\n" + sif_csv_row(r) + "\n",
            path);
}

void emit(const ManufacturedReport& m, const std::string& format, const std::string& path) {
  emit_text(format == "json" ? to_json(m).dump(2) + "\n" : manufactured_csv(m), path);
}

}  // namespace siflab
