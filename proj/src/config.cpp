#include "siflab/config.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "siflab/error.hpp"

namespace siflab {

namespace pt = boost::property_tree;

namespace {

std::string unquote(std::string s) {
  boost::algorithm::trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    s = s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': '" + v + "' is not a number");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, v, boost::is_any_of(","));
  std::vector<double> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(to_double(key, p));
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  // Boost's INI reader only knows ';' comments
  std::istringstream in(text);
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = boost::algorithm::trim_copy(line);
    if (!t.empty() && t[0] == '#') continue;
    cleaned << line << "\n";
  }
  pt::ptree tree;
  try {
    std::istringstream src(cleaned.str());
    pt::read_ini(src, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  RunConfig c;
  for (const char* section : {"domain", "mesh", "material"})
    if (!tree.get_child_optional(section))
      throw Error(ErrorCode::ConfigError, std::string("missing required section [") + section + "]");

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'));
    if (!v) return std::nullopt;
    return unquote(*v);
  };
  auto num = [&](const std::string& path, double& dst) {
    if (auto v = get(path)) dst = to_double(path, *v);
  };

  if (auto v = get("domain.shape")) c.shape = *v;
  num("domain.size", c.size);
  if (auto v = get("domain.vertices")) {
    std::vector<std::string> pts;
    boost::algorithm::split(pts, *v, boost::is_any_of(";"));
    for (auto& p : pts) {
      boost::algorithm::trim(p);
      if (p.empty()) continue;
      std::istringstream ps(p);
      double x, y;
      if (!(ps >> x >> y)) throw Error(ErrorCode::ConfigError, "domain.vertices: bad point '" + p + "'");
      c.vertices.emplace_back(x, y);
    }
  }
  if (auto v = get("domain.corner")) c.corner = static_cast<int>(to_double("domain.corner", *v));
  if (auto v = get("domain.mesh_file")) c.mesh_file = *v;
  if (c.shape != "lshape" && c.shape != "polygon")
    throw Error(ErrorCode::ConfigError, "domain.shape must be lshape or polygon");
  if (c.shape == "polygon" && c.vertices.size() < 3)
    throw Error(ErrorCode::ConfigError, "domain.vertices needs at least 3 points");

  num("mesh.h", c.h);
  num("mesh.grading_ratio", c.grading_ratio);
  if (auto v = get("mesh.grading_levels")) c.grading_levels = static_cast<int>(to_double("mesh.grading_levels", *v));

  num("material.mu", c.mu);
  num("material.eps", c.eps);
  num("material.eps_floor", c.eps_floor);
  if (auto v = get("material.eps_grid")) c.eps_grid = to_list("material.eps_grid", *v);

  if (auto data = tree.get_child_optional("data")) {
    for (const auto& [key, val] : *data) {
      const std::string v = unquote(val.data());
      if (key == "f_x") c.f_x = v;
      else if (key == "f_y") c.f_y = v;
      else if (key == "zeta") c.zeta = v;
      else if (key.size() > 3 && key[0] == 'g' && (boost::algorithm::ends_with(key, "_x") ||
                                                   boost::algorithm::ends_with(key, "_y"))) {
        int edge = static_cast<int>(to_double(key, key.substr(1, key.size() - 3)));
        auto& slot = c.g[edge];
        (key.back() == 'x' ? slot.first : slot.second) = v;
      } else if (boost::algorithm::starts_with(key, "check_")) {
        std::string name = key.substr(6);
        int which = 0;
        if (boost::algorithm::ends_with(name, "_dx")) which = 1;
        if (boost::algorithm::ends_with(name, "_dy")) which = 2;
        if (which) name = name.substr(0, name.size() - 3);
        c.checks[name][which] = v;
      } else {
        throw Error(ErrorCode::ConfigError, "unknown key data." + key);
      }
    }
  }

  if (auto v = get("manufactured.case")) c.manufactured_case = *v;
  num("manufactured.c1", c.c1);
  num("manufactured.c2", c.c2);
  if (auto v = get("manufactured.h_levels")) c.h_levels = to_list("manufactured.h_levels", *v);

  num("solver.tol", c.tol);
  if (auto v = get("solver.max_iter")) c.max_iter = static_cast<int>(to_double("solver.max_iter", *v));
  if (auto v = get("output.path")) c.out_path = *v;
  if (auto v = get("output.format")) c.format = *v;
  if (c.format != "csv" && c.format != "json")
    throw Error(ErrorCode::ConfigError, "output.format must be csv or json");

  // every expression must parse
  auto check_expr = [](const std::string& what, const std::string& e) {
    if (e.empty()) return;
    try {
      FieldExpr::parse(e);
    } catch (const Error& err) {
      throw Error(ErrorCode::ConfigError, what + ": " + err.what());
    }
  };
  check_expr("data.f_x", c.f_x);
  check_expr("data.f_y", c.f_y);
  check_expr("data.zeta", c.zeta);
  for (const auto& [j, xy] : c.g) {
    check_expr("data.g" + std::to_string(j) + "_x", xy.first);
    check_expr("data.g" + std::to_string(j) + "_y", xy.second);
  }
  for (const auto& [name, e] : c.checks) {
    if (e[0].empty() || e[1].empty() || e[2].empty())
      throw Error(ErrorCode::ConfigError, "check_" + name + " needs the expression and both derivatives");
    for (const auto& s : e) check_expr("data.check_" + name, s);
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

CornerPolygon config_polygon(const RunConfig& cfg) {
  if (cfg.shape == "lshape") return lshape_polygon(cfg.size);
  return build_polygon(cfg.vertices, cfg.corner);
}

TriMesh config_mesh(const RunConfig& cfg, const CornerPolygon& polygon) {
  if (!cfg.mesh_file.empty()) {
    std::ifstream in(cfg.mesh_file);
    if (!in) throw Error(ErrorCode::IoError, "cannot open mesh file " + cfg.mesh_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_mesh(ss.str(), &polygon);
  }
  return generate_lshape_mesh(polygon, cfg.h, cfg.grading_ratio, cfg.grading_levels);
}

ConfigFields config_fields(const RunConfig& cfg, const CornerPolygon& polygon) {
  const CornerFrame& fr = polygon.frame();
  ConfigFields out;
  out.f = make_vector_field(FieldExpr::parse(cfg.f_x), FieldExpr::parse(cfg.f_y), fr);
  if (!cfg.zeta.empty()) out.zeta = make_scalar_field(FieldExpr::parse(cfg.zeta), fr);
  for (int j = 1; j <= polygon.edge_count(); ++j) {
    auto it = cfg.g.find(j);
    std::string gx = "0", gy = "0";
    if (it != cfg.g.end()) {
      if (!it->second.first.empty()) gx = it->second.first;
      if (!it->second.second.empty()) gy = it->second.second;
    }
    out.g.push_back(make_vector_field(FieldExpr::parse(gx), FieldExpr::parse(gy), fr));
  }
  if (!cfg.checks.empty()) {
    std::mt19937_64 rng(12345);
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (const auto& v : polygon.vertices()) {
      xmin = std::min(xmin, v.x());
      xmax = std::max(xmax, v.x());
      ymin = std::min(ymin, v.y());
      ymax = std::max(ymax, v.y());
    }
    std::uniform_real_distribution<double> ux(xmin, xmax), uy(ymin, ymax);
    for (const auto& [name, e] : cfg.checks) {
      FieldExpr f = FieldExpr::parse(e[0]), fx = FieldExpr::parse(e[1]), fy = FieldExpr::parse(e[2]);
      int done = 0;
      for (int attempt = 0; attempt < 10000 && done < 20; ++attempt) {
        Vec2 p(ux(rng), uy(rng));
        if (!polygon.point_inside(p) || p.norm() < 1e-2) continue;
        const double h = 1e-5;
        const double dx = (f.eval(p + Vec2(h, 0), fr) - f.eval(p - Vec2(h, 0), fr)) / (2 * h);
        const double dy = (f.eval(p + Vec2(0, h), fr) - f.eval(p - Vec2(0, h), fr)) / (2 * h);
        const double ex = fx.eval(p, fr), ey = fy.eval(p, fr);
        const double scale = std::max({1.0, std::abs(ex), std::abs(ey)});
        if (std::abs(dx - ex) > 1e-6 * scale || std::abs(dy - ey) > 1e-6 * scale)
          throw Error(ErrorCode::ConfigError, "derivative check '" + name +
                                                  "' fails finite differences at a sample point");
        ++done;
      }
    }
  }
  return out;
}

}  // namespace siflab
