#include "siflab/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "siflab/error.hpp"

namespace siflab {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  double s = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + s * d - p).norm();
}

}  // namespace

double TriMesh::tri_area(int k) const {
  const auto& t = tris[k];
  return signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (int k = 0; k < static_cast<int>(tris.size()); ++k) s += tri_area(k);
  return s;
}

double TriMesh::diameter(int k) const {
  const auto& t = tris[k];
  double d = 0.0;
  for (int e = 0; e < 3; ++e) d = std::max(d, (nodes[t[e]] - nodes[t[(e + 1) % 3]]).norm());
  return d;
}

void validate_mesh(const TriMesh& mesh, const CornerPolygon* polygon) {
  if (mesh.tris.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no triangles");
  const int nn = static_cast<int>(mesh.nodes.size());
  std::unordered_map<std::uint64_t, int> count;
  for (int k = 0; k < static_cast<int>(mesh.tris.size()); ++k) {
    const auto& t = mesh.tris[k];
    for (int v : t)
      if (v < 0 || v >= nn) throw Error(ErrorCode::NonConforming, "node index out of range");
    if (!(mesh.tri_area(k) > 0)) {
      std::ostringstream os;
      os << "triangle " << k << " has non-positive signed area";
      throw Error(ErrorCode::NegativeArea, os.str());
    }
    for (int e = 0; e < 3; ++e) ++count[edge_key(t[e], t[(e + 1) % 3])];
  }
  std::unordered_set<std::uint64_t> tagged;
  for (const auto& be : mesh.bedges) {
    auto it = count.find(edge_key(be.a, be.b));
    if (it == count.end() || it->second != 1)
      throw Error(ErrorCode::NonConforming, "tagged edge is not a boundary edge of the mesh");
    if (!tagged.insert(edge_key(be.a, be.b)).second)
      throw Error(ErrorCode::NonConforming, "boundary edge tagged twice");
  }
  for (const auto& [key, c] : count)
    if (c > 2) throw Error(ErrorCode::NonConforming, "edge shared by more than two triangles");
  for (const auto& [key, c] : count) {
    if (c == 1 && !tagged.count(key)) {
      std::ostringstream os;
      os << "boundary edge (" << (key >> 32) << ", " << (key & 0xffffffffu) << ") has no tag";
      throw Error(ErrorCode::UntaggedBoundaryEdge, os.str());
    }
  }
  if (!polygon) return;
  const int J = polygon->edge_count();
  const double scale = polygon->perimeter();
  double tagged_length = 0.0;
  for (const auto& be : mesh.bedges) {
    if (be.tag < 1 || be.tag > J)
      throw Error(ErrorCode::NonConforming, "boundary tag outside 1..J");
    const PolygonEdge& pe = polygon->edge(be.tag);
    for (int v : {be.a, be.b})
      if (point_segment_distance(mesh.nodes[v], pe.a, pe.b) > 1e-12 * scale)
        throw Error(ErrorCode::NonConforming, "tagged edge does not lie on its polygon edge");
    tagged_length += (mesh.nodes[be.a] - mesh.nodes[be.b]).norm();
  }
  if (std::abs(tagged_length - scale) > 1e-12 * scale)
    throw Error(ErrorCode::NonConforming, "tagged edges do not cover the polygon boundary");
  if (std::abs(mesh.total_area() - polygon->area()) > 1e-12 * polygon->area())
    throw Error(ErrorCode::NonConforming, "mesh area differs from polygon area");
}

namespace {

// Triangles are stored as (peak, b, c); the refinement edge is (b, c).
struct Bisector {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<BoundaryEdge> bedges;

  double size(const std::array<int, 3>& t) const {
    double d = 0.0;
    for (int e = 0; e < 3; ++e) d = std::max(d, (nodes[t[e]] - nodes[t[(e + 1) % 3]]).norm());
    return d / std::sqrt(2.0);
  }

  double corner_distance(const std::array<int, 3>& t) const {
    return std::min({nodes[t[0]].norm(), nodes[t[1]].norm(), nodes[t[2]].norm()});
  }

  // One bisection pass over all triangles whose refinement edge is marked,
  // after closing the marked set so that no hanging nodes remain.
  void refine(std::unordered_set<std::uint64_t> marked) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& t : tris) {
        std::uint64_t ref = edge_key(t[1], t[2]);
        if (marked.count(ref)) continue;
        if (marked.count(edge_key(t[0], t[1])) || marked.count(edge_key(t[2], t[0]))) {
          marked.insert(ref);
          changed = true;
        }
      }
    }
    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = edge_key(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      nodes.push_back(0.5 * (nodes[a] + nodes[b]));
      int id = static_cast<int>(nodes.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> work = std::move(tris), out;
    tris.clear();
    while (!work.empty()) {
      auto t = work.back();
      work.pop_back();
      if (!marked.count(edge_key(t[1], t[2]))) {
        out.push_back(t);
        continue;
      }
      int m = midpoint(t[1], t[2]);
      work.push_back({m, t[0], t[1]});
      work.push_back({m, t[2], t[0]});
    }
    std::vector<BoundaryEdge> be;
    for (const auto& e : bedges) {
      if (marked.count(edge_key(e.a, e.b))) {
        int m = midpoint(e.a, e.b);
        be.push_back({e.a, m, e.tag});
        be.push_back({m, e.b, e.tag});
      } else {
        be.push_back(e);
      }
    }
    bedges = std::move(be);
    std::sort(out.begin(), out.end());
    tris = std::move(out);
  }
};

}  // namespace

TriMesh generate_lshape_mesh(const CornerPolygon& polygon, double h, double ratio, int levels) {
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "h must be positive");
  if (levels < 0) throw Error(ErrorCode::InvalidArgument, "levels must be >= 0");
  if (levels > 0 && !(ratio > 0 && ratio < 1))
    throw Error(ErrorCode::InvalidArgument, "grading ratio must lie in (0, 1)");
  const auto& V = polygon.vertices();
  const int J = polygon.edge_count();
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (int k = 0; k < J; ++k) {
    const PolygonEdge& e = polygon.edge(k + 1);
    if (std::abs(e.a.x() - e.b.x()) > 1e-14 && std::abs(e.a.y() - e.b.y()) > 1e-14)
      throw Error(ErrorCode::UnsupportedPolygon, "polygon edges must be axis-aligned");
    for (double c : {V[k].x(), V[k].y()}) {
      double n = c / h;
      if (std::abs(n - std::round(n)) > 1e-9)
        throw Error(ErrorCode::UnsupportedPolygon, "polygon vertices must lie on the h-grid");
    }
    xmin = std::min(xmin, V[k].x());
    xmax = std::max(xmax, V[k].x());
    ymin = std::min(ymin, V[k].y());
    ymax = std::max(ymax, V[k].y());
  }
  const long i0 = std::lround(xmin / h), i1 = std::lround(xmax / h);
  const long j0 = std::lround(ymin / h), j1 = std::lround(ymax / h);

  Bisector b;
  std::map<std::pair<long, long>, int> node_id;
  auto node = [&](long i, long j) {
    auto it = node_id.find({i, j});
    if (it != node_id.end()) return it->second;
    b.nodes.emplace_back(i * h, j * h);
    int id = static_cast<int>(b.nodes.size()) - 1;
    node_id.emplace(std::make_pair(i, j), id);
    return id;
  };
  std::map<std::pair<long, long>, bool> cell_in;
  for (long i = i0; i < i1; ++i) {
    for (long j = j0; j < j1; ++j) {
      Vec2 c((i + 0.5) * h, (j + 0.5) * h);
      if (!polygon.point_inside(c)) continue;
      cell_in[{i, j}] = true;
      int p00 = node(i, j), p10 = node(i + 1, j), p01 = node(i, j + 1), p11 = node(i + 1, j + 1);
      if (c.x() * c.y() > 0) {
        b.tris.push_back({p10, p11, p00});
        b.tris.push_back({p01, p00, p11});
      } else {
        b.tris.push_back({p00, p10, p01});
        b.tris.push_back({p11, p01, p10});
      }
    }
  }
  auto inside = [&](long i, long j) { return cell_in.count({i, j}) > 0; };
  auto tag_of = [&](const Vec2& a, const Vec2& c) {
    for (int k = 1; k <= J; ++k) {
      const PolygonEdge& e = polygon.edge(k);
      if (point_segment_distance(a, e.a, e.b) < 1e-12 && point_segment_distance(c, e.a, e.b) < 1e-12)
        return k;
    }
    throw Error(ErrorCode::UnsupportedPolygon, "boundary grid edge not on a polygon edge");
  };
  for (const auto& [ij, in] : cell_in) {
    auto [i, j] = ij;
    // edges listed counterclockwise around the cell
    struct Side { long di, dj; std::pair<long, long> a, c; };
    const Side sides[4] = {{0, -1, {i, j}, {i + 1, j}},
                           {1, 0, {i + 1, j}, {i + 1, j + 1}},
                           {0, 1, {i + 1, j + 1}, {i, j + 1}},
                           {-1, 0, {i, j + 1}, {i, j}}};
    for (const auto& s : sides) {
      if (inside(i + s.di, j + s.dj)) continue;
      int a = node(s.a.first, s.a.second), c = node(s.c.first, s.c.second);
      b.bedges.push_back({a, c, tag_of(b.nodes[a], b.nodes[c])});
    }
  }

  if (levels > 0) {
    const double R0 = 2.0 * h;
    auto target = [&](double d) {
      int k = 0;
      if (d <= 0) {
        k = levels;
      } else if (d < R0) {
        k = std::min(levels, static_cast<int>(std::floor(std::log(d / R0) / std::log(ratio))) + 1);
      }
      return h * std::pow(ratio, k);
    };
    for (int pass = 0; pass < 8 * levels + 8; ++pass) {
      std::unordered_set<std::uint64_t> marked;
      for (const auto& t : b.tris)
        if (b.size(t) > target(b.corner_distance(t)) * (1 + 1e-9)) marked.insert(edge_key(t[1], t[2]));
      if (marked.empty()) break;
      b.refine(std::move(marked));
    }
  }

  TriMesh mesh;
  mesh.nodes = std::move(b.nodes);
  mesh.tris = std::move(b.tris);
  mesh.bedges = std::move(b.bedges);
  mesh.grading_ratio = ratio;
  mesh.grading_levels = levels;
  std::ostringstream os;
  os << "lshape-h" << h << "-q" << ratio << "-L" << levels;
  mesh.id = os.str();
  validate_mesh(mesh, &polygon);
  return mesh;
}

TriMesh generate_rectangle_mesh(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "need at least one cell");
  TriMesh m;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (int i = 0; i < nx; ++i) {
    m.bedges.push_back({id(i, 0), id(i + 1, 0), 1});
    m.bedges.push_back({id(i + 1, ny), id(i, ny), 3});
  }
  for (int j = 0; j < ny; ++j) {
    m.bedges.push_back({id(nx, j), id(nx, j + 1), 2});
    m.bedges.push_back({id(0, j + 1), id(0, j), 4});
  }
  std::ostringstream os;
  os << "rect-" << nx << "x" << ny;
  m.id = os.str();
  validate_mesh(m);
  return m;
}

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;
  std::string line;
  double grading_ratio = 0.0;
  int grading_levels = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) {
        double q;
        int l;
        if (std::sscanf(line.c_str() + hash, "# grading ratio %lf levels %d", &q, &l) == 2) {
          grading_ratio = q;
          grading_levels = l;
        }
        line.erase(hash);
      }
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }

  [[noreturn]] void fail(size_t col, const std::string& msg) const {
    std::ostringstream os;
    os << "line " << line_no << ", column " << col + 1 << ": " << msg;
    throw Error(ErrorCode::ParseError, os.str());
  }

  // Splits the current line into tokens with their starting columns.
  std::vector<std::pair<std::string, size_t>> tokens() const {
    std::vector<std::pair<std::string, size_t>> out;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      size_t s = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      out.emplace_back(line.substr(s, i - s), s);
    }
    return out;
  }

  template <class T>
  T number(const std::pair<std::string, size_t>& tok) const {
    T v{};
    const char* b = tok.first.data();
    const char* e = b + tok.first.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) fail(tok.second, "malformed number '" + tok.first + "'");
    return v;
  }

  long header(const char* keyword) {
    if (!next()) fail(0, std::string("expected '") + keyword + " <count>', found end of input");
    auto t = tokens();
    if (t.size() != 2 || t[0].first != keyword)
      fail(t.empty() ? 0 : t[0].second, std::string("expected '") + keyword + " <count>'");
    long n = number<long>(t[1]);
    if (n < 0) fail(t[1].second, "negative count");
    return n;
  }

  std::vector<std::pair<std::string, size_t>> record(size_t fields, const char* what) {
    if (!next()) fail(0, std::string("unexpected end of input in ") + what + " block");
    auto t = tokens();
    if (t.size() != fields) {
      std::ostringstream os;
      os << "expected " << fields << " fields in " << what << " record, found " << t.size();
      fail(t.size() > fields ? t[fields].second : line.size(), os.str());
    }
    return t;
  }
};

}  // namespace

TriMesh load_mesh(const std::string& text, const CornerPolygon* polygon) {
  LineReader r(text);
  TriMesh m;
  long nn = r.header("nodes");
  for (long k = 0; k < nn; ++k) {
    auto t = r.record(2, "nodes");
    m.nodes.emplace_back(r.number<double>(t[0]), r.number<double>(t[1]));
  }
  long nt = r.header("tris");
  for (long k = 0; k < nt; ++k) {
    auto t = r.record(3, "tris");
    std::array<int, 3> tri{};
    for (int c = 0; c < 3; ++c) {
      tri[c] = r.number<int>(t[c]);
      if (tri[c] < 0 || tri[c] >= nn) r.fail(t[c].second, "node index out of range");
    }
    m.tris.push_back(tri);
  }
  long nb = r.header("bedges");
  for (long k = 0; k < nb; ++k) {
    auto t = r.record(3, "bedges");
    BoundaryEdge e{r.number<int>(t[0]), r.number<int>(t[1]), r.number<int>(t[2])};
    if (e.a < 0 || e.a >= nn) r.fail(t[0].second, "node index out of range");
    if (e.b < 0 || e.b >= nn) r.fail(t[1].second, "node index out of range");
    m.bedges.push_back(e);
  }
  if (r.next()) r.fail(0, "unexpected content after bedges block");
  m.id = "file";
  m.grading_ratio = r.grading_ratio;
  m.grading_levels = r.grading_levels;
  validate_mesh(m, polygon);
  return m;
}

std::string serialize_mesh(const TriMesh& m) {
  std::ostringstream os;
  char buf[64];
  if (m.grading_levels > 0) {
    std::snprintf(buf, sizeof buf, "# grading ratio %.17g levels %d\n", m.grading_ratio, m.grading_levels);
    os << buf;
  }
  os << "nodes " << m.nodes.size() << "\n";
  for (const auto& p : m.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
    os << buf;
  }
  os << "tris " << m.tris.size() << "\n";
  for (const auto& t : m.tris) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "bedges " << m.bedges.size() << "\n";
  for (const auto& e : m.bedges) os << e.a << " " << e.b << " " << e.tag << "\n";
  return os.str();
}

}  // namespace siflab
