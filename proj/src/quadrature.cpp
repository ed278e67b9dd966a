#include "siflab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "siflab/error.hpp"

namespace siflab {

namespace {

Rule1D legendre_reference(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        // one more pass to refresh the derivative at the converged node
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

const Rule1D& legendre_cached(int n) {
  static std::mutex m;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, legendre_reference(n)).first;
  return it->second;
}

void append_mapped(Rule1D& out, const Rule1D& ref, double a, double b) {
  double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (size_t i = 0; i < ref.x.size(); ++i) {
    out.x.push_back(c + h * ref.x[i]);
    out.w.push_back(h * ref.w[i]);
  }
}

}  // namespace

Rule1D gauss_nodes(int n, double a, double b) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "gauss order must be >= 1");
  Rule1D out;
  append_mapped(out, legendre_cached(n), a, b);
  return out;
}

Rule1D graded_gauss(double a, double b, double ratio, int levels, int points) {
  const Rule1D& ref = legendre_cached(points);
  Rule1D out;
  double len = b - a;
  double hi = 1.0;
  for (int k = 0; k < levels; ++k) {
    double lo = hi * ratio;
    append_mapped(out, ref, a + len * lo, a + len * hi);
    hi = lo;
  }
  append_mapped(out, ref, a, a + len * hi);
  return out;
}

Rule1D composite_gauss(double a, double b, int panels, int points) {
  const Rule1D& ref = legendre_cached(points);
  Rule1D out;
  for (int k = 0; k < panels; ++k)
    append_mapped(out, ref, a + (b - a) * k / panels, a + (b - a) * (k + 1) / panels);
  return out;
}

namespace {

// (u, v) in [0,1]^2 -> point u*((1-v) e1 + v e2) collapsed at vertex 0, Jacobian u.
TriRule collapsed(const Rule1D& ru, const Rule1D& rv) {
  TriRule t;
  for (size_t i = 0; i < ru.x.size(); ++i) {
    for (size_t j = 0; j < rv.x.size(); ++j) {
      double u = ru.x[i], v = rv.x[j];
      double l1 = u * (1.0 - v), l2 = u * v;
      t.bary.emplace_back(1.0 - l1 - l2, l1, l2);
      t.w.push_back(ru.w[i] * rv.w[j] * u);
    }
  }
  return t;
}

}  // namespace

TriRule triangle_rule(int degree) {
  int n = (degree + 3) / 2;
  return collapsed(gauss_nodes(n, 0.0, 1.0), gauss_nodes(n, 0.0, 1.0));
}

TriRule vertex_graded_rule(double ratio, int levels, int points) {
  Rule1D ru = graded_gauss(0.0, 1.0, ratio, levels, points);
  return collapsed(ru, gauss_nodes(2 * points, 0.0, 1.0));
}

}  // namespace siflab
