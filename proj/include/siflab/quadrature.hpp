#pragma once

#include <vector>

#include "siflab/geometry.hpp"

namespace siflab {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [a, b], exact for degree 2n-1.
Rule1D gauss_nodes(int n, double a = -1.0, double b = 1.0);

// Composite Gauss rule on [a, b] graded geometrically toward `a`:
// panels [a + L q^{k+1}, a + L q^k] for k < levels, plus [a, a + L q^levels].
Rule1D graded_gauss(double a, double b, double ratio, int levels, int points);

// Uniform composite Gauss rule.
Rule1D composite_gauss(double a, double b, int panels, int points);

// Points on the reference triangle (0,0),(1,0),(0,1) given in barycentric form.
struct TriRule {
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> w;  // weights sum to 1/2
};

// Collapsed (Duffy) Gauss rule, exact for total degree `degree`.
TriRule triangle_rule(int degree);

// Rule collapsed at local vertex 0, graded radially toward it, with 2*points
// across the angle. Used where the
// integrand behaves like |x - vertex0|^(-a), a < 2.
TriRule vertex_graded_rule(double ratio, int levels, int points);

}  // namespace siflab
