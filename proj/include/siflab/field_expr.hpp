#pragma once

#include <memory>
#include <string>
#include <vector>

#include "siflab/geometry.hpp"

namespace siflab {

struct ExprNode;

// Parsed scalar expression over x, y, r, theta with constants pi, omega1, omega2.
class FieldExpr {
 public:
  FieldExpr() = default;
  static FieldExpr parse(const std::string& text);

  double eval(double x, double y, const CornerFrame& frame) const;
  double eval(const Vec2& p, const CornerFrame& frame) const { return eval(p.x(), p.y(), frame); }
  std::string to_string() const;
  bool operator==(const FieldExpr& other) const;
  bool empty() const { return !root_; }
  // Number of top-level additive terms.
  int top_level_terms() const;

 private:
  std::shared_ptr<const ExprNode> root_;
};

// Vector field from two component expressions.
VectorField make_vector_field(const FieldExpr& fx, const FieldExpr& fy, const CornerFrame& frame);
ScalarField make_scalar_field(const FieldExpr& f, const CornerFrame& frame);

}  // namespace siflab
