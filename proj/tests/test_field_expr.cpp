#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <stack>

#include "siflab/error.hpp"
#include "siflab/field_expr.hpp"

using namespace siflab;

namespace {

constexpr double kPi = std::numbers::pi;
const CornerFrame kL{0.0, 1.5 * kPi};

ErrorCode parse_code(const std::string& s, std::string* msg = nullptr) {
  try {
    FieldExpr::parse(s);
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  FAIL("parsed without error: " << s);
  return ErrorCode::InvalidArgument;
}

double eval(const std::string& s, double x, double y, const CornerFrame& f = kL) {
  return FieldExpr::parse(s).eval(x, y, f);
}

// Independent evaluator: tokens to RPN via shunting-yard, then a value stack.
// Returns nullopt when evaluation leaves the domain.
struct Reference {
  double x, y, r, theta, w1, w2;

  struct Tok {
    enum K { Num, Id, Op, LP, RP, Comma } k;
    std::string s;
    double v = 0;
  };

  static std::vector<Tok> lex(const std::string& src) {
    std::vector<Tok> out;
    size_t i = 0;
    while (i < src.size()) {
      const char c = src[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        size_t used = 0;
        const double v = std::stod(src.substr(i), &used);
        out.push_back({Tok::Num, "", v});
        i += used;
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
        out.push_back({Tok::Id, src.substr(i, j - i)});
        i = j;
      } else if (c == '(') {
        out.push_back({Tok::LP, "("}), ++i;
      } else if (c == ')') {
        out.push_back({Tok::RP, ")"}), ++i;
      } else if (c == ',') {
        out.push_back({Tok::Comma, ","}), ++i;
      } else {
        out.push_back({Tok::Op, std::string(1, c)}), ++i;
      }
    }
    return out;
  }

  static int prec(const std::string& op) {
    if (op == "+" || op == "-") return 1;
    if (op == "*" || op == "/") return 2;
    if (op == "neg") return 3;
    return 4;
  }
  static bool right(const std::string& op) { return op == "^" || op == "neg"; }
  static bool is_fn(const std::string& s) {
    for (const char* f : {"sin", "cos", "tan", "exp", "log", "sqrt", "atan2", "abs"})
      if (s == f) return true;
    return false;
  }

  std::optional<double> operator()(const std::string& src) const {
    std::vector<Tok> rpn;
    std::vector<Tok> ops;
    bool expect_operand = true;
    for (const Tok& t : lex(src)) {
      switch (t.k) {
        case Tok::Num:
          rpn.push_back(t), expect_operand = false;
          break;
        case Tok::Id:
          if (is_fn(t.s)) {
            ops.push_back(t);
          } else {
            rpn.push_back(t), expect_operand = false;
          }
          break;
        case Tok::Op: {
          Tok o = t;
          if (expect_operand && t.s == "-") {
            o.s = "neg";
            ops.push_back(o);
            break;
          }
          while (!ops.empty() && ops.back().k == Tok::Op &&
                 (prec(ops.back().s) > prec(o.s) || (prec(ops.back().s) == prec(o.s) && !right(o.s)))) {
            rpn.push_back(ops.back());
            ops.pop_back();
          }
          ops.push_back(o);
          expect_operand = true;
          break;
        }
        case Tok::LP:
          ops.push_back(t), expect_operand = true;
          break;
        case Tok::Comma:
          while (ops.back().k != Tok::LP) rpn.push_back(ops.back()), ops.pop_back();
          expect_operand = true;
          break;
        case Tok::RP:
          while (ops.back().k != Tok::LP) rpn.push_back(ops.back()), ops.pop_back();
          ops.pop_back();
          if (!ops.empty() && ops.back().k == Tok::Id) rpn.push_back(ops.back()), ops.pop_back();
          expect_operand = false;
          break;
      }
    }
    while (!ops.empty()) rpn.push_back(ops.back()), ops.pop_back();

    std::vector<double> st;
    auto pop = [&st] {
      const double v = st.back();
      st.pop_back();
      return v;
    };
    for (const Tok& t : rpn) {
      double v;
      if (t.k == Tok::Num) {
        v = t.v;
      } else if (t.k == Tok::Id && !is_fn(t.s)) {
        if (t.s == "x") v = x;
        else if (t.s == "y") v = y;
        else if (t.s == "r") v = r;
        else if (t.s == "theta") v = theta;
        else if (t.s == "pi") v = kPi;
        else if (t.s == "omega1") v = w1;
        else v = w2;
      } else if (t.k == Tok::Id) {
        const double a = pop();
        if (t.s == "atan2") {
          v = std::atan2(pop(), a);
        } else if (t.s == "log") {
          if (!(a > 0)) return std::nullopt;
          v = std::log(a);
        } else if (t.s == "sqrt") {
          if (a < 0) return std::nullopt;
          v = std::sqrt(a);
        } else if (t.s == "sin") v = std::sin(a);
        else if (t.s == "cos") v = std::cos(a);
        else if (t.s == "tan") v = std::tan(a);
        else if (t.s == "exp") v = std::exp(a);
        else v = std::fabs(a);
      } else if (t.s == "neg") {
        v = -pop();
      } else {
        const double b = pop(), a = pop();
        if (t.s == "+") v = a + b;
        else if (t.s == "-") v = a - b;
        else if (t.s == "*") v = a * b;
        else if (t.s == "/") {
          if (b == 0) return std::nullopt;
          v = a / b;
        } else v = std::pow(a, b);
      }
      if (!std::isfinite(v)) return std::nullopt;
      st.push_back(v);
    }
    return st.back();
  }
};

double ref_theta(double x, double y, const CornerFrame& f) {
  double t = std::atan2(y, x);
  const double lo = f.bisector() - kPi;
  while (t < lo) t += 2 * kPi;
  while (t >= lo + 2 * kPi) t -= 2 * kPi;
  return t;
}

// Random expression text with explicit and implicit precedence.
struct Gen {
  std::mt19937& rng;
  bool transcendental;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string leaf() {
    static const char* vars[] = {"x", "y", "r", "theta", "pi", "omega1", "omega2"};
    if (pick(3) == 0) {
      const int n = 1 + pick(9);
      return pick(2) ? std::to_string(n) : std::to_string(n) + ".25";
    }
    return vars[pick(7)];
  }

  std::string expr(int depth) {
    if (depth == 0) return leaf();
    const int k = pick(transcendental ? 8 : 5);
    switch (k) {
      case 0: return expr(depth - 1) + " + " + expr(depth - 1);
      case 1: return expr(depth - 1) + " - " + expr(depth - 1);
      case 2: return expr(depth - 1) + "*" + expr(depth - 1);
      case 3: return "(" + expr(depth - 1) + ")";
      case 4: return "-" + expr(depth - 1);
      case 5: {
        static const char* fns[] = {"sin", "cos", "exp", "log", "sqrt", "abs", "tan"};
        return std::string(fns[pick(7)]) + "(" + expr(depth - 1) + ")";
      }
      case 6: return pick(2) ? expr(depth - 1) + "/" + expr(depth - 1)
                             : "atan2(" + expr(depth - 1) + ", " + expr(depth - 1) + ")";
      default: return "(" + expr(depth - 1) + ")^" + leaf();
    }
  }
};

double ulps(double a, double b) {
  if (a == b) return 0;
  return std::abs(a - b) / (std::nextafter(std::abs(b), INFINITY) - std::abs(b));
}

}  // namespace

TEST_CASE("top-level terms") {
  CHECK(FieldExpr::parse("x^2*y - sin(theta)").top_level_terms() == 2);
  CHECK(FieldExpr::parse("x").top_level_terms() == 1);
  CHECK(FieldExpr::parse("(x + y)*2").top_level_terms() == 1);
  CHECK(FieldExpr::parse("x + y - 1 + r").top_level_terms() == 4);
}

TEST_CASE("syntax errors carry the position") {
  std::string msg;
  CHECK(parse_code("x +", &msg) == ErrorCode::SyntaxError);
  CHECK(msg.find("column 4") != std::string::npos);
  CHECK(parse_code("(x", &msg) == ErrorCode::SyntaxError);
  CHECK(parse_code("x y") == ErrorCode::SyntaxError);
  CHECK(parse_code("sin x") == ErrorCode::SyntaxError);
  CHECK(parse_code("atan2(x)") == ErrorCode::SyntaxError);
  CHECK(parse_code("x # 2") == ErrorCode::SyntaxError);
  CHECK(parse_code("x +\n  * y", &msg) == ErrorCode::SyntaxError);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(parse_code("") == ErrorCode::SyntaxError);
}

TEST_CASE("unknown identifiers") {
  CHECK(parse_code("z + 1") == ErrorCode::UnknownIdentifier);
  CHECK(parse_code("sinh(x)") == ErrorCode::UnknownIdentifier);
  CHECK(parse_code("omega3") == ErrorCode::UnknownIdentifier);
}

TEST_CASE("precedence table") {
  CHECK(eval("2^3^2", 0, 0) == 512.0);
  CHECK(eval("-2^2", 0, 0) == -4.0);
  CHECK(eval("2*3^2", 0, 0) == 18.0);
  CHECK(eval("1 - 2 - 3", 0, 0) == -4.0);
  CHECK(eval("8/4/2", 0, 0) == 1.0);
  CHECK(eval("2^-1", 0, 0) == 0.5);
  CHECK(eval("-3*-2", 0, 0) == 6.0);
  CHECK(eval("(1 + 2)*3", 0, 0) == 9.0);
  CHECK(eval("1 + 2*3", 0, 0) == 7.0);
  CHECK(eval("atan2(1, 1)*4", 0, 0) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("variables and constants") {
  const CornerFrame f{-kPi / 2, kPi};
  CHECK(eval("r^0.5", 1, 0, f) == 1.0);
  CHECK(eval("r", 3, 4) == 5.0);
  CHECK(eval("omega1", 0, 1, f) == -kPi / 2);
  CHECK(eval("omega2 - omega1", 0, 1, f) == doctest::Approx(1.5 * kPi));
  CHECK(eval("pi", 0, 0) == kPi);
  CHECK(eval("x*y", 2, -3) == -6.0);
}

TEST_CASE("domain errors are tagged") {
  auto code = [](const std::string& s, double x, double y) {
    try {
      eval(s, x, y);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code("x/y", 1, 0) == ErrorCode::EvalDomainError);
  CHECK(code("log(x)", -1, 0) == ErrorCode::EvalDomainError);
  CHECK(code("log(x)", 0, 1) == ErrorCode::EvalDomainError);
  CHECK(code("sqrt(x)", -1, 0) == ErrorCode::EvalDomainError);
  CHECK(code("x^0.5", -1, 1) == ErrorCode::EvalDomainError);
  CHECK(code("exp(1000*x)", 1, 0) == ErrorCode::EvalDomainError);
  CHECK_NOTHROW(eval("sqrt(x)", 0, 1));
}

TEST_CASE("printing is canonical") {
  for (const char* s : {"x^2*y - sin(theta)", "2^3^2", "(2^3)^2", "-x^2", "(-x)^2", "1 - (2 - 3)",
                        "1 - 2 - 3", "x/(y*r)", "x/y*r", "atan2(y, -x) + abs(-r)", "-(-x)", "1e-3*x",
                        "omega2 - omega1 + pi", "0.1 + 1.5e10"}) {
    FieldExpr e = FieldExpr::parse(s);
    const std::string once = e.to_string();
    FieldExpr again = FieldExpr::parse(once);
    CHECK(again == e);
    CHECK(again.to_string() == once);
    CHECK(again.eval(0.3, 0.7, kL) == e.eval(0.3, 0.7, kL));
  }
}

TEST_CASE("random expressions against a reference evaluator") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1);
  for (bool trans : {false, true}) {
    Gen gen{rng, trans};
    int compared = 0, domain = 0;
    for (int k = 0; k < 1000; ++k) {
      double x, y;
      do {
        x = U(rng), y = U(rng);
      } while (x < 0 && y < 0);  // L-shape interior
      const std::string text = gen.expr(1 + gen.pick(4));
      Reference ref{x, y, std::hypot(x, y), ref_theta(x, y, kL), kL.omega1, kL.omega2};
      const std::optional<double> want = ref(text);
      FieldExpr e = FieldExpr::parse(text);
      // printed form must evaluate identically
      FieldExpr printed = FieldExpr::parse(e.to_string());
      if (!want) {
        CHECK_THROWS_AS(e.eval(x, y, kL), Error);
        ++domain;
        continue;
      }
      const double got = e.eval(x, y, kL);
      INFO(text);
      if (trans)
        CHECK(ulps(got, *want) <= 1.0);
      else
        CHECK(got == *want);
      CHECK(printed.eval(x, y, kL) == got);
      ++compared;
    }
    CHECK(compared > 500);
    MESSAGE("compared " << compared << ", domain " << domain);
  }
}

TEST_CASE("theta is continuous through the sector") {
  double prev = kL.theta_of(1.0, 0.0);
  CHECK(prev == 0.0);
  for (int k = 1; k <= 3000; ++k) {
    const double t = 1.5 * kPi * k / 3000;
    const double th = eval("theta", std::cos(t), std::sin(t));
    CHECK(std::abs(th - prev) < 1e-2);
    CHECK(th == doctest::Approx(t).epsilon(1e-13));
    prev = th;
  }
  CHECK(eval("theta", 0, -1) == doctest::Approx(1.5 * kPi));
  CHECK(eval("theta", -1, 1e-300) == doctest::Approx(kPi));
  CHECK(eval("theta", -1, -1e-300) == doctest::Approx(kPi));
}

TEST_CASE("vector and scalar field adapters") {
  VectorField v = make_vector_field(FieldExpr::parse("x + 1"), FieldExpr::parse("y*theta"), kL);
  Vec2 a = v(Vec2(0.5, 0.5));
  CHECK(a.x() == 1.5);
  CHECK(a.y() == doctest::Approx(0.5 * kPi / 4));
  ScalarField s = make_scalar_field(FieldExpr::parse("r^2"), kL);
  CHECK(s(Vec2(3, 4)) == doctest::Approx(25.0));
}
