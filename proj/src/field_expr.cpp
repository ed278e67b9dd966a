#include "siflab/field_expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "siflab/error.hpp"

namespace siflab {

enum class NodeType { Number, Variable, Constant, Negate, Binary, Call };

struct ExprNode {
  NodeType type = NodeType::Number;
  double value = 0.0;
  std::string name;  // variable, constant or function name
  char op = 0;       // + - * / ^
  std::vector<std::shared_ptr<const ExprNode>> args;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct Token {
  enum Kind { Number, Ident, Op, LParen, RParen, Comma, End } kind = End;
  std::string text;
  double value = 0.0;
  int line = 1, col = 1;
};

const char* const kFunctions[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "atan2", "abs"};
const char* const kVariables[] = {"x", "y", "r", "theta"};
const char* const kConstants[] = {"pi", "omega1", "omega2"};

template <class List>
bool contains(const List& list, const std::string& s) {
  for (const char* item : list)
    if (s == item) return true;
  return false;
}

[[noreturn]] void syntax_error(const Token& t, const std::string& expected) {
  std::ostringstream os;
  os << "line " << t.line << ", column " << t.col << ": expected " << expected << ", found "
     << (t.kind == Token::End ? std::string("end of input") : "'" + t.text + "'");
  throw Error(ErrorCode::SyntaxError, os.str());
}

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() &&
                                                        std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      t.kind = Token::Number;
      t.text = s.substr(i, j - i);
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (ec != std::errc() || p != t.text.data() + t.text.size()) syntax_error(t, "a number");
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Token::Ident;
      t.text = s.substr(i, j - i);
      advance(j - i);
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      t.kind = Token::Op;
      t.text = std::string(1, c);
      advance(1);
    } else if (c == '(' || c == ')' || c == ',') {
      t.kind = c == '(' ? Token::LParen : (c == ')' ? Token::RParen : Token::Comma);
      t.text = std::string(1, c);
      advance(1);
    } else {
      t.text = std::string(1, c);
      std::ostringstream os;
      os << "line " << t.line << ", column " << t.col << ": unexpected character '" << c << "'";
      throw Error(ErrorCode::SyntaxError, os.str());
    }
    out.push_back(t);
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->type = NodeType::Number;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    if (peek().kind != Token::End) syntax_error(peek(), "an operator or end of input");
    return e;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool is_op(char c) const { return peek().kind == Token::Op && peek().text[0] == c; }

  NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->type = NodeType::Binary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    NodePtr left = term();
    while (is_op('+') || is_op('-')) {
      char op = take().text[0];
      left = binary(op, left, term());
    }
    return left;
  }

  NodePtr term() {
    NodePtr left = unary();
    while (is_op('*') || is_op('/')) {
      char op = take().text[0];
      left = binary(op, left, unary());
    }
    return left;
  }

  NodePtr unary() {
    if (is_op('-')) {
      take();
      auto n = std::make_shared<ExprNode>();
      n->type = NodeType::Negate;
      n->args = {unary()};
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (is_op('^')) {
      take();
      return binary('^', base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token t = peek();
    if (t.kind == Token::Number) {
      take();
      return make_number(t.value);
    }
    if (t.kind == Token::LParen) {
      take();
      NodePtr e = expr();
      if (peek().kind != Token::RParen) syntax_error(peek(), "')'");
      take();
      return e;
    }
    if (t.kind == Token::Ident) {
      take();
      auto n = std::make_shared<ExprNode>();
      n->name = t.text;
      if (contains(kFunctions, t.text)) {
        if (peek().kind != Token::LParen) syntax_error(peek(), "'(' after function name");
        take();
        n->type = NodeType::Call;
        n->args.push_back(expr());
        while (peek().kind == Token::Comma) {
          take();
          n->args.push_back(expr());
        }
        if (peek().kind != Token::RParen) syntax_error(peek(), "')' or ','");
        take();
        const size_t want = t.text == "atan2" ? 2 : 1;
        if (n->args.size() != want) {
          std::ostringstream os;
          os << "line " << t.line << ", column " << t.col << ": " << t.text << " takes " << want
             << " argument(s)";
          throw Error(ErrorCode::SyntaxError, os.str());
        }
        return n;
      }
      if (contains(kVariables, t.text)) {
        n->type = NodeType::Variable;
        return n;
      }
      if (contains(kConstants, t.text)) {
        n->type = NodeType::Constant;
        return n;
      }
      std::ostringstream os;
      os << "line " << t.line << ", column " << t.col << ": unknown identifier '" << t.text << "'";
      throw Error(ErrorCode::UnknownIdentifier, os.str());
    }
    syntax_error(t, "a number, identifier or '('");
  }
};

struct EvalEnv {
  double x, y, r, theta, omega1, omega2;
};

[[noreturn]] void domain_error(const std::string& what) {
  throw Error(ErrorCode::EvalDomainError, what);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) domain_error(std::string(what) + " produced a non-finite value");
  return v;
}

double eval_node(const ExprNode& n, const EvalEnv& env) {
  switch (n.type) {
    case NodeType::Number:
      return n.value;
    case NodeType::Variable:
      if (n.name == "x") return env.x;
      if (n.name == "y") return env.y;
      if (n.name == "r") return env.r;
      return env.theta;
    case NodeType::Constant:
      if (n.name == "pi") return std::numbers::pi;
      if (n.name == "omega1") return env.omega1;
      return env.omega2;
    case NodeType::Negate:
      return -eval_node(*n.args[0], env);
    case NodeType::Binary: {
      const double a = eval_node(*n.args[0], env), b = eval_node(*n.args[1], env);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/':
          if (b == 0.0) domain_error("division by zero");
          return checked(a / b, "division");
        default: return checked(std::pow(a, b), "power");
      }
    }
    case NodeType::Call: {
      const double a = eval_node(*n.args[0], env);
      const std::string& f = n.name;
      if (f == "sin") return std::sin(a);
      if (f == "cos") return std::cos(a);
      if (f == "tan") return checked(std::tan(a), "tan");
      if (f == "exp") return checked(std::exp(a), "exp");
      if (f == "log") {
        if (!(a > 0)) domain_error("log of a non-positive value");
        return std::log(a);
      }
      if (f == "sqrt") {
        if (a < 0) domain_error("sqrt of a negative value");
        return std::sqrt(a);
      }
      if (f == "abs") return std::abs(a);
      return std::atan2(a, eval_node(*n.args[1], env));
    }
  }
  return 0.0;
}

int precedence(const ExprNode& n) {
  switch (n.type) {
    case NodeType::Binary:
      if (n.op == '+' || n.op == '-') return 1;
      if (n.op == '*' || n.op == '/') return 2;
      return 4;
    case NodeType::Negate:
      return 3;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

void print(const ExprNode& n, std::string& out) {
  auto child = [&out](const ExprNode& c, bool parens) {
    if (parens) out += "(";
    print(c, out);
    if (parens) out += ")";
  };
  switch (n.type) {
    case NodeType::Number: out += format_number(n.value); break;
    case NodeType::Variable:
    case NodeType::Constant: out += n.name; break;
    case NodeType::Negate:
      out += "-";
      child(*n.args[0], precedence(*n.args[0]) < 3);
      break;
    case NodeType::Binary: {
      const int p = precedence(n);
      const ExprNode& a = *n.args[0];
      const ExprNode& b = *n.args[1];
      if (n.op == '^') {
        child(a, precedence(a) <= 4);
        out += "^";
        child(b, precedence(b) < 3);
      } else {
        child(a, precedence(a) < p);
        out += (p == 1) ? std::string(" ") + n.op + " " : std::string(1, n.op);
        child(b, precedence(b) <= p);
      }
      break;
    }
    case NodeType::Call:
      out += n.name + "(";
      for (size_t k = 0; k < n.args.size(); ++k) {
        if (k) out += ", ";
        print(*n.args[k], out);
      }
      out += ")";
      break;
  }
}

bool equal(const ExprNode& a, const ExprNode& b) {
  if (a.type != b.type || a.op != b.op || a.name != b.name || a.args.size() != b.args.size())
    return false;
  if (a.type == NodeType::Number && !(a.value == b.value)) return false;
  for (size_t k = 0; k < a.args.size(); ++k)
    if (!equal(*a.args[k], *b.args[k])) return false;
  return true;
}

}  // namespace

FieldExpr FieldExpr::parse(const std::string& text) {
  FieldExpr e;
  e.root_ = Parser(tokenize(text)).parse_all();
  return e;
}

double FieldExpr::eval(double x, double y, const CornerFrame& frame) const {
  if (!root_) throw Error(ErrorCode::InvalidArgument, "empty expression");
  EvalEnv env{x, y, std::hypot(x, y), frame.theta_of(x, y), frame.omega1, frame.omega2};
  return eval_node(*root_, env);
}

std::string FieldExpr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

bool FieldExpr::operator==(const FieldExpr& other) const {
  if (!root_ || !other.root_) return !root_ && !other.root_;
  return equal(*root_, *other.root_);
}

int FieldExpr::top_level_terms() const {
  if (!root_) return 0;
  int count = 1;
  const ExprNode* n = root_.get();
  while (n->type == NodeType::Binary && (n->op == '+' || n->op == '-')) {
    ++count;
    n = n->args[0].get();
  }
  return count;
}

VectorField make_vector_field(const FieldExpr& fx, const FieldExpr& fy, const CornerFrame& frame) {
  return [fx, fy, frame](const Vec2& p) { return Vec2(fx.eval(p, frame), fy.eval(p, frame)); };
}

ScalarField make_scalar_field(const FieldExpr& f, const CornerFrame& frame) {
  return [f, frame](const Vec2& p) { return f.eval(p, frame); };
}

}  // namespace siflab
