#include "ppwave/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <utility>

namespace ppwave {

// ---------------------------------------------------------------------------
// VarSpace

VarSpace::VarSpace(int n) : n_(n), periods_(static_cast<std::size_t>(n) + 2) {
  if (n < 1) fail(ErrorKind::Precondition, "VarSpace: n must be >= 1");
}

std::string VarSpace::coord_name(int idx) const {
  if (idx == U) return "u";
  if (idx == V) return "v";
  if (idx >= 2 && idx < dim()) return "x" + std::to_string(idx - 1);
  fail(ErrorKind::Precondition, "coordinate index out of range");
}

std::optional<int> VarSpace::coord_index(std::string_view name) const {
  if (name == "u") return U;
  if (name == "v") return V;
  if (name.size() >= 2 && name[0] == 'x') {
    int k = 0;
    auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
    if (ec == std::errc() && p == name.data() + name.size() && k >= 1 && k <= n_)
      return x(k - 1);
  }
  return std::nullopt;
}

void VarSpace::set_period(int idx, double period) {
  if (idx < 0 || idx >= dim())
    fail(ErrorKind::Precondition, "period: coordinate index out of range");
  if (!(period > 0.0))
    fail(ErrorKind::Precondition, "period must be strictly positive");
  periods_[static_cast<std::size_t>(idx)] = period;
}

std::optional<double> VarSpace::period(int idx) const {
  if (idx < 0 || idx >= dim()) return std::nullopt;
  return periods_[static_cast<std::size_t>(idx)];
}

// ---------------------------------------------------------------------------
// Node construction

namespace {

using NodePtr = Expr::NodePtr;

NodePtr make_node(Op op, double value, int var, int exponent, NodePtr a,
                  NodePtr b) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->var = var;
  n->exponent = exponent;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

const NodePtr& Expr::zero_node() {
  static const NodePtr zero = make_node(Op::Constant, 0.0, -1, 0, nullptr, nullptr);
  return zero;
}

Expr constant(double c) {
  return Expr(make_node(Op::Constant, c, -1, 0, nullptr, nullptr));
}

Expr variable(int index) {
  if (index < 0) fail(ErrorKind::Precondition, "variable index must be >= 0");
  return Expr(make_node(Op::Var, 0.0, index, 0, nullptr, nullptr));
}

Expr add(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return constant(a.constant_value() + b.constant_value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr(make_node(Op::Add, 0.0, -1, 0, a.ptr(), b.ptr()));
}

Expr neg(const Expr& a) {
  if (a.is_constant()) return constant(-a.constant_value());
  if (a.op() == Op::Neg) return Expr(a.node().a);
  return Expr(make_node(Op::Neg, 0.0, -1, 0, a.ptr(), nullptr));
}

Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant())
    return constant(a.constant_value() * b.constant_value());
  if (a.is_zero() || b.is_zero()) return constant(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  if (a.is_constant() && a.constant_value() == -1.0) return neg(b);
  if (b.is_constant() && b.constant_value() == -1.0) return neg(a);
  return Expr(make_node(Op::Mul, 0.0, -1, 0, a.ptr(), b.ptr()));
}

Expr div(const Expr& a, const Expr& b) {
  if (b.is_constant()) {
    if (b.constant_value() == 0.0)
      fail(ErrorKind::Domain, "division by constant zero");
    if (a.is_constant()) return constant(a.constant_value() / b.constant_value());
    if (b.constant_value() == 1.0) return a;
  }
  return Expr(make_node(Op::Div, 0.0, -1, 0, a.ptr(), b.ptr()));
}

Expr intpow(const Expr& a, int k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  if (a.is_constant()) return constant(std::pow(a.constant_value(), k));
  return Expr(make_node(Op::IntPow, 0.0, -1, k, a.ptr(), nullptr));
}

namespace {
Expr make_unary(Op op, const Expr& a, double (*f)(double)) {
  if (a.is_constant()) {
    if (op == Op::Ln && !(a.constant_value() > 0.0))
      fail(ErrorKind::Domain, "ln of non-positive constant");
    return constant(f(a.constant_value()));
  }
  return Expr(make_node(op, 0.0, -1, 0, a.ptr(), nullptr));
}
}  // namespace

Expr sin(const Expr& a) { return make_unary(Op::Sin, a, std::sin); }
Expr cos(const Expr& a) { return make_unary(Op::Cos, a, std::cos); }
Expr exp(const Expr& a) { return make_unary(Op::Exp, a, std::exp); }
Expr ln(const Expr& a) { return make_unary(Op::Ln, a, std::log); }

// ---------------------------------------------------------------------------
// Differentiation

Expr diff(const Expr& e, int var) {
  const auto& n = e.node();
  switch (n.op) {
    case Op::Constant:
      return constant(0.0);
    case Op::Var:
      return constant(n.var == var ? 1.0 : 0.0);
    case Op::Add:
      return add(diff(Expr(n.a), var), diff(Expr(n.b), var));
    case Op::Neg:
      return neg(diff(Expr(n.a), var));
    case Op::Mul: {
      Expr a(n.a), b(n.b);
      return add(mul(diff(a, var), b), mul(a, diff(b, var)));
    }
    case Op::Div: {
      Expr a(n.a), b(n.b);
      Expr num = sub(mul(diff(a, var), b), mul(a, diff(b, var)));
      return div(num, intpow(b, 2));
    }
    case Op::IntPow: {
      Expr a(n.a);
      return mul(mul(constant(n.exponent), intpow(a, n.exponent - 1)),
                 diff(a, var));
    }
    case Op::Sin:
      return mul(cos(Expr(n.a)), diff(Expr(n.a), var));
    case Op::Cos:
      return neg(mul(sin(Expr(n.a)), diff(Expr(n.a), var)));
    case Op::Exp:
      return mul(exp(Expr(n.a)), diff(Expr(n.a), var));
    case Op::Ln:
      return div(diff(Expr(n.a), var), Expr(n.a));
  }
  fail(ErrorKind::Precondition, "diff: unreachable op");
}

// ---------------------------------------------------------------------------
// Evaluation

double eval(const Expr& e, std::span<const double> point) {
  const auto& n = e.node();
  switch (n.op) {
    case Op::Constant:
      return n.value;
    case Op::Var:
      if (n.var < 0 || static_cast<std::size_t>(n.var) >= point.size())
        fail(ErrorKind::Precondition,
             "eval: point dimension too small for variable " +
                 std::to_string(n.var));
      return point[static_cast<std::size_t>(n.var)];
    case Op::Add:
      return eval(Expr(n.a), point) + eval(Expr(n.b), point);
    case Op::Neg:
      return -eval(Expr(n.a), point);
    case Op::Mul:
      return eval(Expr(n.a), point) * eval(Expr(n.b), point);
    case Op::Div: {
      double den = eval(Expr(n.b), point);
      if (den == 0.0)
        fail(ErrorKind::Domain, "division by zero in: " + print(e));
      return eval(Expr(n.a), point) / den;
    }
    case Op::IntPow: {
      double base = eval(Expr(n.a), point);
      int k = n.exponent;
      if (k < 0 && base == 0.0)
        fail(ErrorKind::Domain, "zero raised to negative power in: " + print(e));
      if (k >= 0 && k <= 16) {
        double r = 1.0;
        for (int i = 0; i < k; ++i) r *= base;
        return r;
      }
      return std::pow(base, k);
    }
    case Op::Sin:
      return std::sin(eval(Expr(n.a), point));
    case Op::Cos:
      return std::cos(eval(Expr(n.a), point));
    case Op::Exp:
      return std::exp(eval(Expr(n.a), point));
    case Op::Ln: {
      double arg = eval(Expr(n.a), point);
      if (!(arg > 0.0))
        fail(ErrorKind::Domain, "ln of non-positive argument in: " + print(e));
      return std::log(arg);
    }
  }
  fail(ErrorKind::Precondition, "eval: unreachable op");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Precedence levels: 0 add, 1 mul, 2 unary minus, 3 power/atom.
void print_rec(const Expr& e, int parent_prec, std::string& out) {
  const auto& n = e.node();
  switch (n.op) {
    case Op::Constant: {
      double v = n.value;
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
      (void)ec;
      std::string s(buf, p);
      if (v < 0.0 && parent_prec > 0) {
        out += '(';
        out += s;
        out += ')';
      } else {
        out += s;
      }
      return;
    }
    case Op::Var:
      out += (n.var == 0 ? "u" : n.var == 1 ? "v" : "x" + std::to_string(n.var - 1));
      return;
    case Op::Add: {
      bool paren = parent_prec > 0;
      if (paren) out += '(';
      print_rec(Expr(n.a), 0, out);
      // Render e + (-f) as e - f when the right child is a negation.
      if (n.b->op == Op::Neg) {
        out += " - ";
        print_rec(Expr(n.b->a), 1, out);
      } else if (n.b->op == Op::Constant && n.b->value < 0.0) {
        out += " - ";
        out += print(constant(-n.b->value));
      } else {
        out += " + ";
        print_rec(Expr(n.b), 0, out);
      }
      if (paren) out += ')';
      return;
    }
    case Op::Neg: {
      bool paren = parent_prec > 2;
      if (paren) out += '(';
      out += '-';
      print_rec(Expr(n.a), 2, out);
      if (paren) out += ')';
      return;
    }
    case Op::Mul: {
      bool paren = parent_prec > 1;
      if (paren) out += '(';
      print_rec(Expr(n.a), 1, out);
      out += '*';
      print_rec(Expr(n.b), 2, out);
      if (paren) out += ')';
      return;
    }
    case Op::Div: {
      bool paren = parent_prec > 1;
      if (paren) out += '(';
      print_rec(Expr(n.a), 1, out);
      out += '/';
      print_rec(Expr(n.b), 2, out);
      if (paren) out += ')';
      return;
    }
    case Op::IntPow: {
      print_rec(Expr(n.a), 3, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    }
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Ln: {
      out += (n.op == Op::Sin   ? "sin"
              : n.op == Op::Cos ? "cos"
              : n.op == Op::Exp ? "exp"
                                : "ln");
      out += '(';
      print_rec(Expr(n.a), 0, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_rec(e, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser (recursive descent)

namespace {

class Parser {
 public:
  Parser(std::string_view text, const VarSpace& vs) : text_(text), vs_(vs) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      fail(ErrorKind::Syntax,
           "syntax error at position " + std::to_string(pos_) +
               ": unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  std::string_view text_;
  const VarSpace& vs_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c))
      fail(ErrorKind::Syntax, "syntax error at position " + std::to_string(pos_) +
                                  ": expected '" + std::string(1, c) + "'");
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+'))
        e = add(e, parse_term());
      else if (consume('-'))
        e = sub(e, parse_term());
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (consume('*'))
        e = mul(e, parse_factor());
      else if (consume('/'))
        e = div(e, parse_factor());
      else
        return e;
    }
  }

  Expr parse_factor() {
    if (consume('-')) return neg(parse_factor());
    Expr base = parse_base();
    if (consume('^')) {
      int k = parse_integer();
      return intpow(base, k);
    }
    return base;
  }

  int parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    int k = 0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
    if (ec != std::errc() || p != text_.data() + pos_ || pos_ == start)
      fail(ErrorKind::Syntax,
           "syntax error at position " + std::to_string(start) +
               ": expected integer exponent");
    return k;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= text_.size())
      fail(ErrorKind::Syntax, "syntax error at position " + std::to_string(pos_) +
                                  ": unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail(ErrorKind::Syntax, "syntax error at position " + std::to_string(pos_) +
                                ": unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' belonged to something else
      }
    }
    std::string s(text_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
      fail(ErrorKind::Syntax, "syntax error at position " + std::to_string(start) +
                                  ": bad number '" + s + "'");
    return constant(v);
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_]))))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "sin" || name == "cos" || name == "exp" || name == "ln") {
      expect('(');
      Expr arg = parse_expr();
      expect(')');
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "exp") return exp(arg);
      return ln(arg);
    }
    auto idx = vs_.coord_index(name);
    if (!idx)
      fail(ErrorKind::Syntax, "unknown variable '" + name + "' at position " +
                                  std::to_string(start));
    return variable(*idx);
  }
};

}  // namespace

Expr parse(std::string_view text, const VarSpace& vs) {
  return Parser(text, vs).run();
}

// ---------------------------------------------------------------------------
// Structural analysis

bool depends_on(const Expr& e, int var) {
  const auto& n = e.node();
  if (n.op == Op::Var) return n.var == var;
  if (n.a && depends_on(Expr(n.a), var)) return true;
  if (n.b && depends_on(Expr(n.b), var)) return true;
  return false;
}

int max_var_index(const Expr& e) {
  const auto& n = e.node();
  int m = (n.op == Op::Var) ? n.var : -1;
  if (n.a) m = std::max(m, max_var_index(Expr(n.a)));
  if (n.b) m = std::max(m, max_var_index(Expr(n.b)));
  return m;
}

namespace {

// Degree in x of a subtree, or nullopt when not polynomial in x. Coefficients
// may involve u arbitrarily; v anywhere disqualifies.
std::optional<int> poly_degree_rec(const Expr& e) {
  const auto& n = e.node();
  switch (n.op) {
    case Op::Constant:
      return 0;
    case Op::Var:
      if (n.var == VarSpace::V) return std::nullopt;
      return n.var == VarSpace::U ? 0 : 1;
    case Op::Add: {
      auto a = poly_degree_rec(Expr(n.a)), b = poly_degree_rec(Expr(n.b));
      if (!a || !b) return std::nullopt;
      return std::max(*a, *b);
    }
    case Op::Neg:
      return poly_degree_rec(Expr(n.a));
    case Op::Mul: {
      auto a = poly_degree_rec(Expr(n.a)), b = poly_degree_rec(Expr(n.b));
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Op::Div: {
      auto a = poly_degree_rec(Expr(n.a)), b = poly_degree_rec(Expr(n.b));
      if (!a || !b) return std::nullopt;
      if (*b != 0) return std::nullopt;  // x in a denominator
      return *a;
    }
    case Op::IntPow: {
      auto a = poly_degree_rec(Expr(n.a));
      if (!a) return std::nullopt;
      if (n.exponent < 0) return *a == 0 ? std::optional<int>(0) : std::nullopt;
      return *a * n.exponent;
    }
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Ln: {
      auto a = poly_degree_rec(Expr(n.a));
      if (!a || *a != 0) return std::nullopt;
      return 0;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> poly_degree_in_x(const Expr& e, const VarSpace&) {
  return poly_degree_rec(e);
}

bool is_affine(const Expr& e) {
  const auto& n = e.node();
  switch (n.op) {
    case Op::Constant:
    case Op::Var:
      return true;
    case Op::Add:
      return is_affine(Expr(n.a)) && is_affine(Expr(n.b));
    case Op::Neg:
      return is_affine(Expr(n.a));
    case Op::Mul:
      return (n.a->op == Op::Constant && is_affine(Expr(n.b))) ||
             (n.b->op == Op::Constant && is_affine(Expr(n.a)));
    case Op::Div:
      return n.b->op == Op::Constant && is_affine(Expr(n.a));
    default:
      return false;
  }
}

bool structurally_bounded(const Expr& e) {
  const auto& n = e.node();
  switch (n.op) {
    case Op::Constant:
      return true;
    case Op::Var:
      return false;
    case Op::Add:
    case Op::Mul:
      return structurally_bounded(Expr(n.a)) && structurally_bounded(Expr(n.b));
    case Op::Neg:
      return structurally_bounded(Expr(n.a));
    case Op::Sin:
    case Op::Cos:
      return is_affine(Expr(n.a));
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Grid bound estimate

BoundEstimate bound_estimate(const Expr& e, const VarSpace& vs,
                             const std::vector<Interval>& box, int grid,
                             std::size_t eval_cap) {
  const int dim = vs.dim();
  if (static_cast<int>(box.size()) != dim)
    fail(ErrorKind::Precondition, "bound_estimate: box must cover all coordinates");
  if (grid < 2) fail(ErrorKind::Precondition, "bound_estimate: grid must be >= 2");
  for (const auto& iv : box)
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo)
      fail(ErrorKind::Precondition, "bound_estimate: box must be finite");

  std::vector<int> active;
  for (int i = 0; i < dim; ++i)
    if (depends_on(e, i)) active.push_back(i);

  std::size_t total = 1;
  for (std::size_t k = 0; k < active.size(); ++k) {
    total *= static_cast<std::size_t>(grid);
    if (total > eval_cap)
      fail(ErrorKind::Budget, "bound_estimate: grid^" + std::to_string(active.size()) +
                                  " exceeds evaluation cap");
  }

  std::vector<double> point(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i)
    point[static_cast<std::size_t>(i)] = 0.5 * (box[i].lo + box[i].hi);

  BoundEstimate best;
  best.sup_estimate = -1.0;
  std::vector<int> idx(active.size(), 0);
  for (std::size_t count = 0; count < total; ++count) {
    std::size_t rem = count;
    for (std::size_t k = 0; k < active.size(); ++k) {
      idx[k] = static_cast<int>(rem % static_cast<std::size_t>(grid));
      rem /= static_cast<std::size_t>(grid);
    }
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto& iv = box[active[k]];
      point[static_cast<std::size_t>(active[k])] =
          iv.lo + (iv.hi - iv.lo) * idx[k] / (grid - 1);
    }
    double value = std::abs(eval(e, point));
    if (value > best.sup_estimate) {
      best.sup_estimate = value;
      best.argmax_point = point;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Quadratic collection

namespace {

// Monomial key over the transverse coordinates: (-1,-1) constant,
// (i,-1) linear x_i, (i,j) with i<=j quadratic x_i x_j.
using MonKey = std::pair<int, int>;
using MonMap = std::map<MonKey, Expr>;

void mon_add(MonMap& m, MonKey key, const Expr& coeff) {
  auto it = m.find(key);
  if (it == m.end())
    m.emplace(key, coeff);
  else
    it->second = add(it->second, coeff);
}

MonKey mon_mul_key(MonKey a, MonKey b) {
  std::vector<int> factors;
  if (a.first >= 0) factors.push_back(a.first);
  if (a.second >= 0) factors.push_back(a.second);
  if (b.first >= 0) factors.push_back(b.first);
  if (b.second >= 0) factors.push_back(b.second);
  if (factors.size() > 2)
    fail(ErrorKind::Precondition, "collect_quadratic: degree exceeds 2");
  if (factors.empty()) return {-1, -1};
  if (factors.size() == 1) return {factors[0], -1};
  if (factors[0] > factors[1]) std::swap(factors[0], factors[1]);
  return {factors[0], factors[1]};
}

bool x_free(const Expr& e) {
  auto d = poly_degree_rec(e);
  return d && *d == 0;
}

MonMap collect_rec(const Expr& e) {
  const auto& n = e.node();
  if (depends_on(e, VarSpace::V))
    fail(ErrorKind::Precondition, "collect_quadratic: v-dependence");
  if (x_free(e)) {
    MonMap m;
    if (!e.is_zero()) m.emplace(MonKey{-1, -1}, e);
    return m;
  }
  switch (n.op) {
    case Op::Var:
      // x-free case handled above, so this is a transverse coordinate
      {
        MonMap m;
        m.emplace(MonKey{n.var, -1}, constant(1.0));
        return m;
      }
    case Op::Add: {
      MonMap m = collect_rec(Expr(n.a));
      for (auto& [k, c] : collect_rec(Expr(n.b))) mon_add(m, k, c);
      return m;
    }
    case Op::Neg: {
      MonMap m = collect_rec(Expr(n.a));
      for (auto& [k, c] : m) c = neg(c);
      return m;
    }
    case Op::Mul: {
      MonMap ma = collect_rec(Expr(n.a));
      MonMap mb = collect_rec(Expr(n.b));
      MonMap m;
      for (const auto& [ka, ca] : ma)
        for (const auto& [kb, cb] : mb)
          mon_add(m, mon_mul_key(ka, kb), mul(ca, cb));
      return m;
    }
    case Op::Div: {
      if (!x_free(Expr(n.b)))
        fail(ErrorKind::Precondition, "collect_quadratic: x in denominator");
      MonMap m = collect_rec(Expr(n.a));
      for (auto& [k, c] : m) c = div(c, Expr(n.b));
      return m;
    }
    case Op::IntPow: {
      if (n.exponent < 0 || n.exponent > 2)
        fail(ErrorKind::Precondition, "collect_quadratic: degree exceeds 2");
      MonMap base = collect_rec(Expr(n.a));
      if (n.exponent == 0) {
        MonMap m;
        m.emplace(MonKey{-1, -1}, constant(1.0));
        return m;
      }
      if (n.exponent == 1) return base;
      MonMap m;
      for (const auto& [ka, ca] : base)
        for (const auto& [kb, cb] : base)
          mon_add(m, mon_mul_key(ka, kb), mul(ca, cb));
      return m;
    }
    default:
      fail(ErrorKind::Precondition,
           "collect_quadratic: not polynomial in x: " + print(e));
  }
}

}  // namespace

QuadraticForm collect_quadratic(const Expr& e, const VarSpace& vs) {
  auto deg = poly_degree_in_x(e, vs);
  if (!deg)
    fail(ErrorKind::Precondition,
         "collect_quadratic: expression is not polynomial in x");
  if (*deg > 2)
    fail(ErrorKind::Precondition, "collect_quadratic: degree " +
                                      std::to_string(*deg) + " exceeds 2");
  const int n = vs.n();
  QuadraticForm q;
  q.a.assign(static_cast<std::size_t>(n),
             std::vector<Expr>(static_cast<std::size_t>(n), constant(0.0)));
  q.b.assign(static_cast<std::size_t>(n), constant(0.0));
  q.c = constant(0.0);

  for (const auto& [key, coeff] : collect_rec(e)) {
    if (key.first < 0) {
      q.c = add(q.c, coeff);
    } else if (key.second < 0) {
      q.b[static_cast<std::size_t>(key.first - 2)] =
          add(q.b[static_cast<std::size_t>(key.first - 2)], coeff);
    } else {
      std::size_t i = static_cast<std::size_t>(key.first - 2);
      std::size_t j = static_cast<std::size_t>(key.second - 2);
      if (i == j) {
        q.a[i][i] = add(q.a[i][i], coeff);
      } else {
        Expr half = mul(constant(0.5), coeff);
        q.a[i][j] = add(q.a[i][j], half);
        q.a[j][i] = add(q.a[j][i], half);
      }
    }
  }
  return q;
}

}  // namespace ppwave
