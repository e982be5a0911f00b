#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppwave/error.hpp"

namespace ppwave {

/// Coordinate chart (u, v, x1..xn) with optional per-coordinate periods.
/// Index convention used everywhere: 0 = u, 1 = v, 2..n+1 = x1..xn.
class VarSpace {
 public:
  explicit VarSpace(int n);

  int n() const { return n_; }
  int dim() const { return n_ + 2; }

  static constexpr int U = 0;
  static constexpr int V = 1;
  static int x(int i) { return 2 + i; }  // i in [0, n)
  static bool is_transverse(int idx) { return idx >= 2; }

  std::string coord_name(int idx) const;
  std::optional<int> coord_index(std::string_view name) const;

  void set_period(int idx, double period);
  std::optional<double> period(int idx) const;

 private:
  int n_;
  std::vector<std::optional<double>> periods_;
};

enum class Op {
  Constant,
  Var,
  Add,
  Mul,
  Neg,
  Div,
  IntPow,
  Sin,
  Cos,
  Exp,
  Ln,
};

/// Immutable symbolic expression over a coordinate chart. Values are cheap
/// shared handles; all operations are pure, so Expr may be shared freely
/// across threads.
class Expr {
 public:
  struct Node {
    Op op;
    double value = 0.0;  // Constant
    int var = -1;        // Var
    int exponent = 0;    // IntPow
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expr() : node_(zero_node()) {}
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  Op op() const { return node_->op; }

  bool is_constant() const { return node_->op == Op::Constant; }
  bool is_zero() const { return is_constant() && node_->value == 0.0; }
  double constant_value() const { return node_->value; }

 private:
  static const NodePtr& zero_node();
  NodePtr node_;
};

// --- constructors (structural simplification applied: constant folding,
//     0+e -> e, 0*e -> 0, 1*e -> e, --e -> e, e^0 -> 1, e^1 -> e) ---
Expr constant(double c);
Expr variable(int index);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr intpow(const Expr& a, int k);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }

/// Exact symbolic partial derivative with respect to coordinate `var`.
Expr diff(const Expr& e, int var);

/// IEEE double evaluation at a point in coordinate order (u, v, x1..xn).
/// ln of a non-positive argument and division by zero throw Error(Domain)
/// carrying the printed offending subexpression.
double eval(const Expr& e, std::span<const double> point);

/// Canonical text form; parse(print(e)) evaluates identically to e.
std::string print(const Expr& e);

/// Parse per the grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' integer)?
///   base   := number | ident | '(' expr ')' | func '(' expr ')'
///   func   in {sin, cos, exp, ln}; ident in {u, v, x1..xn}
/// Whitespace is insignificant. Syntax errors carry the offending position;
/// unknown identifiers are reported by name.
Expr parse(std::string_view text, const VarSpace& vs);

/// True if the variable with this index appears in the tree.
bool depends_on(const Expr& e, int var);

/// Largest variable index appearing in the tree, or -1 for constants.
int max_var_index(const Expr& e);

/// Total degree of e as a polynomial in the transverse coordinates x1..xn
/// with coefficients that are functions of u only. Any v-dependence and any
/// x inside sin/cos/exp/ln or a quotient denominator yields nullopt.
std::optional<int> poly_degree_in_x(const Expr& e, const VarSpace& vs);

/// True if e is affine-linear in all coordinates (constants, variables,
/// sums, and constant multiples thereof).
bool is_affine(const Expr& e);

/// True if e is structurally bounded: a finite sum of products of bounded
/// primitives (constants, sin/cos of affine arguments). Sound but
/// conservative; used by certificate logic, never by sampling.
bool structurally_bounded(const Expr& e);

struct BoundEstimate {
  double sup_estimate = 0.0;          // max |e| over the tensor grid
  std::vector<double> argmax_point;   // full coordinate point realizing it
};

struct Interval {
  double lo = 0.0, hi = 0.0;
};

/// Grid estimate of sup |e| over a box. Coordinates e does not depend on are
/// pinned to the box midpoint and do not count toward the evaluation budget.
/// The result is a lower bound on the true sup. Throws Error(Budget) if the
/// number of evaluations would exceed `eval_cap`.
BoundEstimate bound_estimate(const Expr& e, const VarSpace& vs,
                             const std::vector<Interval>& box, int grid,
                             std::size_t eval_cap = 10'000'000);

/// Exact split of a polynomial of degree <= 2 in x into
///   H = sum_ij a[i][j] x^i x^j + sum_i b[i] x^i + c
/// with a symmetric and all coefficients Exprs in u.
/// Throws Error(Precondition) if poly_degree_in_x(e) is absent or > 2.
struct QuadraticForm {
  std::vector<std::vector<Expr>> a;  // n x n, symmetric
  std::vector<Expr> b;               // n
  Expr c;
};
QuadraticForm collect_quadratic(const Expr& e, const VarSpace& vs);

}  // namespace ppwave
