#pragma once

#include <span>
#include <vector>

#include "ppwave/expr.hpp"
#include "ppwave/linalg.hpp"

namespace ppwave {

enum class MetricForm { PPWave, Generalized };

/// Which engine evaluates Christoffels / curvature. Fast is the closed-form
/// path available for the PPWave form; Generic assembles everything from
/// symbolic derivatives of the metric components.
enum class EnginePath { Auto, Fast, Generic };

struct MetricEval {
  std::vector<double> point;
  Mat g;        // (n+2)x(n+2), coordinate order (u, v, x1..xn)
  Mat g_inv;
  double inverse_residual = 0.0;  // max |g*g_inv - I|
};

struct ChristoffelEval {
  std::vector<double> point;
  // gamma[lambda][mu][nu], symmetric in (mu, nu)
  std::vector<std::vector<std::vector<double>>> gamma;
  double operator()(int l, int m, int n) const {
    return gamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)]
                [static_cast<std::size_t>(n)];
  }
};

/// Lowered curvature in the convention R(X,Y,U,W) = g(R(X,Y)U, W) with
/// R(X,Y)U = [nabla_X, nabla_Y]U - nabla_[X,Y]U.
struct CurvatureEval {
  std::vector<double> point;
  int dim = 0;
  std::vector<double> r;  // dim^4, index (mu, nu, rho, sigma)
  double at(int mu, int nu, int rho, int sigma) const {
    return r[static_cast<std::size_t>(((mu * dim + nu) * dim + rho) * dim + sigma)];
  }
  double& at(int mu, int nu, int rho, int sigma) {
    return r[static_cast<std::size_t>(((mu * dim + nu) * dim + rho) * dim + sigma)];
  }
};

/// Brinkmann-form Lorentzian metric
///   g = 2 du (dv + H du + mu_i dx^i) + ghat_ij dx^i dx^j
/// PPWave form: mu = 0, ghat = identity, H = H(u, x).
/// Generalized form: H may also depend on v (hosting recurrent examples),
/// mu_i = mu_i(u, x), ghat = ghat(u, x) symmetric positive definite.
/// Immutable after construction; symbolic derivative tables are built once
/// so per-point evaluation is pure and thread-safe.
class MetricSpec {
 public:
  static MetricSpec ppwave(VarSpace vs, Expr H);
  static MetricSpec generalized(VarSpace vs, Expr H, std::vector<Expr> mu,
                                std::vector<std::vector<Expr>> ghat);

  const VarSpace& vars() const { return vs_; }
  MetricForm form() const { return form_; }
  int dim() const { return vs_.dim(); }
  int n() const { return vs_.n(); }
  const Expr& H() const { return H_; }
  const std::vector<Expr>& mu() const { return mu_; }
  const std::vector<std::vector<Expr>>& ghat() const { return ghat_; }

  const Expr& g_component(int mu, int nu) const {
    return g_[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
  }
  const Expr& dH(int mu) const { return dH_[static_cast<std::size_t>(mu)]; }
  const Expr& ddH(int mu, int nu) const {
    return ddH_[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
  }

  MetricEval metric_at(std::span<const double> p) const;
  ChristoffelEval christoffel(std::span<const double> p,
                              EnginePath path = EnginePath::Auto) const;
  CurvatureEval curvature(std::span<const double> p,
                          EnginePath path = EnginePath::Auto) const;

  /// Ric(d_u, d_u) = -sum_i d_i^2 H for the PPWave form (closed formula).
  double ricci_uu(std::span<const double> p) const;

  /// Full Ricci tensor from the generic curvature: Ric_{mn} = g^{ab} R_{a m n b}.
  Mat ricci_generic(std::span<const double> p) const;

 private:
  MetricSpec(VarSpace vs, MetricForm form, Expr H, std::vector<Expr> mu,
             std::vector<std::vector<Expr>> ghat);
  void build_tables();
  void check_point(std::span<const double> p) const;

  VarSpace vs_;
  MetricForm form_;
  Expr H_;
  std::vector<Expr> mu_;
  std::vector<std::vector<Expr>> ghat_;

  std::vector<std::vector<Expr>> g_;                            // g_{mu nu}
  std::vector<std::vector<std::vector<Expr>>> dg_;              // d_k g_{mu nu}
  std::vector<std::vector<std::vector<std::vector<Expr>>>> ddg_;  // d_r d_k g
  std::vector<Expr> dH_;                                        // d_mu H
  std::vector<std::vector<Expr>> ddH_;                          // d_mu d_nu H
};

/// max |R_{..}| violation of the (mu nu)/(rho sigma) antisymmetries, pair
/// symmetry, and the first Bianchi identity — test/diagnostic helper.
double curvature_symmetry_residual(const CurvatureEval& c);
double first_bianchi_residual(const CurvatureEval& c);

}  // namespace ppwave
