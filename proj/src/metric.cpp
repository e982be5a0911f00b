#include "ppwave/metric.hpp"

#include <cmath>
#include <string>

namespace ppwave {

namespace {

std::string point_string(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

}  // namespace

MetricSpec::MetricSpec(VarSpace vs, MetricForm form, Expr H, std::vector<Expr> mu,
                       std::vector<std::vector<Expr>> ghat)
    : vs_(std::move(vs)),
      form_(form),
      H_(std::move(H)),
      mu_(std::move(mu)),
      ghat_(std::move(ghat)) {
  build_tables();
}

MetricSpec MetricSpec::ppwave(VarSpace vs, Expr H) {
  if (depends_on(H, VarSpace::V))
    fail(ErrorKind::Precondition, "ppwave: H must not depend on v");
  if (max_var_index(H) >= vs.dim())
    fail(ErrorKind::Precondition, "ppwave: H references a coordinate outside the chart");
  const int n = vs.n();
  std::vector<Expr> mu(static_cast<std::size_t>(n), constant(0.0));
  std::vector<std::vector<Expr>> ghat(
      static_cast<std::size_t>(n),
      std::vector<Expr>(static_cast<std::size_t>(n), constant(0.0)));
  for (int i = 0; i < n; ++i)
    ghat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = constant(1.0);
  return MetricSpec(std::move(vs), MetricForm::PPWave, std::move(H), std::move(mu),
                    std::move(ghat));
}

MetricSpec MetricSpec::generalized(VarSpace vs, Expr H, std::vector<Expr> mu,
                                   std::vector<std::vector<Expr>> ghat) {
  const int n = vs.n();
  if (mu.empty()) mu.assign(static_cast<std::size_t>(n), constant(0.0));
  if (ghat.empty()) {
    ghat.assign(static_cast<std::size_t>(n),
                std::vector<Expr>(static_cast<std::size_t>(n), constant(0.0)));
    for (int i = 0; i < n; ++i)
      ghat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = constant(1.0);
  }
  if (static_cast<int>(mu.size()) != n || static_cast<int>(ghat.size()) != n)
    fail(ErrorKind::Precondition, "generalized: mu/ghat size must match n");
  for (const auto& row : ghat)
    if (static_cast<int>(row.size()) != n)
      fail(ErrorKind::Precondition, "generalized: ghat must be n x n");
  for (const auto& e : mu)
    if (depends_on(e, VarSpace::V))
      fail(ErrorKind::Precondition, "generalized: mu_i must not depend on v");
  for (const auto& row : ghat)
    for (const auto& e : row)
      if (depends_on(e, VarSpace::V))
        fail(ErrorKind::Precondition, "generalized: ghat must not depend on v");
  if (max_var_index(H) >= vs.dim())
    fail(ErrorKind::Precondition, "generalized: H references a coordinate outside the chart");
  return MetricSpec(std::move(vs), MetricForm::Generalized, std::move(H),
                    std::move(mu), std::move(ghat));
}

void MetricSpec::build_tables() {
  const int d = dim();
  const int n = vs_.n();
  auto sz = [](int k) { return static_cast<std::size_t>(k); };

  g_.assign(sz(d), std::vector<Expr>(sz(d), constant(0.0)));
  g_[0][0] = mul(constant(2.0), H_);  // g_uu = 2H
  g_[0][1] = constant(1.0);
  g_[1][0] = constant(1.0);
  for (int i = 0; i < n; ++i) {
    g_[0][sz(2 + i)] = mu_[sz(i)];
    g_[sz(2 + i)][0] = mu_[sz(i)];
    for (int j = 0; j < n; ++j) g_[sz(2 + i)][sz(2 + j)] = ghat_[sz(i)][sz(j)];
  }

  dg_.assign(sz(d), std::vector<std::vector<Expr>>(
                        sz(d), std::vector<Expr>(sz(d), constant(0.0))));
  ddg_.assign(sz(d),
              std::vector<std::vector<std::vector<Expr>>>(
                  sz(d), std::vector<std::vector<Expr>>(
                             sz(d), std::vector<Expr>(sz(d), constant(0.0)))));
  for (int k = 0; k < d; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        Expr de = diff(g_[sz(a)][sz(b)], k);
        dg_[sz(k)][sz(a)][sz(b)] = de;
        dg_[sz(k)][sz(b)][sz(a)] = de;
      }
  for (int r = 0; r < d; ++r)
    for (int k = 0; k < d; ++k)
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          Expr de = diff(dg_[sz(k)][sz(a)][sz(b)], r);
          ddg_[sz(r)][sz(k)][sz(a)][sz(b)] = de;
          ddg_[sz(r)][sz(k)][sz(b)][sz(a)] = de;
        }

  dH_.assign(sz(d), constant(0.0));
  for (int k = 0; k < d; ++k) dH_[sz(k)] = diff(H_, k);
  ddH_.assign(sz(d), std::vector<Expr>(sz(d), constant(0.0)));
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      Expr de = diff(dH_[sz(a)], b);
      ddH_[sz(a)][sz(b)] = de;
      ddH_[sz(b)][sz(a)] = de;
    }
}

void MetricSpec::check_point(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim())
    fail(ErrorKind::Precondition, "point dimension must be n+2");
  for (double c : p)
    if (!std::isfinite(c))
      fail(ErrorKind::Numeric, "non-finite coordinate in point " + point_string(p));
}

MetricEval MetricSpec::metric_at(std::span<const double> p) const {
  check_point(p);
  const int d = dim();
  const int n = vs_.n();
  MetricEval out;
  out.point.assign(p.begin(), p.end());
  out.g = Mat(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      out.g(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) =
          eval(g_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], p);

  if (form_ == MetricForm::Generalized) {
    Mat ghat(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        ghat(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
            out.g(static_cast<std::size_t>(2 + i), static_cast<std::size_t>(2 + j));
    if (!positive_definite(ghat))
      fail(ErrorKind::Numeric,
           "ghat is not positive definite at " + point_string(p));
  }

  out.g_inv = inverse(out.g);
  out.inverse_residual =
      (out.g * out.g_inv - Mat::identity(static_cast<std::size_t>(d))).max_abs();
  if (out.inverse_residual > 1e-12)
    fail(ErrorKind::Numeric, "metric inverse residual " +
                                 std::to_string(out.inverse_residual) + " at " +
                                 point_string(p));
  return out;
}

ChristoffelEval MetricSpec::christoffel(std::span<const double> p,
                                        EnginePath path) const {
  check_point(p);
  const int d = dim();
  const int n = vs_.n();
  auto sz = [](int k) { return static_cast<std::size_t>(k); };
  if (path == EnginePath::Auto)
    path = form_ == MetricForm::PPWave ? EnginePath::Fast : EnginePath::Generic;
  if (path == EnginePath::Fast && form_ != MetricForm::PPWave)
    fail(ErrorKind::Precondition, "fast Christoffel path requires the PPWave form");

  ChristoffelEval out;
  out.point.assign(p.begin(), p.end());
  out.gamma.assign(sz(d), std::vector<std::vector<double>>(
                              sz(d), std::vector<double>(sz(d), 0.0)));

  if (path == EnginePath::Fast) {
    // Nonzero entries in the standard chart: Gamma^v_{iu} = d_i H,
    // Gamma^v_{uu} = d_u H, Gamma^i_{uu} = -d_i H.
    double du_H = eval(dH_[sz(VarSpace::U)], p);
    out.gamma[sz(VarSpace::V)][sz(VarSpace::U)][sz(VarSpace::U)] = du_H;
    for (int i = 0; i < n; ++i) {
      double di_H = eval(dH_[sz(2 + i)], p);
      out.gamma[sz(VarSpace::V)][sz(2 + i)][sz(VarSpace::U)] = di_H;
      out.gamma[sz(VarSpace::V)][sz(VarSpace::U)][sz(2 + i)] = di_H;
      out.gamma[sz(2 + i)][sz(VarSpace::U)][sz(VarSpace::U)] = -di_H;
    }
    return out;
  }

  MetricEval me = metric_at(p);
  std::vector<std::vector<std::vector<double>>> dg(
      sz(d), std::vector<std::vector<double>>(sz(d), std::vector<double>(sz(d))));
  for (int k = 0; k < d; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        double v = eval(dg_[sz(k)][sz(a)][sz(b)], p);
        dg[sz(k)][sz(a)][sz(b)] = v;
        dg[sz(k)][sz(b)][sz(a)] = v;
      }

  for (int l = 0; l < d; ++l)
    for (int m = 0; m < d; ++m)
      for (int nu = m; nu < d; ++nu) {
        double s = 0.0;
        for (int k = 0; k < d; ++k)
          s += me.g_inv(sz(l), sz(k)) *
               (dg[sz(m)][sz(nu)][sz(k)] + dg[sz(nu)][sz(m)][sz(k)] -
                dg[sz(k)][sz(m)][sz(nu)]);
        s *= 0.5;
        out.gamma[sz(l)][sz(m)][sz(nu)] = s;
        out.gamma[sz(l)][sz(nu)][sz(m)] = s;
      }
  return out;
}

CurvatureEval MetricSpec::curvature(std::span<const double> p,
                                    EnginePath path) const {
  check_point(p);
  const int d = dim();
  const int n = vs_.n();
  auto sz = [](int k) { return static_cast<std::size_t>(k); };
  if (path == EnginePath::Auto)
    path = form_ == MetricForm::PPWave ? EnginePath::Fast : EnginePath::Generic;
  if (path == EnginePath::Fast && form_ != MetricForm::PPWave)
    fail(ErrorKind::Precondition, "fast curvature path requires the PPWave form");

  CurvatureEval out;
  out.point.assign(p.begin(), p.end());
  out.dim = d;
  out.r.assign(sz(d * d * d * d), 0.0);

  if (path == EnginePath::Fast) {
    // Only R(d_i, d_u, d_u, d_j) = -d_i d_j H survives, up to symmetries.
    constexpr int U = VarSpace::U;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double val = -eval(ddH_[sz(2 + i)][sz(2 + j)], p);
        int ci = 2 + i, cj = 2 + j;
        out.at(ci, U, U, cj) = val;
        out.at(U, ci, U, cj) = -val;
        out.at(ci, U, cj, U) = -val;
        out.at(U, ci, cj, U) = val;
      }
    return out;
  }

  MetricEval me = metric_at(p);
  std::vector<std::vector<std::vector<double>>> dg(
      sz(d), std::vector<std::vector<double>>(sz(d), std::vector<double>(sz(d))));
  std::vector<std::vector<std::vector<std::vector<double>>>> ddg(
      sz(d), std::vector<std::vector<std::vector<double>>>(
                 sz(d), std::vector<std::vector<double>>(
                            sz(d), std::vector<double>(sz(d)))));
  for (int k = 0; k < d; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        double v = eval(dg_[sz(k)][sz(a)][sz(b)], p);
        dg[sz(k)][sz(a)][sz(b)] = v;
        dg[sz(k)][sz(b)][sz(a)] = v;
      }
  for (int r = 0; r < d; ++r)
    for (int k = 0; k < d; ++k)
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          double v = eval(ddg_[sz(r)][sz(k)][sz(a)][sz(b)], p);
          ddg[sz(r)][sz(k)][sz(a)][sz(b)] = v;
          ddg[sz(r)][sz(k)][sz(b)][sz(a)] = v;
        }

  // d_m g^{lk} = -g^{la} (d_m g_{ab}) g^{bk}
  std::vector<std::vector<std::vector<double>>> dginv(
      sz(d), std::vector<std::vector<double>>(sz(d), std::vector<double>(sz(d), 0.0)));
  for (int m = 0; m < d; ++m)
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            s -= me.g_inv(sz(l), sz(a)) * dg[sz(m)][sz(a)][sz(b)] *
                 me.g_inv(sz(b), sz(k));
        dginv[sz(m)][sz(l)][sz(k)] = s;
      }

  auto gamma_of = [&](std::vector<std::vector<std::vector<double>>>& gm) {
    for (int l = 0; l < d; ++l)
      for (int m = 0; m < d; ++m)
        for (int nu = m; nu < d; ++nu) {
          double s = 0.0;
          for (int k = 0; k < d; ++k)
            s += me.g_inv(sz(l), sz(k)) *
                 (dg[sz(m)][sz(nu)][sz(k)] + dg[sz(nu)][sz(m)][sz(k)] -
                  dg[sz(k)][sz(m)][sz(nu)]);
          s *= 0.5;
          gm[sz(l)][sz(m)][sz(nu)] = s;
          gm[sz(l)][sz(nu)][sz(m)] = s;
        }
  };
  std::vector<std::vector<std::vector<double>>> gamma(
      sz(d), std::vector<std::vector<double>>(sz(d), std::vector<double>(sz(d))));
  gamma_of(gamma);

  // d_r Gamma^l_{mn} = 1/2 (d_r g^{lk}) (...) + 1/2 g^{lk} d_r(...)
  auto dgamma = [&](int r, int l, int m, int nu) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      s += dginv[sz(r)][sz(l)][sz(k)] *
           (dg[sz(m)][sz(nu)][sz(k)] + dg[sz(nu)][sz(m)][sz(k)] -
            dg[sz(k)][sz(m)][sz(nu)]);
      s += me.g_inv(sz(l), sz(k)) *
           (ddg[sz(r)][sz(m)][sz(nu)][sz(k)] + ddg[sz(r)][sz(nu)][sz(m)][sz(k)] -
            ddg[sz(r)][sz(k)][sz(m)][sz(nu)]);
    }
    return 0.5 * s;
  };

  // R^l_{s mn} = d_m Gamma^l_{ns} - d_n Gamma^l_{ms}
  //            + Gamma^l_{mk} Gamma^k_{ns} - Gamma^l_{nk} Gamma^k_{ms}
  // then lower: R(e_m, e_n, e_s, e_w) = g_{wl} R^l_{s mn}.
  for (int m = 0; m < d; ++m)
    for (int nu = 0; nu < d; ++nu) {
      if (nu == m) continue;
      for (int s = 0; s < d; ++s) {
        std::vector<double> up(sz(d), 0.0);
        for (int l = 0; l < d; ++l) {
          double val = dgamma(m, l, nu, s) - dgamma(nu, l, m, s);
          for (int k = 0; k < d; ++k)
            val += gamma[sz(l)][sz(m)][sz(k)] * gamma[sz(k)][sz(nu)][sz(s)] -
                   gamma[sz(l)][sz(nu)][sz(k)] * gamma[sz(k)][sz(m)][sz(s)];
          up[sz(l)] = val;
        }
        for (int w = 0; w < d; ++w) {
          double val = 0.0;
          for (int l = 0; l < d; ++l) val += me.g(sz(w), sz(l)) * up[sz(l)];
          out.at(m, nu, s, w) = val;
        }
      }
    }
  return out;
}

double MetricSpec::ricci_uu(std::span<const double> p) const {
  if (form_ != MetricForm::PPWave)
    fail(ErrorKind::Precondition, "ricci_uu requires the PPWave form");
  check_point(p);
  double s = 0.0;
  for (int i = 0; i < vs_.n(); ++i)
    s += eval(ddH_[static_cast<std::size_t>(2 + i)][static_cast<std::size_t>(2 + i)], p);
  return -s;
}

Mat MetricSpec::ricci_generic(std::span<const double> p) const {
  CurvatureEval c = curvature(p, EnginePath::Generic);
  MetricEval me = metric_at(p);
  const int d = dim();
  Mat ric(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m)
    for (int nu = 0; nu < d; ++nu) {
      double s = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          s += me.g_inv(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) *
               c.at(a, m, nu, b);
      ric(static_cast<std::size_t>(m), static_cast<std::size_t>(nu)) = s;
    }
  return ric;
}

double curvature_symmetry_residual(const CurvatureEval& c) {
  const int d = c.dim;
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int e = 0; e < d; ++e)
        for (int f = 0; f < d; ++f) {
          worst = std::max(worst, std::abs(c.at(a, b, e, f) + c.at(b, a, e, f)));
          worst = std::max(worst, std::abs(c.at(a, b, e, f) + c.at(a, b, f, e)));
          worst = std::max(worst, std::abs(c.at(a, b, e, f) - c.at(e, f, a, b)));
        }
  return worst;
}

double first_bianchi_residual(const CurvatureEval& c) {
  const int d = c.dim;
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int e = 0; e < d; ++e)
        for (int f = 0; f < d; ++f) {
          double s = c.at(a, b, e, f) + c.at(b, e, a, f) + c.at(e, a, b, f);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

}  // namespace ppwave
