#include "gtorsion/frame_bundle.hpp"

#include <algorithm>
#include <cmath>

namespace gtorsion {

// ---------------------------------------------------------------------------
// Bundle vectors
// ---------------------------------------------------------------------------

double bundle_dot(const PointGeometry& geo, const BundleVector& a, const BundleVector& b) {
  return geo.base.gdot(a.hor, b.hor) + killing_pairing(a.ver, b.ver);
}

double bundle_norm(const PointGeometry& geo, const BundleVector& a) {
  return std::sqrt(std::max(0.0, bundle_dot(geo, a, a)));
}

BundleVector lift_horizontal(const PointGeometry& geo, const Eigen::VectorXd& X) {
  return BundleVector{X, geo.xi_of(X), BundleFlavor::PTangent};
}

BundleVector lift_vertical(const Eigen::MatrixXd& beta) {
  return BundleVector{Eigen::VectorXd::Zero(beta.rows()), beta, BundleFlavor::PTangent};
}

BundleVector normal_lift(const PointGeometry& geo, const Eigen::MatrixXd& alpha) {
  return BundleVector{xi_dot_unchecked(geo, alpha), alpha, BundleFlavor::PNormal};
}

// ---------------------------------------------------------------------------
// Curvature operators
// ---------------------------------------------------------------------------

Eigen::MatrixXd r_operator(const PointGeometry& geo, const Eigen::MatrixXd& alpha) {
  const int n = geo.n();
  // sum_i R(e_i, alpha e_i) = sum_{a,b} (g^{-1} alpha^T)^{ab} R(d_a, d_b)
  Eigen::MatrixXd weights = geo.base.g_inv * alpha.transpose();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (weights(a, b) == 0.0) continue;
      out += weights(a, b) * geo.base.riem[a][b];
    }
  return out;
}

Eigen::VectorXd r_op(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                     const Eigen::VectorXd& X) {
  return r_operator(geo, alpha) * X;
}

Eigen::VectorXd q_apply(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                        const Eigen::VectorXd& X) {
  Eigen::MatrixXd com_m = geo.project_m(commutator(geo.xi_of(X), alpha));
  return geo.L_inv * (r_op(geo, alpha, X) - xi_dot_unchecked(geo, com_m));
}

Eigen::VectorXd q_op(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                     const Eigen::VectorXd& X, double tol_struct) {
  Eigen::MatrixXd m_part = geo.project_m(alpha);
  if (m_part.cwiseAbs().maxCoeff() > tol_struct * (1.0 + alpha.cwiseAbs().maxCoeff()))
    throw NotInGError("argument has an m(M)-part beyond tolerance");
  return q_apply(geo, alpha, X);
}

Eigen::MatrixXd q_matrix(const PointGeometry& geo, const Eigen::MatrixXd& alpha) {
  const int n = geo.n();
  Eigen::MatrixXd r_alpha = r_operator(geo, alpha);
  Eigen::MatrixXd out(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd com_m = geo.project_m(commutator(geo.xi[j], alpha));
    out.col(j) = geo.L_inv * (r_alpha.col(j) - xi_dot_unchecked(geo, com_m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

BundleVector project_tangent(const PointGeometry& geo, const BundleVector& v) {
  Eigen::MatrixXd alpha_g = geo.project_g(v.ver);
  Eigen::MatrixXd alpha_m = geo.project_m(v.ver);
  Eigen::VectorXd W = geo.L_inv * (v.hor - xi_dot_unchecked(geo, alpha_m));
  BundleVector out;
  out.hor = W;
  out.ver = geo.xi_of(W) + alpha_g;
  out.flavor = BundleFlavor::PTangent;
  return out;
}

BundleVector project_normal(const PointGeometry& geo, const BundleVector& v) {
  BundleVector tan = project_tangent(geo, v);
  BundleVector out;
  out.hor = v.hor - tan.hor;
  out.ver = v.ver - tan.ver;
  out.flavor = BundleFlavor::PNormal;
  return out;
}

// ---------------------------------------------------------------------------
// Connection
// ---------------------------------------------------------------------------

static std::vector<Eigen::MatrixXd> gamma_t_dir_of(const PointGeometry& geo) {
  const int n = geo.n();
  std::vector<Eigen::MatrixXd> out(n, Eigen::MatrixXd(n, n));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) out[m](i, k) = geo.gamma_t[i](m, k);
  return out;
}

PTangentField constant_ptangent_field(const PointGeometry& geo, const ProjectorField& proj,
                                      const Eigen::VectorXd& X, const Eigen::MatrixXd& beta) {
  PTangentField f;
  f.X.value = [X](const Eigen::VectorXd&) { return X; };
  const int n = geo.n();
  f.X.partials = [n](const Eigen::VectorXd&) {
    return std::vector<Eigen::VectorXd>(n, Eigen::VectorXd::Zero(n));
  };
  f.beta = g_valued_extension(geo, proj, beta);
  return f;
}

BundleVector nabla_P(const PointGeometry& geo, const PTangentField& u,
                     const PTangentField& v) {
  const int n = geo.n();
  const Eigen::VectorXd& x = geo.base.x;
  Eigen::VectorXd Xu = u.X.value(x);
  Eigen::MatrixXd bu = u.beta.value(x);
  Eigen::VectorXd Yv = v.X.value(x);
  Eigen::MatrixXd bv = v.beta.value(x);

  std::vector<Eigen::MatrixXd> gtd = gamma_t_dir_of(geo);

  // nabla~_X Y with the transfer-metric Christoffels
  auto y_parts = field_partials(v.X, geo.base.chart->domain, x, geo.base.backend);
  Eigen::VectorXd nt = Eigen::VectorXd::Zero(n);
  for (int m = 0; m < n; ++m)
    if (Xu[m] != 0.0) nt += Xu[m] * (y_parts[m] + gtd[m] * Yv);

  // nabla'_X beta_v
  auto b_parts = field_partials(v.beta, geo.base.chart->domain, x, geo.base.backend);
  Eigen::MatrixXd npb = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m)
    if (Xu[m] != 0.0)
      npb += Xu[m] * (b_parts[m] + geo.base.gamma_dir[m] * bv - bv * geo.base.gamma_dir[m]);
  npb -= commutator(geo.xi_of(Xu), bv);

  Eigen::VectorXd hor = nt + 0.5 * q_apply(geo, bv, Xu) + 0.5 * q_apply(geo, bu, Yv);
  Eigen::MatrixXd ver = geo.xi_of(hor) - 0.5 * geo.rprime_of(Xu, Yv) + npb -
                        0.5 * commutator(bu, bv);
  return BundleVector{std::move(hor), std::move(ver), BundleFlavor::PTangent};
}

// ---------------------------------------------------------------------------
// Bundle geometry with curvature data
// ---------------------------------------------------------------------------

Eigen::VectorXd BundleGeometry::dq_of(const Eigen::VectorXd& X, const Eigen::MatrixXd& gamma,
                                      const Eigen::VectorXd& Y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n());
  for (int A = 0; A < dim_g(); ++A) {
    double c = killing_pairing(gamma, pg.basis_g[A]);
    if (std::abs(c) < 1e-300) continue;
    for (int m = 0; m < n(); ++m)
      if (X[m] != 0.0) out += c * X[m] * (DQ[m][A] * Y);
  }
  return out;
}

Eigen::MatrixXd BundleGeometry::drp_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                                       const Eigen::VectorXd& Z) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n(), n());
  for (int m = 0; m < n(); ++m) {
    if (X[m] == 0.0) continue;
    for (int i = 0; i < n(); ++i) {
      if (Y[i] == 0.0) continue;
      for (int j = 0; j < n(); ++j)
        if (Z[j] != 0.0) out += X[m] * Y[i] * Z[j] * DRp[m][i][j];
    }
  }
  return out;
}

BundleGeometry bundle_geometry(const ChartPoint& pt, const ProjectorField& proj,
                               const Backend& backend, bool with_curvature) {
  BundleGeometry bg;
  bg.pg = point_geometry(pt, proj, backend);
  bg.proj = proj;
  bg.gamma_t_dir = gamma_t_dir_of(bg.pg);
  if (!with_curvature) return bg;
  bg.has_curvature_data = true;

  const int n = bg.pg.n();
  const int dim_g = bg.dim_g();
  auto chart = pt.chart;

  // Curvature of the transfer metric through its derived chart.
  bg.tilde = base_geometry(tilde_chart(chart, proj, backend), pt.coords, backend);

  // Pointwise Q matrices for the g_P basis.
  bg.Q.resize(dim_g);
  for (int A = 0; A < dim_g; ++A) bg.Q[A] = q_matrix(bg.pg, bg.pg.basis_g[A]);

  // g(M)-valued extensions of the basis elements (seeds at the base point).
  std::vector<EndoField> ext(dim_g);
  for (int A = 0; A < dim_g; ++A)
    ext[A] = g_valued_extension(bg.pg, proj, bg.pg.basis_g[A]);

  // One stacked field holds R'(d_i,d_j) for i<j and Q_{gamma_A(y)}(d_j)(y);
  // a single Richardson pass differentiates everything.
  const int pairs = n * (n - 1) / 2;
  StackedFn stacked = [chart, proj, backend, n, dim_g, &ext](const Eigen::VectorXd& y) {
    PointGeometry geo = point_geometry_at(chart, proj, y, backend);
    Eigen::VectorXd out(static_cast<int>(n * (n - 1) / 2 * n * n + dim_g * n * n));
    int idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int c = 0; c < n; ++c)
          for (int r = 0; r < n; ++r) out[idx++] = geo.rprime[i][j](r, c);
    for (int A = 0; A < dim_g; ++A) {
      Eigen::MatrixXd qm = q_matrix(geo, ext[A].value(y));
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) out[idx++] = qm(r, c);
    }
    return out;
  };

  double h = backend.outer_step();
  check_stencil(chart->domain, pt.coords, h);

  // coordinate partials of the stack
  std::vector<Eigen::VectorXd> dstack(n);
  for (int m = 0; m < n; ++m) dstack[m] = fd_partial(stacked, pt.coords, m, h, true);

  auto rp_partial = [&](int m, int i, int j) {
    double sign = 1.0;
    if (i == j) return Eigen::MatrixXd::Zero(n, n).eval();
    int a = i, b = j;
    if (a > b) {
      std::swap(a, b);
      sign = -1.0;
    }
    int pair_index = a * n - a * (a + 1) / 2 + (b - a - 1);
    Eigen::MatrixXd out(n, n);
    int base = pair_index * n * n;
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) out(r, c) = dstack[m][base + c * n + r];
    return Eigen::MatrixXd(sign * out).eval();
  };
  auto q_partial = [&](int m, int A) {
    Eigen::MatrixXd out(n, n);
    int base = pairs * n * n + A * n * n;
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) out(r, c) = dstack[m][base + c * n + r];
    return out;
  };

  const PointGeometry& geo = bg.pg;

  // (D_X R')(Y,Z) = nabla'_X R'(Y,Z) - R'(nabla~_X Y, Z) - R'(Y, nabla~_X Z)
  bg.DRp.assign(n, std::vector<std::vector<Eigen::MatrixXd>>(
                       n, std::vector<Eigen::MatrixXd>(n)));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::MatrixXd acc = rp_partial(m, i, j) +
                              commutator(geo.base.gamma_dir[m], geo.rprime[i][j]) -
                              commutator(geo.xi[m], geo.rprime[i][j]);
        for (int k = 0; k < n; ++k)
          acc -= geo.gamma_t[k](m, i) * geo.rprime[k][j] +
                 geo.gamma_t[k](m, j) * geo.rprime[i][k];
        bg.DRp[m][i][j] = acc;
      }

  // (D_X Q)_a(Y) = nabla~_X Q_a(Y) - Q_{nabla'_X a}(Y) - Q_a(nabla~_X Y)
  bg.DQ.assign(n, std::vector<Eigen::MatrixXd>(dim_g));
  std::vector<std::vector<Eigen::MatrixXd>> ext_parts_all(dim_g);
  for (int A = 0; A < dim_g; ++A) ext_parts_all[A] = ext[A].partials(pt.coords);
  for (int m = 0; m < n; ++m)
    for (int A = 0; A < dim_g; ++A) {
      const auto& ext_parts = ext_parts_all[A];
      const Eigen::MatrixXd& alpha = geo.basis_g[A];
      Eigen::MatrixXd nprime_alpha = ext_parts[m] +
                                     commutator(geo.base.gamma_dir[m], alpha) -
                                     commutator(geo.xi[m], alpha);
      Eigen::MatrixXd q_of_nprime = q_matrix(geo, nprime_alpha);
      Eigen::MatrixXd acc = q_partial(m, A) + bg.gamma_t_dir[m] * bg.Q[A] -
                            q_of_nprime;
      // - Q_a(nabla~_m d_j): column correction
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) acc.col(j) -= geo.gamma_t[k](m, j) * bg.Q[A].col(k);
      bg.DQ[m][A] = acc;
    }

  return bg;
}

// ---------------------------------------------------------------------------
// Curvature tensor of P
// ---------------------------------------------------------------------------

namespace {

struct PDecomp {
  Eigen::VectorXd X;
  Eigen::MatrixXd beta;
};

PDecomp decompose_ptangent(const PointGeometry& geo, const BundleVector& v) {
  return PDecomp{v.hor, v.ver - geo.xi_of(v.hor)};
}

BundleVector lift_pair(const PointGeometry& geo, const Eigen::VectorXd& hor,
                       const Eigen::MatrixXd& ver_g) {
  return BundleVector{hor, geo.xi_of(hor) + ver_g, BundleFlavor::PTangent};
}

}  // namespace

BundleVector curvature_P(const BundleGeometry& bg, const BundleVector& u,
                         const BundleVector& v, const BundleVector& w) {
  const PointGeometry& geo = bg.pg;
  const int n = geo.n();
  PDecomp du = decompose_ptangent(geo, u);
  PDecomp dv = decompose_ptangent(geo, v);
  PDecomp dw = decompose_ptangent(geo, w);

  Eigen::VectorXd hor = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd ver_g = Eigen::MatrixXd::Zero(n, n);

  const Eigen::VectorXd &X = du.X, &Y = dv.X, &Z = dw.X;
  const Eigen::MatrixXd &a = du.beta, &b = dv.beta, &c = dw.beta;

  // R(X^{h'}, Y^{h'}) Z^{h'}
  hor += bg.tilde.riem_of(X, Y) * Z;
  hor += -0.25 * (q_apply(geo, geo.rprime_of(Y, Z), X) -
                  q_apply(geo, geo.rprime_of(X, Z), Y) -
                  2.0 * q_apply(geo, geo.rprime_of(X, Y), Z));
  ver_g += -0.5 * bg.drp_of(X, Y, Z) + 0.5 * bg.drp_of(Y, X, Z);

  // R(X^{h'}, Y^{h'}) c^*
  hor += 0.5 * (bg.dq_of(X, c, Y) - bg.dq_of(Y, c, X));
  ver_g += 0.5 * commutator(geo.rprime_of(X, Y), c);
  ver_g += -0.25 * (geo.rprime_of(X, q_apply(geo, c, Y)) -
                    geo.rprime_of(Y, q_apply(geo, c, X)));

  // R(X^{h'}, b^*) Z^{h'}  and the antisymmetric partner R(a^*, Y^{h'}) Z^{h'}
  auto mixed_hvh = [&](const Eigen::VectorXd& Xh, const Eigen::MatrixXd& bv,
                       double sign) {
    hor += sign * 0.5 * bg.dq_of(Xh, bv, Z);
    ver_g += sign * -0.25 * (geo.rprime_of(Xh, q_apply(geo, bv, Z)) +
                             commutator(bv, geo.rprime_of(Xh, Z)));
  };
  mixed_hvh(X, b, 1.0);
  mixed_hvh(Y, a, -1.0);

  // R(X^{h'}, b^*) c^*  and partner
  auto mixed_hvv = [&](const Eigen::VectorXd& Xh, const Eigen::MatrixXd& bv,
                       double sign) {
    hor += sign * -0.25 * (q_apply(geo, commutator(bv, c), Xh) +
                           q_apply(geo, bv, q_apply(geo, c, Xh)));
  };
  mixed_hvv(X, b, 1.0);
  mixed_hvv(Y, a, -1.0);

  // R(a^*, b^*) Z^{h'}
  hor += 0.25 * (q_apply(geo, a, q_apply(geo, b, Z)) -
                 q_apply(geo, b, q_apply(geo, a, Z))) +
         0.5 * q_apply(geo, commutator(a, b), Z);

  // R(a^*, b^*) c^*
  ver_g += -0.25 * commutator(commutator(a, b), c);

  return lift_pair(geo, hor, ver_g);
}

std::vector<BundleVector> ptangent_basis(const PointGeometry& geo) {
  std::vector<BundleVector> basis;
  for (int i = 0; i < geo.n(); ++i)
    basis.push_back(lift_horizontal(geo, geo.frame_t.vectors.col(i)));
  for (const auto& alpha : geo.basis_g) basis.push_back(lift_vertical(alpha));
  return basis;
}

// ---------------------------------------------------------------------------
// Ricci / sectional / scalar
// ---------------------------------------------------------------------------

double ricci_P_closed(const BundleGeometry& bg, const BundleVector& u,
                      const BundleVector& v) {
  const PointGeometry& geo = bg.pg;
  const int n = geo.n();
  PDecomp du = decompose_ptangent(geo, u);
  PDecomp dv = decompose_ptangent(geo, v);

  auto tilde_ricci = [&](const Eigen::VectorXd& A, const Eigen::VectorXd& B) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e = geo.frame_t.vectors.col(i);
      acc += geo.gtdot(bg.tilde.riem_of(e, A) * B, e);
    }
    return acc;
  };

  double out = 0.0;
  // horizontal-horizontal block
  {
    const Eigen::VectorXd &X = du.X, &Y = dv.X;
    double acc = tilde_ricci(X, Y);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e = geo.frame_t.vectors.col(i);
      acc -= 0.75 * killing_pairing(geo.rprime_of(X, e), geo.rprime_of(Y, e));
    }
    for (int A = 0; A < bg.dim_g(); ++A)
      acc += 0.25 * geo.gtdot(bg.Q[A] * X, bg.Q[A] * Y);
    out += acc;
  }
  // mixed blocks
  auto mixed = [&](const Eigen::VectorXd& X, const Eigen::MatrixXd& gamma) {
    double div_q = 0.0, tr_dq = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e = geo.frame_t.vectors.col(i);
      div_q += geo.gtdot(bg.dq_of(e, gamma, X), e);
      tr_dq += geo.gtdot(bg.dq_of(X, gamma, e), e);
    }
    return 0.5 * (div_q - tr_dq);
  };
  out += mixed(du.X, dv.beta) + mixed(dv.X, du.beta);
  // vertical-vertical block
  {
    const Eigen::MatrixXd &b = du.beta, &c = dv.beta;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e = geo.frame_t.vectors.col(i);
      acc += geo.gtdot(q_apply(geo, b, e), q_apply(geo, c, e));
    }
    for (const auto& alpha : geo.basis_g)
      acc += killing_pairing(commutator(alpha, b), commutator(alpha, c));
    out += 0.25 * acc;
  }
  return out;
}

double ricci_P_trace(const BundleGeometry& bg, const BundleVector& u,
                     const BundleVector& v) {
  double acc = 0.0;
  for (const auto& w : ptangent_basis(bg.pg))
    acc += bundle_dot(bg.pg, curvature_P(bg, w, u, v), w);
  return acc;
}

double sectional_P(const BundleGeometry& bg, const BundleVector& u,
                   const BundleVector& v) {
  double uu = bundle_dot(bg.pg, u, u);
  double vv = bundle_dot(bg.pg, v, v);
  double uv = bundle_dot(bg.pg, u, v);
  double num = bundle_dot(bg.pg, curvature_P(bg, u, v, v), u);
  return num / (uu * vv - uv * uv);
}

double scalar_P_closed(const BundleGeometry& bg) {
  const PointGeometry& geo = bg.pg;
  const int n = geo.n();
  double s = 0.0;
  // scalar curvature of the transfer metric
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd ei = geo.frame_t.vectors.col(i);
      Eigen::VectorXd ej = geo.frame_t.vectors.col(j);
      s += geo.gtdot(bg.tilde.riem_of(ei, ej) * ej, ei);
      s -= 0.75 * killing_pairing(geo.rprime_of(ei, ej), geo.rprime_of(ei, ej));
    }
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd ei = geo.frame_t.vectors.col(i);
    for (int A = 0; A < bg.dim_g(); ++A) {
      Eigen::VectorXd qe = bg.Q[A] * ei;
      s += 0.5 * geo.gtdot(qe, qe);
    }
  }
  for (const auto& a : geo.basis_g)
    for (const auto& b : geo.basis_g) {
      Eigen::MatrixXd br = commutator(a, b);
      s += 0.25 * killing_pairing(br, br);
    }
  return s;
}

double scalar_P_trace(const BundleGeometry& bg) {
  double acc = 0.0;
  for (const auto& u : ptangent_basis(bg.pg)) acc += ricci_P_trace(bg, u, u);
  return acc;
}

// ---------------------------------------------------------------------------
// Extrinsic geometry
// ---------------------------------------------------------------------------

double SecondFundamentalPairing::max_abs() const {
  double r = 0.0;
  for (const auto& t : table) r = std::max(r, t.cwiseAbs().maxCoeff());
  return r;
}

double SecondFundamentalPairing::symmetry_residual() const {
  double r = 0.0;
  for (const auto& t : table)
    r = std::max(r, (t - t.transpose()).cwiseAbs().maxCoeff());
  return r;
}

SecondFundamentalPairing second_fundamental_form(const PointGeometry& geo) {
  const int n = geo.n();
  const int dim_g = static_cast<int>(geo.basis_g.size());
  const int dim_m = static_cast<int>(geo.basis_m.size());
  const int dim_p = n + dim_g;

  SecondFundamentalPairing out;
  out.table.assign(dim_m, Eigen::MatrixXd::Zero(dim_p, dim_p));

  std::vector<Eigen::MatrixXd> r_xi(n);  // R_{xi_{e_i}} for the gt-frame vectors
  for (int i = 0; i < n; ++i)
    r_xi[i] = r_operator(geo, geo.xi_of(geo.frame_t.vectors.col(i)));

  for (int a = 0; a < dim_m; ++a) {
    const Eigen::MatrixXd& alpha = geo.basis_m[a];
    Eigen::MatrixXd& tab = out.table[a];
    // horizontal-horizontal block
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd X = geo.frame_t.vectors.col(i);
        Eigen::VectorXd Y = geo.frame_t.vectors.col(j);
        Eigen::MatrixXd sym = geo.nabla_xi_of(X, Y) + geo.nabla_xi_of(Y, X) -
                              geo.xi_of(r_xi[i] * Y + r_xi[j] * X);
        tab(i, j) = 0.5 * killing_pairing(sym, alpha);
      }
    // horizontal-vertical blocks
    for (int i = 0; i < n; ++i)
      for (int A = 0; A < dim_g; ++A) {
        Eigen::VectorXd X = geo.frame_t.vectors.col(i);
        const Eigen::MatrixXd& gamma = geo.basis_g[A];
        Eigen::MatrixXd val = geo.project_m(commutator(geo.xi_of(X), gamma)) -
                              geo.xi_of(r_op(geo, gamma, X));
        double entry = 0.5 * killing_pairing(val, alpha);
        tab(i, n + A) = entry;
        tab(n + A, i) = entry;
      }
    // vertical-vertical block vanishes
  }
  return out;
}

MinimalityResult minimality_residual(const PointGeometry& geo) {
  const int n = geo.n();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = geo.frame_t.vectors.col(i);
    Eigen::MatrixXd xi_e = geo.xi_of(e);
    acc += geo.nabla_xi_of(e, e) - geo.xi_of(r_operator(geo, xi_e) * e);
  }
  return MinimalityResult{acc, bnorm(acc)};
}

HarmonicityResult harmonicity_residuals(const PointGeometry& geo) {
  const int n = geo.n();
  HarmonicityResult out;
  out.h1 = Eigen::MatrixXd::Zero(n, n);
  out.h2 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = geo.frame_t.vectors.col(i);
    Eigen::VectorXd s = geo.s_of(e, e);
    out.h1 += geo.nabla_xi_of(e, e) - geo.xi_of(s);
    out.h2 += r_operator(geo, geo.xi_of(e)) * e - s;
  }
  out.h1_norm = bnorm(out.h1);
  out.h2_norm = geo.base.gnorm(out.h2);
  return out;
}

}  // namespace gtorsion
