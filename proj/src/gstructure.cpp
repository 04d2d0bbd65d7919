#include "gtorsion/gstructure.hpp"

#include <algorithm>
#include <cmath>

namespace gtorsion {

ProjectorJet projector_jet_at(const Chart& chart, const ProjectorField& proj,
                              const Eigen::VectorXd& x, const Backend& backend) {
  const int n = chart.dim;
  bool analytic = backend.kind == BackendKind::Analytic && proj.jet;
  if (analytic) return proj.jet(x);

  double h = backend.kind == BackendKind::Analytic ? 1e-3 : backend.jet_step();
  bool rich = backend.kind != BackendKind::FiniteDiff;
  double h2 = second_diff_step(h, rich);
  check_stencil(chart.domain, x, std::max(h, h2));
  StackedFn f = [&proj, n](const Eigen::VectorXd& y) {
    Eigen::MatrixXd p = proj.value(y);
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(p.data(), n * n));
  };
  auto unstack = [n](const Eigen::VectorXd& v) {
    return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n));
  };
  ProjectorJet jet;
  jet.p = proj.value(x);
  jet.dp.resize(n);
  jet.d2p.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (int k = 0; k < n; ++k) jet.dp[k] = unstack(fd_partial(f, x, k, h, rich));
  for (int k = 0; k < n; ++k)
    for (int l = k; l < n; ++l) {
      jet.d2p[k][l] = unstack(fd_partial2(f, x, k, l, h2, rich));
      if (l != k) jet.d2p[l][k] = jet.d2p[k][l];
    }
  return jet;
}

// ---------------------------------------------------------------------------
// PointGeometry helpers
// ---------------------------------------------------------------------------

Eigen::MatrixXd PointGeometry::xi_of(const Eigen::VectorXd& X) const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n(), n());
  for (int a = 0; a < n(); ++a)
    if (X[a] != 0.0) r += X[a] * xi[a];
  return r;
}

Eigen::MatrixXd PointGeometry::nabla_xi_of(const Eigen::VectorXd& X,
                                           const Eigen::VectorXd& Y) const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n(), n());
  for (int l = 0; l < n(); ++l) {
    if (X[l] == 0.0) continue;
    for (int a = 0; a < n(); ++a)
      if (Y[a] != 0.0) r += X[l] * Y[a] * nabla_xi[l][a];
  }
  return r;
}

Eigen::MatrixXd PointGeometry::rprime_of(const Eigen::VectorXd& X,
                                         const Eigen::VectorXd& Y) const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n(), n());
  for (int i = 0; i < n(); ++i) {
    if (X[i] == 0.0) continue;
    for (int j = 0; j < n(); ++j)
      if (Y[j] != 0.0) r += X[i] * Y[j] * rprime[i][j];
  }
  return r;
}

Eigen::VectorXd PointGeometry::s_of(const Eigen::VectorXd& X,
                                    const Eigen::VectorXd& Y) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n());
  for (int i = 0; i < n(); ++i) {
    if (X[i] == 0.0) continue;
    for (int j = 0; j < n(); ++j)
      if (Y[j] != 0.0) r += X[i] * Y[j] * S[i].col(j);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Geometry construction
// ---------------------------------------------------------------------------

static AdaptedFrame gram_schmidt_over(const Eigen::MatrixXd& metric,
                                      const Eigen::MatrixXd& vectors, int split_rank) {
  const int n = static_cast<int>(metric.rows());
  AdaptedFrame out;
  out.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd v = vectors.col(j);
    for (int i = 0; i < j; ++i)
      v -= out.vectors.col(i).dot(metric * v) * out.vectors.col(i);
    double norm = std::sqrt(std::max(0.0, v.dot(metric * v)));
    if (norm <= 1e-12)
      throw RankDeficientError("degenerate basis during re-orthonormalization");
    out.vectors.col(j) = v / norm;
  }
  out.coframe = out.vectors.inverse();
  out.split_rank = split_rank;
  return out;
}

PointGeometry point_geometry_at(std::shared_ptr<const Chart> chart,
                                const ProjectorField& proj, const Eigen::VectorXd& x,
                                const Backend& backend) {
  PointGeometry geo;
  geo.base = base_geometry(chart, x, backend);
  const int n = geo.base.n;
  geo.m = proj.rank;

  ProjectorJet pj = projector_jet_at(*chart, proj, x, backend);
  geo.p = std::move(pj.p);
  geo.q = Eigen::MatrixXd::Identity(n, n) - geo.p;
  geo.dp = std::move(pj.dp);
  geo.d2p = std::move(pj.d2p);

  if ((geo.p * geo.p - geo.p).cwiseAbs().maxCoeff() > 1e-8 ||
      (geo.base.g * geo.p - geo.p.transpose() * geo.base.g).cwiseAbs().maxCoeff() > 1e-8)
    throw ConfigError("projector field is not a g-orthogonal projector at the point");

  const auto& gamma_dir = geo.base.gamma_dir;
  const auto& dgamma = geo.base.dgamma;

  // (nabla_a p) = d_a p + [Gamma_a, p]
  geo.nabla_p.resize(n);
  for (int a = 0; a < n; ++a)
    geo.nabla_p[a] = geo.dp[a] + gamma_dir[a] * geo.p - geo.p * gamma_dir[a];

  // xi_a = (I - 2p)(nabla_a p)
  Eigen::MatrixXd refl = Eigen::MatrixXd::Identity(n, n) - 2.0 * geo.p;
  geo.xi.resize(n);
  for (int a = 0; a < n; ++a) geo.xi[a] = refl * geo.nabla_p[a];

  // d_l Gamma_a as a matrix: (i,k) -> d_l G^i_{ak}
  std::vector<std::vector<Eigen::MatrixXd>> dgamma_dir(
      n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd(n, n)));
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) dgamma_dir[l][a](i, k) = dgamma[l][i](a, k);

  // d_l xi_a = -2 (d_l p)(nabla_a p) + (I-2p) d_l(nabla_a p)
  geo.dxi.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a) {
      Eigen::MatrixXd dnp = geo.d2p[l][a] + dgamma_dir[l][a] * geo.p +
                            gamma_dir[a] * geo.dp[l] - geo.dp[l] * gamma_dir[a] -
                            geo.p * dgamma_dir[l][a];
      geo.dxi[l][a] = -2.0 * geo.dp[l] * geo.nabla_p[a] + refl * dnp;
    }

  // (nabla_l xi)_a = d_l xi_a + [Gamma_l, xi_a] - G^b_{la} xi_b
  geo.nabla_xi.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a) {
      Eigen::MatrixXd acc = geo.dxi[l][a] + gamma_dir[l] * geo.xi[a] -
                            geo.xi[a] * gamma_dir[l];
      for (int b = 0; b < n; ++b) acc -= geo.base.gamma[b](l, a) * geo.xi[b];
      geo.nabla_xi[l][a] = acc;
    }

  // Transfer tensor and metric: gt_ij = g_ij + B(xi_i, xi_j), L = g^{-1} gt.
  Eigen::MatrixXd bmat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      bmat(i, j) = killing_pairing(geo.xi[i], geo.xi[j]);
      bmat(j, i) = bmat(i, j);
    }
  geo.gt = geo.base.g + bmat;
  geo.L = geo.base.g_inv * geo.gt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(geo.gt);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw IllConditionedTransferError("transfer metric lost positive definiteness");
  geo.gt_inv = geo.gt.inverse();
  geo.L_inv = geo.gt_inv * geo.base.g;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(geo.gt, geo.base.g);
  double lmin = ges.eigenvalues().minCoeff();
  double lmax = ges.eigenvalues().maxCoeff();
  if (lmax / lmin > 1e8)
    throw IllConditionedTransferError("transfer tensor condition number exceeds 1e8");

  // Difference tensor S from the covector identity
  //   2 g(S(X,Y), LZ) = B((nabla_X xi)_Y + (nabla_Y xi)_X, xi_Z)
  //                   + B((nabla_X xi)_Z - (nabla_Z xi)_X, xi_Y)
  //                   + B((nabla_Y xi)_Z - (nabla_Z xi)_Y, xi_X),
  // solved for S(d_i, d_j) through gt.
  geo.S.assign(n, Eigen::MatrixXd(n, n));
  const auto& nx = geo.nabla_xi;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd c(n);
      for (int k = 0; k < n; ++k) {
        double v = killing_pairing(nx[i][j] + nx[j][i], geo.xi[k]) +
                   killing_pairing(nx[i][k] - nx[k][i], geo.xi[j]) +
                   killing_pairing(nx[j][k] - nx[k][j], geo.xi[i]);
        c[k] = 0.5 * v;
      }
      Eigen::VectorXd s = geo.gt_inv * c;
      for (int k = 0; k < n; ++k) geo.S[i](k, j) = s[k];
    }

  geo.gamma_t.resize(n);
  for (int k = 0; k < n; ++k) {
    geo.gamma_t[k] = geo.base.gamma[k];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) geo.gamma_t[k](i, j) += geo.S[i](k, j);
  }

  // R'(d_i, d_j) = R(d_i, d_j)_g - [xi_i, xi_j]_g
  geo.rprime.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      geo.rprime[i][j] =
          geo.project_g(geo.base.riem[i][j]) - geo.project_g(commutator(geo.xi[i], geo.xi[j]));

  geo.frame = adapted_frame_for(geo.base.g, geo.p, geo.m);
  geo.frame_t = gram_schmidt_over(geo.gt, geo.frame.vectors, geo.m);

  // B-orthonormal vertical bases from the adapted frame: E_ab / sqrt(2).
  auto generator = [&](int a, int b) {
    Eigen::VectorXd ea = geo.frame.vectors.col(a), eb = geo.frame.vectors.col(b);
    Eigen::MatrixXd E = ea * (geo.base.g * eb).transpose() -
                        eb * (geo.base.g * ea).transpose();
    return Eigen::MatrixXd(E / std::sqrt(2.0));
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (a < geo.m && b >= geo.m)
        geo.basis_m.push_back(generator(a, b));
      else
        geo.basis_g.push_back(generator(a, b));
    }

  return geo;
}

PointGeometry point_geometry(const ChartPoint& pt, const ProjectorField& proj,
                             const Backend& backend) {
  return point_geometry_at(pt.chart, proj, pt.coords, backend);
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

std::pair<SkewEndomorphism, SkewEndomorphism> split_skew(const SkewEndomorphism& a,
                                                         const PointGeometry& geo,
                                                         double tol_frame) {
  double resid = skewness_residual(a.matrix, geo.base.g);
  if (resid > tol_frame * (1.0 + a.matrix.cwiseAbs().maxCoeff()))
    throw NotSkewError("input endomorphism is not g-skew");
  SkewEndomorphism ag{geo.project_g(a.matrix), a.base_pt};
  SkewEndomorphism am{geo.project_m(a.matrix), a.base_pt};
  return {std::move(ag), std::move(am)};
}

TorsionTensor intrinsic_torsion(const ChartPoint& pt, const ProjectorField& proj,
                                const Backend& backend) {
  PointGeometry geo = point_geometry(pt, proj, backend);
  return TorsionTensor{std::move(geo.xi), pt.coords};
}

Eigen::MatrixXd nabla_endo(const PointGeometry& geo, const EndoField& field, int m_dir,
                           const std::vector<Eigen::MatrixXd>* partials) {
  Eigen::MatrixXd d;
  if (partials) {
    d = (*partials)[m_dir];
  } else {
    auto parts = field_partials(field, geo.base.chart->domain, geo.base.x, geo.base.backend);
    d = parts[m_dir];
  }
  Eigen::MatrixXd a = field.value(geo.base.x);
  return d + geo.base.gamma_dir[m_dir] * a - a * geo.base.gamma_dir[m_dir];
}

SkewEndomorphism minimal_connection_derivative(const EndoField& alpha_field,
                                               const Eigen::VectorXd& X,
                                               const PointGeometry& geo) {
  const int n = geo.n();
  auto parts = field_partials(alpha_field, geo.base.chart->domain, geo.base.x,
                              geo.base.backend);
  Eigen::MatrixXd alpha = alpha_field.value(geo.base.x);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    if (X[m] == 0.0) continue;
    acc += X[m] * (parts[m] + geo.base.gamma_dir[m] * alpha - alpha * geo.base.gamma_dir[m]);
  }
  acc -= commutator(geo.xi_of(X), alpha);
  return SkewEndomorphism{std::move(acc), geo.base.x};
}

SkewEndomorphism structure_curvature(const PointGeometry& geo, const Eigen::VectorXd& X,
                                     const Eigen::VectorXd& Y) {
  return SkewEndomorphism{geo.rprime_of(X, Y), geo.base.x};
}

// ---------------------------------------------------------------------------
// Extension fields
// ---------------------------------------------------------------------------

namespace {

struct ExtensionPieces {
  Eigen::MatrixXd g, g_inv, p, q;
  std::vector<Eigen::MatrixXd> dg, dp;
};

ExtensionPieces extension_pieces(const Chart& chart, const ProjectorField& proj,
                                 const Eigen::VectorXd& y, const Backend& backend,
                                 bool with_partials) {
  ExtensionPieces out;
  const int n = chart.dim;
  if (with_partials) {
    MetricJet mj = metric_jet_at(chart, y, backend);
    ProjectorJet pj = projector_jet_at(chart, proj, y, backend);
    out.g = std::move(mj.g);
    out.dg = std::move(mj.dg);
    out.p = std::move(pj.p);
    out.dp = std::move(pj.dp);
  } else {
    out.g = chart.metric(y);
    out.p = proj.value(y);
  }
  out.g_inv = out.g.inverse();
  out.q = Eigen::MatrixXd::Identity(n, n) - out.p;
  return out;
}

EndoField projected_extension(const PointGeometry& geo, const ProjectorField& proj,
                              const Eigen::MatrixXd& seed, bool g_part) {
  auto chart = geo.base.chart;
  Backend backend = geo.base.backend;
  EndoField field;
  field.value = [chart, proj, seed, backend, g_part](const Eigen::VectorXd& y) {
    auto ep = extension_pieces(*chart, proj, y, backend, false);
    Eigen::MatrixXd sk = 0.5 * (seed - ep.g_inv * seed.transpose() * ep.g);
    return g_part ? Eigen::MatrixXd(ep.p * sk * ep.p + ep.q * sk * ep.q)
                  : Eigen::MatrixXd(ep.p * sk * ep.q + ep.q * sk * ep.p);
  };
  field.partials = [chart, proj, seed, backend, g_part](const Eigen::VectorXd& y) {
    auto ep = extension_pieces(*chart, proj, y, backend, true);
    const int n = chart->dim;
    Eigen::MatrixXd sk = 0.5 * (seed - ep.g_inv * seed.transpose() * ep.g);
    std::vector<Eigen::MatrixXd> out(n);
    for (int m = 0; m < n; ++m) {
      Eigen::MatrixXd dginv = -ep.g_inv * ep.dg[m] * ep.g_inv;
      Eigen::MatrixXd dsk =
          0.5 * (-dginv * seed.transpose() * ep.g - ep.g_inv * seed.transpose() * ep.dg[m]);
      Eigen::MatrixXd dq = -ep.dp[m];
      if (g_part) {
        out[m] = ep.dp[m] * sk * ep.p + ep.p * dsk * ep.p + ep.p * sk * ep.dp[m] +
                 dq * sk * ep.q + ep.q * dsk * ep.q + ep.q * sk * dq;
      } else {
        out[m] = ep.dp[m] * sk * ep.q + ep.p * dsk * ep.q + ep.p * sk * dq +
                 dq * sk * ep.p + ep.q * dsk * ep.p + ep.q * sk * ep.dp[m];
      }
    }
    return out;
  };
  return field;
}

}  // namespace

EndoField g_valued_extension(const PointGeometry& geo, const ProjectorField& proj,
                             const Eigen::MatrixXd& seed) {
  return projected_extension(geo, proj, seed, true);
}

EndoField m_valued_extension(const PointGeometry& geo, const ProjectorField& proj,
                             const Eigen::MatrixXd& seed) {
  return projected_extension(geo, proj, seed, false);
}

}  // namespace gtorsion
