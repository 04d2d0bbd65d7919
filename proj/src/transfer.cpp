#include "gtorsion/transfer.hpp"

namespace gtorsion {

Eigen::VectorXd xi_dot_unchecked(const PointGeometry& geo, const Eigen::MatrixXd& alpha) {
  const int n = geo.n();
  Eigen::VectorXd covector(n);
  for (int l = 0; l < n; ++l) covector[l] = -killing_pairing(alpha, geo.xi[l]);
  return geo.base.g_inv * covector;
}

Eigen::VectorXd xi_dot(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                       double tol_struct) {
  Eigen::MatrixXd g_part = geo.project_g(alpha);
  if (g_part.cwiseAbs().maxCoeff() > tol_struct * (1.0 + alpha.cwiseAbs().maxCoeff()))
    throw NotInMError("argument has a g(M)-part beyond tolerance");
  return xi_dot_unchecked(geo, alpha);
}

std::pair<TransferTensor, TildeMetric> transfer(const ChartPoint& pt,
                                                const ProjectorField& proj,
                                                const Backend& backend) {
  PointGeometry geo = point_geometry(pt, proj, backend);
  return {TransferTensor{geo.L, pt.coords}, TildeMetric{geo.gt, pt.coords}};
}

NablaLResult nabla_L(const PointGeometry& geo, const Eigen::VectorXd& X,
                     const Eigen::VectorXd& Y, const Eigen::VectorXd& Z) {
  const int n = geo.n();
  // d_m L = d_m g^{-1} gt + g^{-1} d_m gt, with d_m gt_ij = d_m g_ij
  // - tr(d_m xi_i xi_j) - tr(xi_i d_m xi_j).
  Eigen::MatrixXd nablaL_X = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    if (X[m] == 0.0) continue;
    Eigen::MatrixXd dgt(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dgt(i, j) = geo.base.dg[m](i, j) - (geo.dxi[m][i] * geo.xi[j]).trace() -
                    (geo.xi[i] * geo.dxi[m][j]).trace();
    Eigen::MatrixXd dginv = -geo.base.g_inv * geo.base.dg[m] * geo.base.g_inv;
    Eigen::MatrixXd dL = dginv * geo.gt + geo.base.g_inv * dgt;
    // covariant correction for a (1,1)-tensor
    nablaL_X += X[m] * (dL + geo.base.gamma_dir[m] * geo.L - geo.L * geo.base.gamma_dir[m]);
  }
  NablaLResult out{};
  out.lhs = geo.base.gdot(nablaL_X * Y, Z);
  out.rhs = killing_pairing(geo.nabla_xi_of(X, Y), geo.xi_of(Z)) +
            killing_pairing(geo.nabla_xi_of(X, Z), geo.xi_of(Y));
  return out;
}

DifferenceTensor difference_tensor(const ChartPoint& pt, const ProjectorField& proj,
                                   const Backend& backend) {
  PointGeometry geo = point_geometry(pt, proj, backend);
  return DifferenceTensor{std::move(geo.S), pt.coords};
}

std::shared_ptr<Chart> tilde_chart(std::shared_ptr<const Chart> chart,
                                   const ProjectorField& proj, const Backend& backend,
                                   bool fd_jets_only) {
  auto out = std::make_shared<Chart>();
  out->name = chart->name + "~";
  out->dim = chart->dim;
  out->domain = chart->domain;
  out->domain_margin = chart->domain_margin;
  const int n = chart->dim;

  std::shared_ptr<const Chart> base = chart;
  out->metric = [base, proj, backend, n](const Eigen::VectorXd& x) {
    PointGeometry geo = point_geometry_at(base, proj, x, backend);
    return geo.gt;
  };

  if (fd_jets_only) return out;
  out->prefer_jet = true;

  // First derivatives of gt from the torsion jet; second derivatives by
  // Richardson differences of that (exactly computed) field.
  auto dgt_at = [base, proj, backend, n](const Eigen::VectorXd& x) {
    PointGeometry geo = point_geometry_at(base, proj, x, backend);
    std::vector<Eigen::MatrixXd> dgt(n, Eigen::MatrixXd(n, n));
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dgt[m](i, j) = geo.base.dg[m](i, j) - (geo.dxi[m][i] * geo.xi[j]).trace() -
                         (geo.xi[i] * geo.dxi[m][j]).trace();
    return dgt;
  };

  Box domain = chart->domain;
  auto metric_fn = out->metric;
  double h = backend.outer_step();
  out->metric_jet = [metric_fn, dgt_at, domain, h, n](const Eigen::VectorXd& x) {
    MetricJet jet;
    jet.g = metric_fn(x);
    jet.dg = dgt_at(x);
    check_stencil(domain, x, h);
    StackedFn stacked = [&dgt_at, n](const Eigen::VectorXd& y) {
      auto dgt = dgt_at(y);
      Eigen::VectorXd v(n * n * n);
      int idx = 0;
      for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v[idx++] = dgt[m](i, j);
      return v;
    };
    jet.d2g.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd(n, n)));
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd d = fd_partial(stacked, x, k, h, true);
      int idx = 0;
      for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) jet.d2g[k][m](i, j) = d[idx++];
    }
    // symmetrize the mixed partials
    for (int k = 0; k < n; ++k)
      for (int m = k + 1; m < n; ++m) {
        Eigen::MatrixXd sym = 0.5 * (jet.d2g[k][m] + jet.d2g[m][k]);
        jet.d2g[k][m] = sym;
        jet.d2g[m][k] = sym;
      }
    return jet;
  };
  return out;
}

}  // namespace gtorsion
