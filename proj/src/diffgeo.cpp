#include "gtorsion/diffgeo.hpp"

#include <algorithm>
#include <cmath>

namespace gtorsion {

std::string backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::Analytic: return "analytic";
    case BackendKind::FiniteDiff: return "fd";
    case BackendKind::FiniteDiffRichardson: return "fd-richardson";
  }
  return "analytic";
}

BackendKind backend_from_name(const std::string& name) {
  if (name == "analytic") return BackendKind::Analytic;
  if (name == "fd") return BackendKind::FiniteDiff;
  if (name == "fd-richardson") return BackendKind::FiniteDiffRichardson;
  throw ConfigError("unknown backend: " + name);
}

uint64_t hash_string(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ChartPoint make_point(std::shared_ptr<const Chart> chart, Eigen::VectorXd coords) {
  if (coords.size() != chart->dim)
    throw ConfigError("point dimension mismatch on chart " + chart->name);
  if (!chart->domain.contains(coords, chart->domain_margin))
    throw OutOfDomainError("point violates the interior margin of chart " + chart->name);
  return ChartPoint{std::move(chart), std::move(coords)};
}

// ---------------------------------------------------------------------------
// FD engine
// ---------------------------------------------------------------------------

void check_stencil(const Box& domain, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd lo = x.array() - h;
  Eigen::VectorXd hi = x.array() + h;
  if (!domain.contains(lo, 0.0) || !domain.contains(hi, 0.0))
    throw StencilOutOfDomainError("finite-difference stencil exits the chart domain");
}

static Eigen::VectorXd central_diff(const StackedFn& f, const Eigen::VectorXd& x,
                                    int k, double h) {
  Eigen::VectorXd xp = x, xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

Eigen::VectorXd fd_partial(const StackedFn& f, const Eigen::VectorXd& x, int k,
                           double h, bool richardson) {
  if (!richardson) return central_diff(f, x, k, h);
  Eigen::VectorXd d1 = central_diff(f, x, k, h);
  Eigen::VectorXd d2 = central_diff(f, x, k, h / 2.0);
  return (4.0 * d2 - d1) / 3.0;
}

static Eigen::VectorXd central_diff2(const StackedFn& f, const Eigen::VectorXd& x,
                                     int k, int l, double h) {
  if (k == l) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    return (f(xp) - 2.0 * f(x) + f(xm)) / (h * h);
  }
  Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
  xpp[k] += h; xpp[l] += h;
  xpm[k] += h; xpm[l] -= h;
  xmp[k] -= h; xmp[l] += h;
  xmm[k] -= h; xmm[l] -= h;
  return (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
}

Eigen::VectorXd fd_partial2(const StackedFn& f, const Eigen::VectorXd& x, int k,
                            int l, double h, bool richardson) {
  if (!richardson) return central_diff2(f, x, k, l, h);
  Eigen::VectorXd d1 = central_diff2(f, x, k, l, h);
  Eigen::VectorXd d2 = central_diff2(f, x, k, l, h / 2.0);
  return (4.0 * d2 - d1) / 3.0;
}

// ---------------------------------------------------------------------------
// Metric jets
// ---------------------------------------------------------------------------

// Second-difference stencils balance truncation against rounding near
// eps^(1/4); plain central differencing therefore widens the step for the
// second-derivative passes while Richardson keeps its base step.
double second_diff_step(double h, bool richardson) {
  return richardson ? h : std::max(h, 1e-4);
}

static MetricJet metric_jet_fd(const Chart& chart, const Eigen::VectorXd& x,
                               double h, bool richardson, bool second_order) {
  const int n = chart.dim;
  double h2 = second_diff_step(h, richardson);
  check_stencil(chart.domain, x, second_order ? std::max(h, h2) : h);
  StackedFn f = [&chart, n](const Eigen::VectorXd& y) {
    Eigen::MatrixXd g = chart.metric(y);
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(g.data(), n * n));
  };
  auto unstack = [n](const Eigen::VectorXd& v) {
    return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n));
  };
  MetricJet jet;
  jet.g = chart.metric(x);
  jet.dg.resize(n);
  for (int k = 0; k < n; ++k) jet.dg[k] = unstack(fd_partial(f, x, k, h, richardson));
  if (second_order) {
    jet.d2g.assign(n, std::vector<Eigen::MatrixXd>(n));
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        jet.d2g[k][l] = unstack(fd_partial2(f, x, k, l, h2, richardson));
        if (l != k) jet.d2g[l][k] = jet.d2g[k][l];
      }
  }
  return jet;
}

MetricJet metric_jet_at(const Chart& chart, const Eigen::VectorXd& x,
                        const Backend& backend, bool second_order) {
  if (chart.prefer_jet && chart.metric_jet) return chart.metric_jet(x);
  if (backend.kind == BackendKind::Analytic) {
    if (chart.metric_jet) return chart.metric_jet(x);
    return metric_jet_fd(chart, x, 1e-3, true, second_order);
  }
  return metric_jet_fd(chart, x, backend.jet_step(),
                       backend.kind == BackendKind::FiniteDiffRichardson, second_order);
}

// ---------------------------------------------------------------------------
// Base geometry
// ---------------------------------------------------------------------------

Eigen::MatrixXd BaseGeometry::riem_of(const Eigen::VectorXd& X,
                                      const Eigen::VectorXd& Y) const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (X[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (Y[j] == 0.0) continue;
      r += X[i] * Y[j] * riem[i][j];
    }
  }
  return r;
}

BaseGeometry base_geometry(std::shared_ptr<const Chart> chart,
                           const Eigen::VectorXd& x, const Backend& backend,
                           bool with_curvature) {
  BaseGeometry geo;
  geo.chart = std::move(chart);
  geo.x = x;
  geo.backend = backend;
  const int n = geo.chart->dim;
  geo.n = n;

  MetricJet jet = metric_jet_at(*geo.chart, x, backend, with_curvature);
  geo.g = 0.5 * (jet.g + jet.g.transpose());
  geo.dg = std::move(jet.dg);
  geo.d2g = std::move(jet.d2g);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(geo.g);
  double lmin = es.eigenvalues().minCoeff();
  double lmax = es.eigenvalues().maxCoeff();
  if (lmin <= 0.0 || lmax / lmin > 1e12)
    throw SingularMetricError("metric is not invertible to conditioning threshold on chart " +
                              geo.chart->name);
  geo.g_inv = geo.g.inverse();

  // G^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<Eigen::MatrixXd> A(n, Eigen::MatrixXd(n, n));  // A[l](i,j)
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        A[l](i, j) = 0.5 * (geo.dg[i](j, l) + geo.dg[j](i, l) - geo.dg[l](i, j));

  geo.gamma.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) geo.gamma[k] += geo.g_inv(k, l) * A[l];

  geo.gamma_dir.assign(n, Eigen::MatrixXd(n, n));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) geo.gamma_dir[m](i, k) = geo.gamma[i](m, k);

  if (!with_curvature) return geo;

  // d_m G^k_ij = d_m g^{kl} A_lij + g^{kl} d_m A_lij
  std::vector<Eigen::MatrixXd> dginv(n);
  for (int m = 0; m < n; ++m) dginv[m] = -geo.g_inv * geo.dg[m] * geo.g_inv;

  geo.dgamma.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
      for (int l = 0; l < n; ++l) {
        acc += dginv[m](k, l) * A[l];
        Eigen::MatrixXd dA(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            dA(i, j) = 0.5 * (geo.d2g[m][i](j, l) + geo.d2g[m][j](i, l) -
                              geo.d2g[m][l](i, j));
        acc += geo.g_inv(k, l) * dA;
      }
      geo.dgamma[m][k] = acc;
    }

  // R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^m... (standard)
  geo.riem.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      Eigen::MatrixXd r(n, n);
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          double v = geo.dgamma[i][l](j, k) - geo.dgamma[j][l](i, k);
          for (int m = 0; m < n; ++m)
            v += geo.gamma[l](i, m) * geo.gamma[m](j, k) -
                 geo.gamma[l](j, m) * geo.gamma[m](i, k);
          r(l, k) = v;
        }
      geo.riem[i][j] = r;
    }

  return geo;
}

ChristoffelField christoffel(const ChartPoint& pt, const Backend& backend) {
  BaseGeometry geo = base_geometry(pt.chart, pt.coords, backend, false);
  return ChristoffelField{std::move(geo.gamma)};
}

RiemannTensor riemann(const ChartPoint& pt, const Backend& backend) {
  BaseGeometry geo = base_geometry(pt.chart, pt.coords, backend);
  return RiemannTensor{std::move(geo.riem)};
}

double sectional(const BaseGeometry& geo, const Eigen::VectorXd& X,
                 const Eigen::VectorXd& Y) {
  double num = geo.gdot(geo.riem_of(X, Y) * Y, X);
  double den = geo.gdot(X, X) * geo.gdot(Y, Y) - geo.gdot(X, Y) * geo.gdot(X, Y);
  return num / den;
}

CurvatureSymmetryResiduals riemann_symmetry_residuals(const BaseGeometry& geo) {
  const int n = geo.n;
  // lowered tensor R_{lkij}
  std::vector<std::vector<Eigen::MatrixXd>> low(n, std::vector<Eigen::MatrixXd>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) low[i][j] = geo.g * geo.riem[i][j];

  CurvatureSymmetryResiduals res{0, 0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          res.antisym_last_pair =
              std::max(res.antisym_last_pair, std::abs(low[i][j](l, k) + low[j][i](l, k)));
          res.antisym_first_pair =
              std::max(res.antisym_first_pair, std::abs(low[i][j](l, k) + low[i][j](k, l)));
          res.pair_exchange =
              std::max(res.pair_exchange, std::abs(low[i][j](l, k) - low[l][k](i, j)));
          double bianchi = geo.riem[i][j](l, k) + geo.riem[j][k](l, i) + geo.riem[k][i](l, j);
          res.first_bianchi = std::max(res.first_bianchi, std::abs(bianchi));
        }
  return res;
}

double christoffel_symmetry_residual(const BaseGeometry& geo) {
  double r = 0.0;
  for (int k = 0; k < geo.n; ++k)
    r = std::max(r, (geo.gamma[k] - geo.gamma[k].transpose()).cwiseAbs().maxCoeff());
  return r;
}

double metric_compatibility_residual(const BaseGeometry& geo) {
  const int n = geo.n;
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = geo.dg[i](j, k);
        for (int l = 0; l < n; ++l)
          v -= geo.gamma[l](i, j) * geo.g(l, k) + geo.gamma[l](i, k) * geo.g(j, l);
        r = std::max(r, std::abs(v));
      }
  return r;
}

// ---------------------------------------------------------------------------
// Generic tensor fields
// ---------------------------------------------------------------------------

static int flat_index(const std::vector<int>& idx, int n) {
  int f = 0;
  for (int i : idx) f = f * n + i;
  return f;
}

double& TensorComponents::at(const std::vector<int>& idx) {
  return data[flat_index(idx, n)];
}
double TensorComponents::at(const std::vector<int>& idx) const {
  return data[flat_index(idx, n)];
}
double TensorComponents::max_abs() const {
  double r = 0.0;
  for (double v : data) r = std::max(r, std::abs(v));
  return r;
}

TensorComponents covariant_derivative(const TensorField& field, const ChartPoint& pt,
                                      const Backend& backend) {
  BaseGeometry geo = base_geometry(pt.chart, pt.coords, backend);
  const int n = geo.n;
  const int rank = field.rank_contra + field.rank_cov;
  int size = 1;
  for (int i = 0; i < rank; ++i) size *= n;

  std::vector<double> value = field.eval(pt.coords);
  if (static_cast<int>(value.size()) != size)
    throw ConfigError("tensor field component count does not match its valence");

  // coordinate partials d_m T
  std::vector<std::vector<double>> partials;
  if (field.partials) {
    partials = field.partials(pt.coords);
  } else {
    double h = backend.kind == BackendKind::Analytic ? backend.outer_step()
                                                     : backend.jet_step();
    check_stencil(pt.chart->domain, pt.coords, h);
    StackedFn f = [&field](const Eigen::VectorXd& y) {
      auto v = field.eval(y);
      return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), v.size()));
    };
    bool rich = backend.kind != BackendKind::FiniteDiff;
    partials.resize(n);
    for (int m = 0; m < n; ++m) {
      Eigen::VectorXd d = fd_partial(f, pt.coords, m, h, rich);
      partials[m].assign(d.data(), d.data() + d.size());
    }
  }

  TensorComponents out;
  out.rank_contra = field.rank_contra;
  out.rank_cov = field.rank_cov + 1;
  out.n = n;
  out.data.assign(size * n, 0.0);

  std::vector<int> idx(rank, 0);
  for (int flat = 0; flat < size; ++flat) {
    int rem = flat;
    for (int i = rank - 1; i >= 0; --i) {
      idx[i] = rem % n;
      rem /= n;
    }
    for (int m = 0; m < n; ++m) {
      double v = partials[m][flat];
      // + G^{a}_{m c} T(..c..) on contravariant slots
      for (int s = 0; s < field.rank_contra; ++s) {
        int a = idx[s];
        std::vector<int> jdx = idx;
        for (int c = 0; c < n; ++c) {
          jdx[s] = c;
          v += geo.gamma[a](m, c) * value[flat_index(jdx, n)];
        }
      }
      // - G^{c}_{m b} T(..c..) on covariant slots
      for (int s = field.rank_contra; s < rank; ++s) {
        int b = idx[s];
        std::vector<int> jdx = idx;
        for (int c = 0; c < n; ++c) {
          jdx[s] = c;
          v -= geo.gamma[c](m, b) * value[flat_index(jdx, n)];
        }
      }
      out.data[flat * n + m] = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adapted frames
// ---------------------------------------------------------------------------

AdaptedFrame adapted_frame_for(const Eigen::MatrixXd& metric, const Eigen::MatrixXd& p,
                               int rank, double threshold) {
  const int n = static_cast<int>(metric.rows());
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) - p;

  std::vector<Eigen::VectorXd> frame;
  auto try_extend = [&](Eigen::VectorXd cand) {
    for (const auto& e : frame) cand -= (e.dot(metric * cand)) * e;
    double norm = std::sqrt(std::max(0.0, cand.dot(metric * cand)));
    if (norm <= threshold) return false;
    frame.push_back(cand / norm);
    return true;
  };

  int found_e = 0;
  for (int j = 0; j < n && found_e < rank; ++j)
    if (try_extend(p.col(j))) ++found_e;
  if (found_e < rank)
    throw RankDeficientError("fewer than rank independent distribution vectors at threshold");

  int found_f = 0;
  for (int j = 0; j < n && found_f < n - rank; ++j)
    if (try_extend(q.col(j))) ++found_f;
  if (found_f < n - rank)
    throw RankDeficientError("fewer than corank independent complement vectors at threshold");

  AdaptedFrame out;
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) out.vectors.col(i) = frame[i];
  out.coframe = out.vectors.inverse();
  out.split_rank = rank;
  return out;
}

// ---------------------------------------------------------------------------
// Field partials
// ---------------------------------------------------------------------------

std::vector<Eigen::MatrixXd> field_partials(const EndoField& f, const Box& domain,
                                            const Eigen::VectorXd& x,
                                            const Backend& backend) {
  const int n = static_cast<int>(x.size());
  if (f.partials) return f.partials(x);
  double h = backend.outer_step();
  check_stencil(domain, x, h);
  Eigen::MatrixXd probe = f.value(x);
  const int rows = static_cast<int>(probe.rows()), cols = static_cast<int>(probe.cols());
  StackedFn sf = [&f, rows, cols](const Eigen::VectorXd& y) {
    Eigen::MatrixXd m = f.value(y);
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(m.data(), rows * cols));
  };
  std::vector<Eigen::MatrixXd> out(n);
  for (int m = 0; m < n; ++m) {
    Eigen::VectorXd d = fd_partial(sf, x, m, h, true);
    out[m] = Eigen::Map<Eigen::MatrixXd>(d.data(), rows, cols);
  }
  return out;
}

std::vector<Eigen::VectorXd> field_partials(const VecField& f, const Box& domain,
                                            const Eigen::VectorXd& x,
                                            const Backend& backend) {
  const int n = static_cast<int>(x.size());
  if (f.partials) return f.partials(x);
  double h = backend.outer_step();
  check_stencil(domain, x, h);
  StackedFn sf = [&f](const Eigen::VectorXd& y) { return f.value(y); };
  std::vector<Eigen::VectorXd> out(n);
  for (int m = 0; m < n; ++m) out[m] = fd_partial(sf, x, m, h, true);
  return out;
}

}  // namespace gtorsion
