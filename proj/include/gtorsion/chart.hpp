#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtorsion/dual.hpp"

namespace gtorsion {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfDomainError : Error {
  using Error::Error;
};
struct StencilOutOfDomainError : Error {
  using Error::Error;
};
struct SingularMetricError : Error {
  using Error::Error;
};
struct RankDeficientError : Error {
  using Error::Error;
};
struct NotSkewError : Error {
  using Error::Error;
};
struct NotInMError : Error {
  using Error::Error;
};
struct NotInGError : Error {
  using Error::Error;
};
struct IllConditionedTransferError : Error {
  using Error::Error;
};
struct EmptyDomainError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// Axis-aligned coordinate box.
struct Box {
  Eigen::VectorXd lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Eigen::VectorXd& x, double margin = 0.0) const {
    for (int k = 0; k < dim(); ++k)
      if (x[k] < lo[k] + margin || x[k] > hi[k] - margin) return false;
    return true;
  }

  double boundary_distance(const Eigen::VectorXd& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim(); ++k) d = std::min({d, x[k] - lo[k], hi[k] - x[k]});
    return d;
  }

  static Box cube(int n, double a, double b) {
    Box box;
    box.lo = Eigen::VectorXd::Constant(n, a);
    box.hi = Eigen::VectorXd::Constant(n, b);
    return box;
  }
};

// Differentiation strategy for metric/projector jets and for derivatives of
// pointwise-computable fields.
//  - Analytic: closed-form jets evaluated through Dual2 closures.
//  - FiniteDiff: central differences with base step `step`.
//  - FiniteDiffRichardson: one Richardson extrapolation level on top.
// `derived_step` drives the differentiation of fields that are themselves
// assembled from jets (curvature of the transfer metric, derivative
// operators on the reduced bundle); those always use Richardson centering.
enum class BackendKind { Analytic, FiniteDiff, FiniteDiffRichardson };

struct Backend {
  BackendKind kind = BackendKind::Analytic;
  double step = 0.0;         // 0 -> per-kind default
  double derived_step = 0.0; // 0 -> per-kind default

  double jet_step() const {
    if (step > 0.0) return step;
    return kind == BackendKind::FiniteDiff ? 1e-5 : 1e-3;
  }
  double outer_step() const {
    if (derived_step > 0.0) return derived_step;
    return kind == BackendKind::Analytic ? 1e-3 : 1e-2;
  }

  static Backend analytic() { return {BackendKind::Analytic, 0.0, 0.0}; }
  static Backend fd(double h = 0.0) { return {BackendKind::FiniteDiff, h, 0.0}; }
  static Backend fd_richardson(double h = 0.0) {
    return {BackendKind::FiniteDiffRichardson, h, 0.0};
  }
};

std::string backend_name(BackendKind kind);
BackendKind backend_from_name(const std::string& name);

// First and second coordinate derivatives of the metric at a point.
struct MetricJet {
  Eigen::MatrixXd g;                            // g_ij
  std::vector<Eigen::MatrixXd> dg;              // dg[k](i,j)   = d_k g_ij
  std::vector<std::vector<Eigen::MatrixXd>> d2g;  // d2g[k][l](i,j) = d_k d_l g_ij
};

// A coordinate chart with a metric closure and optional analytic jets.
// All computations are pointwise in a single chart; domains are boxes and
// near-boundary points are rejected rather than clamped so that
// finite-difference stencils stay valid.
struct Chart {
  std::string name;
  int dim = 0;
  Box domain;
  double domain_margin = 1e-2;  // interior margin for valid points
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> metric;
  std::function<MetricJet(const Eigen::VectorXd&)> metric_jet;  // may be null
  // Derived charts (e.g. the transfer metric) assemble their jets in a
  // backend-aware way already; such charts force jet use for every backend.
  bool prefer_jet = false;
};

struct ChartPoint {
  std::shared_ptr<const Chart> chart;
  Eigen::VectorXd coords;
};

// Validates the interior-margin invariant.
ChartPoint make_point(std::shared_ptr<const Chart> chart, Eigen::VectorXd coords);

// Builds a Chart from a scalar-templated metric closure. The closure is
// instantiated once on doubles (fast value path) and once on Dual2 scalars
// (analytic jets). F: (const std::vector<T>&) -> std::vector<std::vector<T>>.
template <class F>
std::shared_ptr<Chart> make_chart(std::string name, Box domain, F metric_closure,
                                  double margin = 1e-2) {
  auto chart = std::make_shared<Chart>();
  chart->name = std::move(name);
  chart->dim = domain.dim();
  chart->domain = std::move(domain);
  chart->domain_margin = margin;
  const int n = chart->dim;

  chart->metric = [metric_closure, n](const Eigen::VectorXd& x) {
    std::vector<double> xv(x.data(), x.data() + n);
    auto rows = metric_closure(xv);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = rows[i][j];
    return g;
  };

  chart->metric_jet = [metric_closure, n](const Eigen::VectorXd& x) {
    std::vector<Dual2> xv;
    xv.reserve(n);
    for (int k = 0; k < n; ++k) xv.push_back(Dual2::variable(x[k], k, n));
    auto rows = metric_closure(xv);
    MetricJet jet;
    jet.g.resize(n, n);
    jet.dg.assign(n, Eigen::MatrixXd::Zero(n, n));
    jet.d2g.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Dual2& e = rows[i][j];
        jet.g(i, j) = e.v;
        if (e.constant()) continue;
        for (int k = 0; k < n; ++k) {
          jet.dg[k](i, j) = e.g[k];
          for (int l = 0; l < n; ++l) jet.d2g[k][l](i, j) = e.h(k, l);
        }
      }
    return jet;
  };

  return chart;
}

// Deterministic splittable PRNG; used for sampling and probe generation so
// that reports are reproducible across runs.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  SplitMix64 rng(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
  rng.next();
  return rng.next();
}

uint64_t hash_string(const std::string& s);

}  // namespace gtorsion
