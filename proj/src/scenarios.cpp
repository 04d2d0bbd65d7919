#include "gtorsion/scenarios.hpp"

#include <array>
#include <cmath>

namespace gtorsion {

namespace {

// ---------------------------------------------------------------------------
// Scalar-templated building blocks. Everything below is written against a
// generic scalar T so the same closure serves the double value path and the
// Dual2 jet path.
// ---------------------------------------------------------------------------

template <class T>
using TMat = std::vector<std::vector<T>>;

template <class T>
TMat<T> zero_matrix(int n) {
  return TMat<T>(n, std::vector<T>(n, T(0.0)));
}

// Gauss-Jordan inverse with partial pivoting by scalar value.
template <class T>
TMat<T> invert_small(TMat<T> a) {
  using std::abs;
  const int m = static_cast<int>(a.size());
  TMat<T> inv = zero_matrix<T>(m);
  for (int i = 0; i < m; ++i) inv[i][i] = T(1.0);
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r)
      if (abs(a[r][col]) > abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    T d = a[col][col];
    for (int c = 0; c < m; ++c) {
      a[col][c] = a[col][c] / d;
      inv[col][c] = inv[col][c] / d;
    }
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      T f = a[r][col];
      for (int c = 0; c < m; ++c) {
        a[r][c] = a[r][c] - f * a[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

// Orthogonal projector onto the span of the given fields w.r.t. g:
// p = W (W^T g W)^{-1} W^T g.
template <class T>
TMat<T> projector_onto(const std::vector<std::vector<T>>& fields, const TMat<T>& g) {
  const int m = static_cast<int>(fields.size());
  const int n = static_cast<int>(fields[0].size());
  std::vector<std::vector<T>> gw(m, std::vector<T>(n, T(0.0)));
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gw[a][i] += g[i][j] * fields[a][j];
  TMat<T> gram(m, std::vector<T>(m, T(0.0)));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < n; ++i) gram[a][b] += fields[a][i] * gw[b][i];
  TMat<T> gram_inv = invert_small(gram);
  TMat<T> p = zero_matrix<T>(n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          p[i][j] += fields[a][i] * gram_inv[a][b] * gw[b][j];
  return p;
}

// Round-sphere stereographic metric 4 delta / (1 + |u|^2)^2.
template <class T>
TMat<T> round_sphere_metric(const std::vector<T>& x) {
  const int n = static_cast<int>(x.size());
  T r2(0.0);
  for (const T& xi : x) r2 += xi * xi;
  T c = 4.0 / ((1.0 + r2) * (1.0 + r2));
  TMat<T> g = zero_matrix<T>(n);
  for (int i = 0; i < n; ++i) g[i][i] = c;
  return g;
}

// Pushforward of the ambient linear field x -> M x on the unit sphere
// S^n in R^{n+1} through stereographic projection from the last pole:
// V(u) = A u + b (r^2 - 1)/2 - u (b^T u), A = M[0:n,0:n], b = M[0:n,n].
template <class T, int N>
std::vector<T> stereographic_pushforward(const std::array<std::array<int, N + 1>, N + 1>& M,
                                         const std::vector<T>& u) {
  T r2(0.0);
  for (const T& ui : u) r2 += ui * ui;
  T bu(0.0);
  for (int j = 0; j < N; ++j) bu += double(M[j][N]) * u[j];
  std::vector<T> v(N, T(0.0));
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j)
      if (M[i][j] != 0) v[i] += double(M[i][j]) * u[j];
    v[i] += double(M[i][N]) * (r2 - 1.0) * 0.5;
    v[i] = v[i] - u[i] * bu;
  }
  return v;
}

// Quaternion left-multiplication blocks on R^4 (coordinates 1,i,j,k).
constexpr std::array<std::array<int, 4>, 4> kQuatI = {
    {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}}};
constexpr std::array<std::array<int, 4>, 4> kQuatJ = {
    {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}}};
constexpr std::array<std::array<int, 4>, 4> kQuatK = {
    {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}};

template <int N>
std::array<std::array<int, 2 * N>, 2 * N> block_diag(
    const std::array<std::array<int, N>, N>& b) {
  std::array<std::array<int, 2 * N>, 2 * N> out{};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      out[i][j] = b[i][j];
      out[N + i][N + j] = b[i][j];
    }
  return out;
}

const std::array<std::array<int, 8>, 8> kOctI = block_diag<4>(kQuatI);
const std::array<std::array<int, 8>, 8> kOctJ = block_diag<4>(kQuatJ);
const std::array<std::array<int, 8>, 8> kOctK = block_diag<4>(kQuatK);

// ---------------------------------------------------------------------------
// Scenario closures
// ---------------------------------------------------------------------------

struct FlatMetric {
  int n;
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    TMat<T> g = zero_matrix<T>(n);
    (void)x;
    for (int i = 0; i < n; ++i) g[i][i] = T(1.0);
    return g;
  }
};

struct CoordinateAxisProjector {
  int n, axis;
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    TMat<T> p = zero_matrix<T>(n);
    (void)x;
    p[axis][axis] = T(1.0);
    return p;
  }
};

// S^2 x R product: coordinates (u, v, t), sphere factor stereographic.
struct ProductSphereLineMetric {
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    T r2 = x[0] * x[0] + x[1] * x[1];
    T c = 4.0 / ((1.0 + r2) * (1.0 + r2));
    TMat<T> g = zero_matrix<T>(3);
    g[0][0] = c;
    g[1][1] = c;
    g[2][2] = T(1.0);
    return g;
  }
};

struct RoundSphereMetric {
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    return round_sphere_metric(x);
  }
};

// Chart expression of the Reeb field of the round S^3.
struct ReebProjector {
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    std::vector<T> v = stereographic_pushforward<T, 3>(kQuatI, x);
    return projector_onto<T>({v}, round_sphere_metric(x));
  }
};

// Quaternionic Hopf 3-plane field on the round S^7.
struct HopfProjector {
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    std::vector<std::vector<T>> fields = {
        stereographic_pushforward<T, 7>(kOctI, x),
        stereographic_pushforward<T, 7>(kOctJ, x),
        stereographic_pushforward<T, 7>(kOctK, x),
    };
    return projector_onto<T>(fields, round_sphere_metric(x));
  }
};

struct TorusSkewMetric {
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    using std::sin;
    TMat<T> g = zero_matrix<T>(3);
    T s = sin(x[0]);
    g[0][0] = T(1.0);
    g[1][1] = 1.0 + 0.5 * s * s;
    g[2][2] = T(1.0);
    return g;
  }
};

struct TorusSkewProjector {
  template <class T>
  TMat<T> operator()(const std::vector<T>& x) const {
    using std::cos;
    using std::sin;
    TorusSkewMetric metric;
    std::vector<T> v = {cos(x[2]), sin(x[2]), T(0.0)};
    return projector_onto<T>({v}, metric(x));
  }
};

ScenarioTolerances tolerances_for(BackendKind kind) {
  ScenarioTolerances t;
  if (kind != BackendKind::Analytic) {
    t.identity = 1e-4;
    t.curvature = 1e-3;
    t.minimality = 1e-4;
    t.xi_zero = 1e-7;
    t.sff_zero = 1e-6;
  }
  return t;
}

std::vector<Scenario> build_catalogue() {
  std::vector<Scenario> out;

  {
    Scenario sc;
    sc.id = "flat4-const";
    sc.chart = make_chart("flat4", Box::cube(4, 0.0, 6.2832), FlatMetric{4}, 0.01);
    sc.projector = make_projector(1, 4, CoordinateAxisProjector{4, 0});
    sc.m = 1;
    sc.sample_domain = Box::cube(4, 0.3, 6.0);
    sc.backend = Backend::analytic();
    sc.expectations = {true, true, false, true};
    sc.tol = scenario_tolerances(sc, sc.backend.kind);
    sc.default_points = 100;
    out.push_back(std::move(sc));
  }
  {
    Scenario sc;
    sc.id = "product-s2xr";
    sc.chart = make_chart("s2xr", Box::cube(3, -1.0, 1.0), ProductSphereLineMetric{}, 0.01);
    sc.projector = make_projector(1, 3, CoordinateAxisProjector{3, 2});
    sc.m = 1;
    sc.sample_domain = Box::cube(3, -0.9, 0.9);
    sc.backend = Backend::analytic();
    sc.expectations = {true, true, false, true};
    sc.tol = scenario_tolerances(sc, sc.backend.kind);
    sc.default_points = 100;
    out.push_back(std::move(sc));
  }
  {
    Scenario sc;
    sc.id = "s3-reeb";
    sc.chart = make_chart("s3-stereo", Box::cube(3, -1.0, 1.0), RoundSphereMetric{}, 0.01);
    sc.projector = make_projector(1, 3, ReebProjector{});
    sc.m = 1;
    sc.sample_domain = Box::cube(3, -0.9, 0.9);
    sc.backend = Backend::analytic();
    sc.expectations = {false, true, false, false};
    sc.tol = scenario_tolerances(sc, sc.backend.kind);
    sc.default_points = 100;
    out.push_back(std::move(sc));
  }
  {
    Scenario sc;
    sc.id = "s7-hopf";
    sc.chart = make_chart("s7-stereo", Box::cube(7, -1.0, 1.0), RoundSphereMetric{}, 0.01);
    sc.projector = make_projector(3, 7, HopfProjector{});
    sc.m = 3;
    sc.sample_domain = Box::cube(7, -0.6, 0.6);
    sc.backend = Backend::analytic();
    sc.expectations = {false, true, false, false};
    sc.tol = scenario_tolerances(sc, sc.backend.kind);
    sc.default_points = 20;
    out.push_back(std::move(sc));
  }
  {
    Scenario sc;
    sc.id = "torus-skew";
    sc.chart = make_chart("t3-skew", Box::cube(3, 0.0, 6.2832), TorusSkewMetric{}, 0.01);
    sc.projector = make_projector(1, 3, TorusSkewProjector{});
    sc.m = 1;
    sc.sample_domain = Box::cube(3, 0.3, 6.0);
    sc.backend = Backend::analytic();
    sc.expectations = {false, false, true, false};
    sc.tol = scenario_tolerances(sc, sc.backend.kind);
    sc.default_points = 50;
    out.push_back(std::move(sc));
  }

  return out;
}

}  // namespace

const std::vector<Scenario>& catalogue() {
  static const std::vector<Scenario> cat = build_catalogue();
  return cat;
}

const Scenario& find_scenario(const std::string& id) {
  for (const auto& sc : catalogue())
    if (sc.id == id) return sc;
  throw ConfigError("unknown scenario id: " + id);
}

ScenarioTolerances scenario_tolerances(const Scenario& sc, BackendKind kind) {
  ScenarioTolerances t = tolerances_for(kind);
  // third-order stencils on the 7-sphere gate one order looser
  if (sc.id == "s7-hopf") t.minimality = std::max(t.minimality, 1e-4);
  return t;
}

std::vector<ChartPoint> sample(const Scenario& sc, int count, uint64_t seed) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  const int n = sc.sample_domain.dim();
  for (int k = 0; k < n; ++k)
    if (sc.sample_domain.lo[k] + 2.0 * sc.sample_margin >= sc.sample_domain.hi[k])
      throw EmptyDomainError("sampling margins exhaust the box on " + sc.id);

  SplitMix64 rng(mix_seed(seed, hash_string(sc.id)));
  std::vector<ChartPoint> points;
  points.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k)
      x[k] = rng.uniform(sc.sample_domain.lo[k] + sc.sample_margin,
                         sc.sample_domain.hi[k] - sc.sample_margin);
    points.push_back(make_point(sc.chart, x));
  }
  return points;
}

}  // namespace gtorsion
