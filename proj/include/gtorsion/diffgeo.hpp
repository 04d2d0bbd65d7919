#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gtorsion/chart.hpp"

namespace gtorsion {

// ---------------------------------------------------------------------------
// Finite-difference engine over stacked field values.
// ---------------------------------------------------------------------------

using StackedFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// d/dx_k of f at x, central differences; one Richardson level if requested.
Eigen::VectorXd fd_partial(const StackedFn& f, const Eigen::VectorXd& x, int k,
                           double h, bool richardson);

// d2/dx_k dx_l, central; Richardson level optional.
Eigen::VectorXd fd_partial2(const StackedFn& f, const Eigen::VectorXd& x, int k,
                            int l, double h, bool richardson);

// Throws StencilOutOfDomainError when the stencil of reach h leaves `domain`.
void check_stencil(const Box& domain, const Eigen::VectorXd& x, double h);

// Step used for plain central second differences (balanced against rounding).
double second_diff_step(double h, bool richardson);

// ---------------------------------------------------------------------------
// Jets and base geometry (metric level).
// ---------------------------------------------------------------------------

// Metric jet per the backend: analytic jets when available, finite
// differences of the metric closure otherwise. `second_order = false` skips
// the second derivatives (enough for Christoffel symbols).
MetricJet metric_jet_at(const Chart& chart, const Eigen::VectorXd& x,
                        const Backend& backend, bool second_order = true);

// Everything derived from the metric jet at one point.
struct BaseGeometry {
  std::shared_ptr<const Chart> chart;
  Eigen::VectorXd x;
  Backend backend;
  int n = 0;

  Eigen::MatrixXd g, g_inv;
  std::vector<Eigen::MatrixXd> dg;
  std::vector<std::vector<Eigen::MatrixXd>> d2g;
  std::vector<Eigen::MatrixXd> gamma;      // gamma[k](i,j) = G^k_ij
  std::vector<Eigen::MatrixXd> gamma_dir;  // gamma_dir[m](i,k) = G^i_mk
  std::vector<std::vector<Eigen::MatrixXd>> dgamma;  // dgamma[m][k](i,j) = d_m G^k_ij
  std::vector<std::vector<Eigen::MatrixXd>> riem;    // riem[i][j](l,k): R(d_i,d_j) endo

  double gdot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(g * b);
  }
  double gnorm(const Eigen::VectorXd& a) const { return std::sqrt(std::max(0.0, gdot(a, a))); }

  // R(X,Y) as an endomorphism matrix.
  Eigen::MatrixXd riem_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
};

// `with_curvature = false` stops after the Christoffel symbols.
BaseGeometry base_geometry(std::shared_ptr<const Chart> chart,
                           const Eigen::VectorXd& x, const Backend& backend,
                           bool with_curvature = true);

// ---------------------------------------------------------------------------
// Chart-level operations.
// ---------------------------------------------------------------------------

struct ChristoffelField {
  std::vector<Eigen::MatrixXd> components;  // [k](i,j) = G^k_ij
};

struct RiemannTensor {
  std::vector<std::vector<Eigen::MatrixXd>> components;  // [i][j](l,k) = R^l_kij
};

ChristoffelField christoffel(const ChartPoint& pt, const Backend& backend = {});
RiemannTensor riemann(const ChartPoint& pt, const Backend& backend = {});

// Sectional curvature of the plane spanned by X, Y.
double sectional(const BaseGeometry& geo, const Eigen::VectorXd& X,
                 const Eigen::VectorXd& Y);

// Max-norm residuals of the standard curvature symmetries at a point.
struct CurvatureSymmetryResiduals {
  double antisym_last_pair;   // R_{lk(ij)} in (i,j)
  double antisym_first_pair;  // lowered, in (l,k)
  double pair_exchange;
  double first_bianchi;
};
CurvatureSymmetryResiduals riemann_symmetry_residuals(const BaseGeometry& geo);

double christoffel_symmetry_residual(const BaseGeometry& geo);
double metric_compatibility_residual(const BaseGeometry& geo);

// ---------------------------------------------------------------------------
// Generic tensor fields and the coordinate covariant derivative.
// ---------------------------------------------------------------------------

// Components stored flat, row-major over [contravariant..., covariant...].
struct TensorComponents {
  int rank_contra = 0, rank_cov = 0;
  int n = 0;
  std::vector<double> data;

  int rank() const { return rank_contra + rank_cov; }
  double& at(const std::vector<int>& idx);
  double at(const std::vector<int>& idx) const;
  double max_abs() const;
};

struct TensorField {
  int rank_contra = 0, rank_cov = 0;
  std::function<std::vector<double>(const Eigen::VectorXd&)> eval;
  // Optional analytic partials: partials(x)[m] = flat components of d_m T.
  std::function<std::vector<std::vector<double>>(const Eigen::VectorXd&)> partials;
};

// Coordinate covariant derivative with one Christoffel correction per index;
// the derivative index is appended as the last covariant slot.
TensorComponents covariant_derivative(const TensorField& field, const ChartPoint& pt,
                                      const Backend& backend = {});

// ---------------------------------------------------------------------------
// Adapted orthonormal frames.
// ---------------------------------------------------------------------------

struct AdaptedFrame {
  Eigen::MatrixXd vectors;  // columns e_1..e_n
  Eigen::MatrixXd coframe;  // rows theta^1..theta^n (inverse of `vectors`)
  int split_rank = 0;       // e_1..e_m span the distribution
};

// Gram-Schmidt w.r.t. `metric`, first over the p-projections of the
// coordinate basis (fixed index order, near-zero candidates skipped), then
// over their complements. Deterministic.
AdaptedFrame adapted_frame_for(const Eigen::MatrixXd& metric, const Eigen::MatrixXd& p,
                               int rank, double threshold = 1e-10);

// ---------------------------------------------------------------------------
// Pointwise matrix- and vector-valued fields with optional analytic partials.
// ---------------------------------------------------------------------------

struct EndoField {
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> value;
  // Optional: partials(x)[m] = d_m of the component matrix.
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> partials;
};

struct VecField {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
  std::function<std::vector<Eigen::VectorXd>(const Eigen::VectorXd&)> partials;
};

// Coordinate partials of a field at x: analytic when carried by the field,
// Richardson central differences with the backend's outer step otherwise.
std::vector<Eigen::MatrixXd> field_partials(const EndoField& f, const Box& domain,
                                            const Eigen::VectorXd& x,
                                            const Backend& backend);
std::vector<Eigen::VectorXd> field_partials(const VecField& f, const Box& domain,
                                            const Eigen::VectorXd& x,
                                            const Backend& backend);

}  // namespace gtorsion
