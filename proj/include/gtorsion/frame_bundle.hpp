#pragma once

#include "gtorsion/transfer.hpp"

namespace gtorsion {

// ---------------------------------------------------------------------------
// Tangent vectors of SO(M) at a frame over the base point: a horizontal part
// X (in chart coordinates) plus a vertical part alpha in so(M), with
// <(X,a),(Y,b)> = g(X,Y) + B(a,b).
// ---------------------------------------------------------------------------

enum class BundleFlavor { Generic, PTangent, PNormal };

struct BundleVector {
  Eigen::VectorXd hor;
  Eigen::MatrixXd ver;
  BundleFlavor flavor = BundleFlavor::Generic;
};

double bundle_dot(const PointGeometry& geo, const BundleVector& a, const BundleVector& b);
double bundle_norm(const PointGeometry& geo, const BundleVector& a);

// X^{h'} = X^h + (xi_X)^*, the P-horizontal lift.
BundleVector lift_horizontal(const PointGeometry& geo, const Eigen::VectorXd& X);
// beta^* for beta in g(M).
BundleVector lift_vertical(const Eigen::MatrixXd& beta);
// alpha^+ = alpha^* + (xi.alpha)^h, normal to P, for alpha in m(M).
BundleVector normal_lift(const PointGeometry& geo, const Eigen::MatrixXd& alpha);

// ---------------------------------------------------------------------------
// Curvature operators.
// ---------------------------------------------------------------------------

// R_alpha = sum_i R(e_i, alpha(e_i)) as an endomorphism; frame independent.
Eigen::MatrixXd r_operator(const PointGeometry& geo, const Eigen::MatrixXd& alpha);
Eigen::VectorXd r_op(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                     const Eigen::VectorXd& X);

// Q_alpha(X) = L^{-1}(R_alpha(X) - xi.([xi_X, alpha]_m)) for alpha in g(M).
Eigen::VectorXd q_op(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                     const Eigen::VectorXd& X, double tol_struct = 1e-5);
Eigen::VectorXd q_apply(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                        const Eigen::VectorXd& X);  // no membership check
Eigen::MatrixXd q_matrix(const PointGeometry& geo, const Eigen::MatrixXd& alpha);

// ---------------------------------------------------------------------------
// Orthogonal projections T SO(M) -> TP and T SO(M) -> T^perp P.
// ---------------------------------------------------------------------------

BundleVector project_tangent(const PointGeometry& geo, const BundleVector& v);
BundleVector project_normal(const PointGeometry& geo, const BundleVector& v);

// ---------------------------------------------------------------------------
// Levi-Civita connection of (P, g_SO(M)).
// ---------------------------------------------------------------------------

// A P-tangent field: a base vector field X plus a g(M)-valued field beta;
// the actual tangent value at x is X(x)^{h'} + beta(x)^*.
struct PTangentField {
  VecField X;
  EndoField beta;
};

PTangentField constant_ptangent_field(const PointGeometry& geo, const ProjectorField& proj,
                                      const Eigen::VectorXd& X, const Eigen::MatrixXd& beta);

BundleVector nabla_P(const PointGeometry& geo, const PTangentField& u,
                     const PTangentField& v);

// ---------------------------------------------------------------------------
// Full curvature data at a point.
// ---------------------------------------------------------------------------

struct BundleGeometry {
  PointGeometry pg;
  ProjectorField proj;
  std::vector<Eigen::MatrixXd> gamma_t_dir;  // [m](i,k) = Gt^i_mk

  bool has_curvature_data = false;
  BaseGeometry tilde;  // geometry of the transfer metric (curvature level)
  std::vector<Eigen::MatrixXd> Q;  // Q[A]: col j = Q_{basis_g[A]}(d_j)
  // Derivative operators, Richardson differences of pointwise-exact fields:
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> DRp;  // [m][i][j]
  std::vector<std::vector<Eigen::MatrixXd>> DQ;  // [m][A]: col j = (D_m Q)_{a_A}(d_j)

  int n() const { return pg.n(); }
  int dim_g() const { return static_cast<int>(pg.basis_g.size()); }
  int dim_m() const { return static_cast<int>(pg.basis_m.size()); }

  Eigen::VectorXd dq_of(const Eigen::VectorXd& X, const Eigen::MatrixXd& gamma,
                        const Eigen::VectorXd& Y) const;  // (D_X Q)_gamma(Y)
  Eigen::MatrixXd drp_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                         const Eigen::VectorXd& Z) const;  // (D_X R')(Y,Z)
};

BundleGeometry bundle_geometry(const ChartPoint& pt, const ProjectorField& proj,
                               const Backend& backend = {}, bool with_curvature = true);

// Curvature tensor of P applied to P-tangent vectors (full vertical parts).
BundleVector curvature_P(const BundleGeometry& bg, const BundleVector& u,
                         const BundleVector& v, const BundleVector& w);

// Orthonormal P-tangent basis: gt-frame horizontal lifts then g_P directions.
std::vector<BundleVector> ptangent_basis(const PointGeometry& geo);

double ricci_P_closed(const BundleGeometry& bg, const BundleVector& u,
                      const BundleVector& v);
double ricci_P_trace(const BundleGeometry& bg, const BundleVector& u,
                     const BundleVector& v);
double sectional_P(const BundleGeometry& bg, const BundleVector& u,
                   const BundleVector& v);
double scalar_P_closed(const BundleGeometry& bg);
double scalar_P_trace(const BundleGeometry& bg);

// ---------------------------------------------------------------------------
// Extrinsic geometry.
// ---------------------------------------------------------------------------

// Pairings g_SO(M)(Pi(u,v), alpha^+) over the P-tangent basis (u,v) and the
// m(M) basis alpha; the normal lifts are used un-normalized.
struct SecondFundamentalPairing {
  std::vector<Eigen::MatrixXd> table;  // table[a](u,v)
  double max_abs() const;
  double symmetry_residual() const;
};
SecondFundamentalPairing second_fundamental_form(const PointGeometry& geo);

struct MinimalityResult {
  Eigen::MatrixXd residual_m;  // m(M)-valued mean-curvature obstruction
  double norm;                 // its B-norm
};
MinimalityResult minimality_residual(const PointGeometry& geo);

struct HarmonicityResult {
  Eigen::MatrixXd h1;  // m(M)-valued
  Eigen::VectorXd h2;  // tangent vector
  double h1_norm, h2_norm;
};
HarmonicityResult harmonicity_residuals(const PointGeometry& geo);

}  // namespace gtorsion
