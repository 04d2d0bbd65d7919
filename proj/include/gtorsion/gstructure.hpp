#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gtorsion/diffgeo.hpp"

namespace gtorsion {

// ---------------------------------------------------------------------------
// Projector fields
// ---------------------------------------------------------------------------

struct ProjectorJet {
  Eigen::MatrixXd p;
  std::vector<Eigen::MatrixXd> dp;
  std::vector<std::vector<Eigen::MatrixXd>> d2p;
};

// Orthogonal projector onto the distribution E, as an endomorphism field in
// chart coordinates. `jet` carries analytic first/second partials.
struct ProjectorField {
  int rank = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> value;
  std::function<ProjectorJet(const Eigen::VectorXd&)> jet;  // may be null
};

// Builds a ProjectorField from a scalar-templated closure
// F: (const std::vector<T>&) -> std::vector<std::vector<T>> (n x n).
template <class F>
ProjectorField make_projector(int rank, int n, F closure) {
  ProjectorField field;
  field.rank = rank;
  field.value = [closure, n](const Eigen::VectorXd& x) {
    std::vector<double> xv(x.data(), x.data() + n);
    auto rows = closure(xv);
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p(i, j) = rows[i][j];
    return p;
  };
  field.jet = [closure, n](const Eigen::VectorXd& x) {
    std::vector<Dual2> xv;
    xv.reserve(n);
    for (int k = 0; k < n; ++k) xv.push_back(Dual2::variable(x[k], k, n));
    auto rows = closure(xv);
    ProjectorJet jet;
    jet.p.resize(n, n);
    jet.dp.assign(n, Eigen::MatrixXd::Zero(n, n));
    jet.d2p.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Dual2& e = rows[i][j];
        jet.p(i, j) = e.v;
        if (e.constant()) continue;
        for (int k = 0; k < n; ++k) {
          jet.dp[k](i, j) = e.g[k];
          for (int l = 0; l < n; ++l) jet.d2p[k][l](i, j) = e.h(k, l);
        }
      }
    return jet;
  };
  return field;
}

ProjectorJet projector_jet_at(const Chart& chart, const ProjectorField& proj,
                              const Eigen::VectorXd& x, const Backend& backend);

// ---------------------------------------------------------------------------
// Skew-endomorphism algebra. Endomorphisms are mixed-component matrices
// A^i_j; the pairing B(A,B) = -tr(AB) is basis independent.
// ---------------------------------------------------------------------------

inline double killing_pairing(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return -(a * b).trace();
}
inline double bnorm(const Eigen::MatrixXd& a) {
  return std::sqrt(std::max(0.0, killing_pairing(a, a)));
}
inline Eigen::MatrixXd commutator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a * b - b * a;
}

// g-transpose and g-skew part: A^T_g = g^{-1} A^T g.
inline Eigen::MatrixXd g_transpose(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                                   const Eigen::MatrixXd& g_inv) {
  return g_inv * a.transpose() * g;
}
inline Eigen::MatrixXd skew_part(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                                 const Eigen::MatrixXd& g_inv) {
  return 0.5 * (a - g_transpose(a, g, g_inv));
}
inline double skewness_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g) {
  return (g * a + a.transpose() * g).cwiseAbs().maxCoeff();
}

struct SkewEndomorphism {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd base_pt;
};

// ---------------------------------------------------------------------------
// Point geometry: the full torsion-level state at one chart point.
// ---------------------------------------------------------------------------

struct PointGeometry {
  BaseGeometry base;
  int m = 0;  // rank of E

  Eigen::MatrixXd p, q;
  std::vector<Eigen::MatrixXd> dp;
  std::vector<std::vector<Eigen::MatrixXd>> d2p;
  std::vector<Eigen::MatrixXd> nabla_p;  // (nabla_a p)

  std::vector<Eigen::MatrixXd> xi;                  // xi[a] = xi_{d_a}
  std::vector<std::vector<Eigen::MatrixXd>> dxi;    // dxi[l][a] = d_l xi_a
  std::vector<std::vector<Eigen::MatrixXd>> nabla_xi;  // [l][a] = (nabla_l xi)_a

  Eigen::MatrixXd L, L_inv;   // transfer tensor, L = id + g^{-1} B(xi,xi)
  Eigen::MatrixXd gt, gt_inv; // transfer metric gt_ij = g(d_i, L d_j)
  std::vector<Eigen::MatrixXd> S;        // S[i](k,j) = S^k_ij (difference tensor)
  std::vector<Eigen::MatrixXd> gamma_t;  // Christoffel symbols of gt: G + S
  std::vector<std::vector<Eigen::MatrixXd>> rprime;  // R'(d_i,d_j), g-part curvature

  AdaptedFrame frame;    // g-orthonormal, E-first
  AdaptedFrame frame_t;  // gt-orthonormal, built over `frame`
  std::vector<Eigen::MatrixXd> basis_g;  // B-orthonormal basis of g(M)
  std::vector<Eigen::MatrixXd> basis_m;  // B-orthonormal basis of m(M)

  int n() const { return base.n; }

  Eigen::MatrixXd xi_of(const Eigen::VectorXd& X) const;
  Eigen::MatrixXd nabla_xi_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
  Eigen::MatrixXd rprime_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
  Eigen::VectorXd s_of(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;

  Eigen::MatrixXd project_g(const Eigen::MatrixXd& a) const { return p * a * p + q * a * q; }
  Eigen::MatrixXd project_m(const Eigen::MatrixXd& a) const { return p * a * q + q * a * p; }

  double gtdot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(gt * b);
  }
};

PointGeometry point_geometry(const ChartPoint& pt, const ProjectorField& proj,
                             const Backend& backend = {});
// Internal variant used by field differentiation (no domain-margin check).
PointGeometry point_geometry_at(std::shared_ptr<const Chart> chart,
                                const ProjectorField& proj, const Eigen::VectorXd& x,
                                const Backend& backend);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// so(M) = g(M) + m(M): block-diagonal / block-off-diagonal parts w.r.t. p.
std::pair<SkewEndomorphism, SkewEndomorphism> split_skew(const SkewEndomorphism& a,
                                                         const PointGeometry& geo,
                                                         double tol_frame = 1e-10);

struct TorsionTensor {
  std::vector<Eigen::MatrixXd> components;  // [a] = xi_{d_a}
  Eigen::VectorXd base_pt;
};

TorsionTensor intrinsic_torsion(const ChartPoint& pt, const ProjectorField& proj,
                                const Backend& backend = {});

// nabla'_X alpha = nabla_X alpha - [xi_X, alpha] for an endomorphism field.
SkewEndomorphism minimal_connection_derivative(const EndoField& alpha_field,
                                               const Eigen::VectorXd& X,
                                               const PointGeometry& geo);

// R'(X,Y) = R(X,Y)_g - [xi_X, xi_Y]_g, the curvature of the minimal connection.
SkewEndomorphism structure_curvature(const PointGeometry& geo, const Eigen::VectorXd& X,
                                     const Eigen::VectorXd& Y);

// Smooth extension fields with analytic partials: value at y is the
// g(M)- (resp. m(M)-) projection of the g(y)-skew part of a constant seed
// matrix. Used wherever a tensorial operator needs some extension of a
// pointwise algebra element.
EndoField g_valued_extension(const PointGeometry& geo, const ProjectorField& proj,
                             const Eigen::MatrixXd& seed);
EndoField m_valued_extension(const PointGeometry& geo, const ProjectorField& proj,
                             const Eigen::MatrixXd& seed);

// nabla of an endomorphism field along coordinate m, at geo's point:
// d_m A + [Gamma_m, A].
Eigen::MatrixXd nabla_endo(const PointGeometry& geo, const EndoField& field, int m_dir,
                           const std::vector<Eigen::MatrixXd>* partials = nullptr);

}  // namespace gtorsion
