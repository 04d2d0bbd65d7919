#pragma once

#include "gtorsion/gstructure.hpp"

namespace gtorsion {

// xi . alpha for alpha in m(M): the g-dual of X -> -B(alpha, xi_X).
Eigen::VectorXd xi_dot(const PointGeometry& geo, const Eigen::MatrixXd& alpha,
                       double tol_struct = 1e-5);
// Unchecked variant (alpha may sit anywhere in so(M); only its m-part pairs).
Eigen::VectorXd xi_dot_unchecked(const PointGeometry& geo, const Eigen::MatrixXd& alpha);

struct TransferTensor {
  Eigen::MatrixXd L;
  Eigen::VectorXd base_pt;
};
struct TildeMetric {
  Eigen::MatrixXd gt;
  Eigen::VectorXd base_pt;
};

std::pair<TransferTensor, TildeMetric> transfer(const ChartPoint& pt,
                                                const ProjectorField& proj,
                                                const Backend& backend = {});

// Both sides of g((nabla_X L)Y, Z) = B((nabla_X xi)_Y, xi_Z) + B((nabla_X xi)_Z, xi_Y).
struct NablaLResult {
  double lhs, rhs;
  double residual() const { return std::abs(lhs - rhs); }
};
NablaLResult nabla_L(const PointGeometry& geo, const Eigen::VectorXd& X,
                     const Eigen::VectorXd& Y, const Eigen::VectorXd& Z);

struct DifferenceTensor {
  std::vector<Eigen::MatrixXd> S;  // [i](k,j) = S^k_ij
  Eigen::VectorXd base_pt;
};
DifferenceTensor difference_tensor(const ChartPoint& pt, const ProjectorField& proj,
                                   const Backend& backend = {});

// The transfer metric as a derived chart, so the Levi-Civita machinery can
// run on gt directly. When `fd_jets_only` the derived chart carries no jets
// and backends fall back to differences of gt values (the brute-force
// route); otherwise first derivatives of gt are assembled from the torsion
// jet and second derivatives by Richardson differences of those.
std::shared_ptr<Chart> tilde_chart(std::shared_ptr<const Chart> chart,
                                   const ProjectorField& proj, const Backend& backend,
                                   bool fd_jets_only = false);

}  // namespace gtorsion
