#include <doctest.h>

#include "gtorsion/transfer.hpp"
#include "gtorsion/scenarios.hpp"
#include "oracles.hpp"

using namespace gtorsion;
namespace oracle = gtorsion::testing;

TEST_CASE("xi.alpha vanishes when torsion vanishes and obeys its pairing identity") {
  const Scenario& flat = find_scenario("flat4-const");
  ChartPoint pt = make_point(flat.chart, Eigen::Vector4d(1, 2, 3, 4));
  PointGeometry geo = oracle::geom_at(flat, pt);
  SplitMix64 rng(11);
  Eigen::MatrixXd alpha = geo.project_m(oracle::random_skew(rng, geo));
  CHECK(xi_dot(geo, alpha).cwiseAbs().maxCoeff() == 0.0);

  const Scenario& sc = find_scenario("s3-reeb");
  for (const auto& p : sample(sc, 6, 29)) {
    PointGeometry g = oracle::geom_at(sc, p);
    Eigen::MatrixXd a = g.project_m(oracle::random_skew(rng, g));
    Eigen::VectorXd xa = xi_dot(g, a);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd X = oracle::random_vector(rng, 3);
      CHECK(std::abs(g.base.gdot(xa, X) + killing_pairing(a, g.xi_of(X))) < 1e-12);
    }
    // g(M) input is rejected
    Eigen::MatrixXd bad = g.project_g(oracle::random_skew(rng, g)) +
                          Eigen::MatrixXd::Identity(3, 3) * 0.0;
    if (bad.cwiseAbs().maxCoeff() > 1e-3) CHECK_THROWS_AS(xi_dot(g, bad), NotInMError);
  }
}

TEST_CASE("xi.alpha vanishes on pairing-orthogonal arguments") {
  // on the 7-sphere the torsion image spans a strict subspace of m(M)
  const Scenario& sc = find_scenario("s7-hopf");
  ChartPoint pt = sample(sc, 1, 61).front();
  PointGeometry geo = oracle::geom_at(sc, pt);
  // project a basis element of m(M) away from span{xi_1..xi_n}
  Eigen::MatrixXd cand;
  double best = -1.0;
  for (const auto& alpha : geo.basis_m) {
    Eigen::MatrixXd residual = alpha;
    // Gram-Schmidt against the normalized torsion values
    std::vector<Eigen::MatrixXd> span;
    for (const auto& x : geo.xi) {
      Eigen::MatrixXd v = x;
      for (const auto& s : span) v -= killing_pairing(s, v) * s;
      double norm = bnorm(v);
      if (norm > 1e-10) span.push_back(v / norm);
    }
    for (const auto& s : span) residual -= killing_pairing(s, residual) * s;
    if (bnorm(residual) > best) {
      best = bnorm(residual);
      cand = residual;
    }
  }
  REQUIRE(best > 1e-3);
  CHECK(xi_dot(geo, cand).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transfer tensor is the identity without torsion") {
  const Scenario& sc = find_scenario("flat4-const");
  ChartPoint pt = make_point(sc.chart, Eigen::Vector4d(2, 2, 2, 2));
  auto [L, gt] = transfer(pt, sc.projector, sc.backend);
  CHECK((L.L - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gt.gt - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transfer metric grows with the torsion and stays block-compatible") {
  const Scenario& sc = find_scenario("s3-reeb");
  SplitMix64 rng(43);
  for (const auto& pt : sample(sc, 10, 47)) {
    PointGeometry geo = oracle::geom_at(sc, pt);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(geo.gt, geo.base.g);
    CHECK(ges.eigenvalues().minCoeff() > 1.0 - 1e-9);
    CHECK(ges.eigenvalues().maxCoeff() > 1.0 + 1e-3);  // torsion present
    CHECK(geo.gt.determinant() >= geo.base.g.determinant() - 1e-12);

    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd X = oracle::random_vector(rng, 3);
      Eigen::VectorXd Y = oracle::random_vector(rng, 3);
      double err = geo.gtdot(X, Y) - geo.base.gdot(X, Y) -
                   killing_pairing(geo.xi_of(X), geo.xi_of(Y));
      CHECK(std::abs(err) < 1e-12);
      CHECK(geo.gtdot(X, X) >= geo.base.gdot(X, X) - 1e-12);
    }

    // E and F remain orthogonal for the transfer metric
    for (int i = 0; i < geo.m; ++i)
      for (int j = geo.m; j < geo.n(); ++j)
        CHECK(std::abs(geo.gtdot(geo.frame.vectors.col(i), geo.frame.vectors.col(j))) <
              1e-12);
  }
}

TEST_CASE("gradient identity for the transfer tensor") {
  SplitMix64 rng(3);
  for (const char* id : {"flat4-const", "product-s2xr", "s3-reeb", "torus-skew"}) {
    const Scenario& sc = find_scenario(id);
    for (const auto& pt : sample(sc, 4, 71)) {
      PointGeometry geo = oracle::geom_at(sc, pt);
      const int n = geo.n();
      for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd X = oracle::random_vector(rng, n);
        Eigen::VectorXd Y = oracle::random_vector(rng, n);
        Eigen::VectorXd Z = oracle::random_vector(rng, n);
        NablaLResult r = nabla_L(geo, X, Y, Z);
        CHECK(r.residual() < 1e-7);
      }
    }
  }
  // finite differences hold at their own tolerance
  const Scenario& sc = find_scenario("s3-reeb");
  ChartPoint pt = sample(sc, 1, 5).front();
  PointGeometry geo = point_geometry(pt, sc.projector, Backend::fd());
  for (int i = 0; i < 3; ++i) {
    NablaLResult r = nabla_L(geo, Eigen::VectorXd::Unit(3, i), Eigen::VectorXd::Unit(3, 1),
                             Eigen::VectorXd::Unit(3, 2));
    CHECK(r.residual() < 1e-5);
  }
}

TEST_CASE("difference tensor vanishes without torsion") {
  const Scenario& sc = find_scenario("product-s2xr");
  ChartPoint pt = make_point(sc.chart, Eigen::Vector3d(0.3, 0.2, -0.4));
  DifferenceTensor S = difference_tensor(pt, sc.projector, sc.backend);
  for (const auto& s : S.S) CHECK(s.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("difference tensor matches the brute-force connection of the transfer metric") {
  for (const char* id : {"s3-reeb", "torus-skew", "product-s2xr"}) {
    const Scenario& sc = find_scenario(id);
    for (const auto& pt : sample(sc, 3, 83)) {
      PointGeometry geo = oracle::geom_at(sc, pt);
      auto brute = oracle::difference_tensor_bruteforce(sc, geo);
      for (int i = 0; i < geo.n(); ++i)
        CHECK((geo.S[i] - brute[i]).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("difference tensor on the twisted torus is nonzero and symmetric") {
  const Scenario& sc = find_scenario("torus-skew");
  double largest = 0.0;
  for (const auto& pt : sample(sc, 10, 97)) {
    PointGeometry geo = oracle::geom_at(sc, pt);
    const int n = geo.n();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          CHECK(std::abs(geo.S[i](k, j) - geo.S[j](k, i)) < 1e-10);
          largest = std::max(largest, std::abs(geo.S[i](k, j)));
        }
  }
  CHECK(largest > 1e-3);
}

TEST_CASE("transfer-frame vectors are orthonormal for the transfer metric") {
  for (const auto& sc : catalogue()) {
    for (const auto& pt : sample(sc, sc.chart->dim >= 7 ? 2 : 5, 59)) {
      PointGeometry geo = oracle::geom_at(sc, pt);
      Eigen::MatrixXd gram =
          geo.frame_t.vectors.transpose() * geo.gt * geo.frame_t.vectors;
      CHECK((gram - Eigen::MatrixXd::Identity(geo.n(), geo.n())).cwiseAbs().maxCoeff() <
            1e-10);
      for (int i = 0; i < geo.m; ++i)
        CHECK((geo.p * geo.frame_t.vectors.col(i) - geo.frame_t.vectors.col(i))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
  }
}
