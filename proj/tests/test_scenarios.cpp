#include <doctest.h>

#include "gtorsion/scenarios.hpp"
#include "oracles.hpp"

using namespace gtorsion;
namespace oracle = gtorsion::testing;

namespace {

Eigen::MatrixXd quaternion_block(char which) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  switch (which) {
    case 'i': m << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0; break;
    case 'j': m << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0; break;
    default:  m << 0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0; break;
  }
  return m;
}

Eigen::MatrixXd octonion_matrix(char which) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 8);
  m.topLeftCorner(4, 4) = quaternion_block(which);
  m.bottomRightCorner(4, 4) = quaternion_block(which);
  return m;
}

}  // namespace

TEST_CASE("catalogue ships the five scenarios with consistent expectations") {
  const auto& cat = catalogue();
  REQUIRE(cat.size() == 5);
  CHECK(cat[0].id == "flat4-const");
  CHECK(cat[1].id == "product-s2xr");
  CHECK(cat[2].id == "s3-reeb");
  CHECK(cat[3].id == "s7-hopf");
  CHECK(cat[4].id == "torus-skew");
  for (const auto& sc : cat) {
    if (sc.expectations.xi_zero) {
      CHECK(sc.expectations.minimal);
      CHECK(sc.expectations.totally_geodesic);
    }
    CHECK(!(sc.expectations.minimal && sc.expectations.non_minimal));
  }
  CHECK(find_scenario("s3-reeb").expectations.minimal);
  CHECK_FALSE(find_scenario("s3-reeb").expectations.xi_zero);
  CHECK(find_scenario("s7-hopf").expectations.minimal);
  CHECK(find_scenario("torus-skew").expectations.non_minimal);
  CHECK_THROWS_AS(find_scenario("nope"), ConfigError);
}

TEST_CASE("sampling is deterministic and respects margins") {
  const Scenario& sc = find_scenario("flat4-const");
  auto a = sample(sc, 10, 42);
  auto b = sample(sc, 10, 42);
  REQUIRE(a.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK((a[i].coords - b[i].coords).cwiseAbs().maxCoeff() == 0.0);
  auto c = sample(sc, 10, 43);
  bool all_same = true;
  for (int i = 0; i < 10; ++i)
    all_same = all_same && (a[i].coords - c[i].coords).cwiseAbs().maxCoeff() == 0.0;
  CHECK_FALSE(all_same);

  const Scenario& s3 = find_scenario("s3-reeb");
  for (const auto& pt : sample(s3, 100, 7)) {
    // margin arithmetic: at least 0.05 from the sample-domain boundary
    CHECK(s3.sample_domain.boundary_distance(pt.coords) >= 0.05 - 1e-12);
    CHECK(s3.chart->domain.contains(pt.coords, s3.chart->domain_margin));
  }
  CHECK_THROWS_AS(sample(s3, 0, 1), ConfigError);
}

TEST_CASE("projector fields satisfy their invariants on samples") {
  for (const auto& sc : catalogue()) {
    for (const auto& pt : sample(sc, sc.chart->dim >= 7 ? 4 : 20, 15)) {
      Eigen::MatrixXd p = sc.projector.value(pt.coords);
      Eigen::MatrixXd g = sc.chart->metric(pt.coords);
      CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((g * p - p.transpose() * g).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(p.trace() == doctest::Approx(double(sc.m)).epsilon(1e-10));
      // the metric itself stays symmetric positive definite
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("Reeb field chart expression matches the embedding pushforward") {
  const Scenario& sc = find_scenario("s3-reeb");
  Eigen::MatrixXd amb = Eigen::MatrixXd::Zero(4, 4);
  amb << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  SplitMix64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd u = oracle::random_vector(rng, 3) * 0.8;
    Eigen::VectorXd v = oracle::pushforward_ambient_field(amb, u);
    // the closed form used by the projector closure
    double r2 = u.squaredNorm();
    Eigen::Vector3d closed(u[0] * u[2] - u[1], u[1] * u[2] + u[0],
                           u[2] * u[2] + 0.5 * (1.0 - r2));
    CHECK((v - closed).cwiseAbs().maxCoeff() < 1e-9);
    // the projector fixes the field
    Eigen::MatrixXd p = sc.projector.value(u);
    CHECK((p * closed - closed).cwiseAbs().maxCoeff() < 1e-10);
    // unit length for the round metric
    double c = 4.0 / ((1.0 + r2) * (1.0 + r2));
    CHECK(c * closed.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("quaternionic fields on the 7-sphere match their pushforwards") {
  const Scenario& sc = find_scenario("s7-hopf");
  SplitMix64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd u = oracle::random_vector(rng, 7) * 0.5;
    Eigen::MatrixXd p = sc.projector.value(u);
    for (char which : {'i', 'j', 'k'}) {
      Eigen::VectorXd v = oracle::pushforward_ambient_field(octonion_matrix(which), u);
      CHECK((p * v - v).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(p.trace() == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("the Reeb distribution is totally geodesic") {
  const Scenario& sc = find_scenario("s3-reeb");
  for (const auto& pt : sample(sc, 10, 77)) {
    PointGeometry geo = oracle::geom_at(sc, pt);
    auto proj = sc.projector;
    auto chart = sc.chart;
    // direction field: normalized projector column along the sample point
    StackedFn field = [chart, proj](const Eigen::VectorXd& y) {
      Eigen::MatrixXd p = proj.value(y);
      Eigen::MatrixXd g = chart->metric(y);
      // deterministic spanning vector of the 1-dim distribution
      Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
      for (int j = 0; j < 3; ++j) {
        if (p.col(j).cwiseAbs().maxCoeff() > 0.3) {
          v = p.col(j);
          break;
        }
      }
      double norm = std::sqrt(v.dot(g * v));
      return Eigen::VectorXd(v / norm);
    };
    Eigen::VectorXd v0 = field(pt.coords);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
    for (int m = 0; m < 3; ++m) {
      Eigen::VectorXd d = fd_partial(field, pt.coords, m, 1e-4, true);
      acc += v0[m] * (d + geo.base.gamma_dir[m] * v0);
    }
    Eigen::VectorXd f_part = geo.q * acc;
    CHECK(geo.base.gnorm(f_part) < 1e-6);
  }
}

TEST_CASE("tensor field evaluation is deterministic") {
  const Scenario& sc = find_scenario("s3-reeb");
  ChartPoint pt = sample(sc, 1, 21).front();
  Eigen::MatrixXd a = sc.chart->metric(pt.coords);
  Eigen::MatrixXd b = sc.chart->metric(pt.coords);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd pa = sc.projector.value(pt.coords);
  Eigen::MatrixXd pb = sc.projector.value(pt.coords);
  CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
}
