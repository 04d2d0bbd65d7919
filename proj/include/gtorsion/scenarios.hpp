#pragma once

#include <set>
#include <string>

#include "gtorsion/gstructure.hpp"

namespace gtorsion {

struct Expectations {
  bool xi_zero = false;
  bool minimal = false;
  bool non_minimal = false;
  bool totally_geodesic = false;
};

// Per-scenario gates; defaults depend on the declared backend.
struct ScenarioTolerances {
  double identity = 1e-6;    // algebraic/differential identity residuals
  double curvature = 1e-4;   // curvature coherence (second-derivative level)
  double minimality = 1e-6;  // min/h1/h2 residuals on minimal scenarios
  double xi_zero = 1e-9;     // torsion norm on integrable scenarios
  double sff_zero = 1e-8;    // second-fundamental-form entries when totally geodesic
  double nonminimal = 1e-3;  // residual every non-minimal control must exceed
  double oracle = 1e-5;      // difference tensor vs brute-force comparison
};

struct Scenario {
  std::string id;
  std::shared_ptr<const Chart> chart;
  ProjectorField projector;
  int m = 0;  // rank of E
  Box sample_domain;
  double sample_margin = 0.05;
  Backend backend;
  Expectations expectations;
  ScenarioTolerances tol;
  int default_points = 100;
};

// The built-in catalogue:
//   flat4-const   flat 4-torus box, constant line distribution (integrable)
//   product-s2xr  round-sphere x line product, E tangent to the line factor
//   s3-reeb       round 3-sphere, E spanned by the Reeb/Hopf field
//   s7-hopf       round 7-sphere, E the quaternionic Hopf 3-plane field
//   torus-skew    warped 3-torus with a coordinate-twisting line field
const std::vector<Scenario>& catalogue();

const Scenario& find_scenario(const std::string& id);

// Gate tolerances for a scenario under a (possibly overridden) backend kind:
// backend defaults plus any scenario-specific loosening.
ScenarioTolerances scenario_tolerances(const Scenario& sc, BackendKind kind);

// Deterministic seeded-uniform sample, strictly inside sample_domain with
// the scenario margin. Identical (scenario, count, seed) gives an identical
// list.
std::vector<ChartPoint> sample(const Scenario& sc, int count, uint64_t seed);

}  // namespace gtorsion
