#include "gtorsion/report.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "gtorsion/frame_bundle.hpp"
#include "gtorsion/version.hpp"

namespace gtorsion {

std::string suite_name(Suite s) {
  switch (s) {
    case Suite::Identity: return "identity";
    case Suite::Curvature: return "curvature";
    case Suite::Minimality: return "minimality";
  }
  return "identity";
}

Suite suite_from_name(const std::string& name) {
  if (name == "identity") return Suite::Identity;
  if (name == "curvature") return Suite::Curvature;
  if (name == "minimality") return Suite::Minimality;
  throw ConfigError("unknown suite: " + name);
}

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry = {
      {"christoffel_symmetry", Suite::Identity, "G^k_ij - G^k_ji",
       "symmetry of the Levi-Civita coefficients in their lower indices"},
      {"metric_compatibility", Suite::Identity,
       "d_i g_jk - G^l_ij g_lk - G^l_ik g_jl",
       "vanishing covariant derivative of the metric"},
      {"riemann_symmetry", Suite::Identity,
       "R_lkij + R_lkji;  R_lkij + R_klij;  R_lkij - R_ijlk;  first Bianchi sum",
       "the four algebraic curvature symmetries, lowered with g"},
      {"torsion_membership", Suite::Identity,
       "g(xi_X Y, Z) + g(Y, xi_X Z);  (xi_X)_gg-block",
       "torsion values are skew and block-off-diagonal for the splitting"},
      {"torsion_gradient_g_part", Suite::Identity,
       "(nabla_X xi_Y)_gg = [xi_X, xi_Y]_gg",
       "block-diagonal part of the torsion gradient against the torsion bracket"},
      {"torsion_gradient_m_part", Suite::Identity,
       "(nabla_X xi_Y)_m = nabla'_X xi_Y + [xi_X, xi_Y]_m",
       "block-off-diagonal part of the torsion gradient via the adapted connection"},
      {"curvature_m_part", Suite::Identity,
       "R(X,Y)_m = nabla'_X xi_Y - nabla'_Y xi_X + [xi_X, xi_Y]_m",
       "off-diagonal curvature block from antisymmetrized torsion derivatives"},
      {"curvature_split", Suite::Identity,
       "R(X,Y) = R'(X,Y) + (nabla_X xi)_Y - (nabla_Y xi)_X - [xi_X, xi_Y]",
       "full curvature through the adapted-connection curvature and the torsion"},
      {"curvature_pairing", Suite::Identity, "g(R_a(X), Y) = B(a, R(X,Y))",
       "duality between the curvature operator and the curvature pairing"},
      {"torsion_dual_pairing", Suite::Identity, "g(xi.a, X) = -B(a, xi_X)",
       "the torsion contraction is the metric dual of the torsion pairing"},
      {"metric_increment", Suite::Identity,
       "gt(X,Y) = g(X,Y) + B(xi_X, xi_Y)",
       "transfer metric as the torsion-square increment of g"},
      {"transfer_gradient", Suite::Identity,
       "g((nabla_X L)Y, Z) = B((nabla_X xi)_Y, xi_Z) + B((nabla_X xi)_Z, xi_Y)",
       "covariant gradient of the transfer tensor against torsion gradients"},
      {"difference_identity", Suite::Identity,
       "2 g(S(X,Y), LZ) = B((nabla_X xi)_Y + (nabla_Y xi)_X, xi_Z) + cyclic terms",
       "defining covector identity of the connection difference tensor"},
      {"difference_oracle", Suite::Identity,
       "S vs Levi-Civita(gt) - Levi-Civita(g), gt differentiated numerically",
       "difference tensor against the brute-force connection of the transfer metric"},
      {"q_pairing", Suite::Identity, "gt(Q_a(X), Y) = B(R'(X,Y), a)",
       "duality between the reduced curvature operator and the structure curvature"},
      {"q_skewness", Suite::Identity, "gt(Q_a X, Y) + gt(X, Q_a Y) = 0",
       "skewness of the reduced curvature operator for the transfer metric"},
      {"projection_consistency", Suite::Identity,
       "tangent + normal = id; mutual orthogonality; idempotence",
       "orthogonal splitting of frame-bundle vectors along the reduction"},

      {"rp_skew_first", Suite::Curvature, "<R(u,v)w, z> + <R(v,u)w, z>",
       "curvature of the reduced bundle is skew in its first pair"},
      {"rp_skew_last", Suite::Curvature, "<R(u,v)w, z> + <R(u,v)z, w>",
       "curvature of the reduced bundle is skew in its last pair"},
      {"rp_pair_exchange", Suite::Curvature, "<R(u,v)w, z> - <R(w,z)u, v>",
       "pair-exchange symmetry of the reduced-bundle curvature"},
      {"rp_first_bianchi", Suite::Curvature, "R(u,v)w + R(v,w)u + R(w,u)v",
       "first Bianchi identity of the reduced-bundle curvature"},
      {"ricci_match", Suite::Curvature,
       "closed-form Ricci vs trace of the curvature over a tangent basis",
       "cross-validation of the Ricci formulas"},
      {"scalar_match", Suite::Curvature,
       "closed-form scalar curvature vs double trace",
       "cross-validation of the scalar-curvature formula"},
      {"sectional_match", Suite::Curvature,
       "closed sectional values vs <R(u,v)v, u> on orthonormal pairs",
       "cross-validation of the sectional-curvature formulas"},
      {"sectional_spread", Suite::Curvature,
       "max kappa - min kappa over the sampled tangent planes",
       "observed spread of sectional values; reported as evidence, never gated"},
      {"vertical_ricci_floor", Suite::Curvature, "Ric(a*, a*) >= 0",
       "vertical Ricci directions are never negatively curved"},
      {"sectional_floor_integrable", Suite::Curvature,
       "kappa >= 0 for integrable flat scenarios",
       "non-negative sectional curvature in the integrable flat case"},
      {"scalar_positivity_transfer", Suite::Curvature,
       "R' = 0 and s~ > 0 imply s^P > 0",
       "scalar-curvature positivity transfer when the structure curvature vanishes"},

      {"xi_norm", Suite::Minimality, "(sum_i B(xi_{e_i}, xi_{e_i}))^{1/2}",
       "total norm of the intrinsic torsion"},
      {"sff_max", Suite::Minimality, "max |<Pi(u,v), a+>|",
       "largest second-fundamental-form pairing entry"},
      {"sff_symmetry", Suite::Minimality, "Pi(u,v) - Pi(v,u)",
       "symmetry of the second fundamental form table"},
      {"min_residual", Suite::Minimality,
       "|sum_i (nabla_{e_i} xi)_{e_i} - xi_{R_{xi_{e_i}}(e_i)}|_B",
       "mean-curvature obstruction of the reduction"},
      {"h1_residual", Suite::Minimality,
       "|sum_i (nabla_{e_i} xi)_{e_i} - xi_{S(e_i,e_i)}|_B",
       "vertical tension component of the induced section"},
      {"h2_residual", Suite::Minimality,
       "|sum_i R_{xi_{e_i}}(e_i) - S(e_i,e_i)|_g",
       "horizontal tension component of the induced section"},
      {"minimality_equivalence", Suite::Minimality,
       "pass(min_residual) == (pass(h1) && pass(h2))",
       "equivalence of minimality and harmonicity at the scenario gate"},
      {"h2_h1_ratio", Suite::Minimality, "h2 / tol when h1 passes",
       "observed strength of the one-sided implication between the tension parts"},
      {"nonminimal_min_excess", Suite::Minimality, "min_residual > threshold",
       "the control scenario must visibly fail minimality"},
      {"nonminimal_h_excess", Suite::Minimality, "max(h1, h2) > threshold",
       "the control scenario must visibly fail harmonicity"},
  };
  return registry;
}

const CheckInfo& check_info(const std::string& name) {
  for (const auto& c : check_registry())
    if (c.name == name) return c;
  throw ConfigError("unknown check: " + name);
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

namespace {

struct PointContext {
  const Scenario* sc = nullptr;
  Backend backend;
  ScenarioTolerances tol;
  std::set<Suite> suites;
  const std::map<std::string, double>* overrides = nullptr;
  uint64_t seed = 0;
};

double override_or(const PointContext& cx, const std::string& name, double fallback) {
  auto it = cx.overrides->find(name);
  return it == cx.overrides->end() ? fallback : it->second;
}

void push_check(std::vector<CheckResult>& out, const PointContext& cx,
                const std::string& name, double value, double tol, bool gated,
                bool greater_is_pass = false) {
  CheckResult r;
  r.name = name;
  r.value = value;
  r.tol = override_or(cx, name, tol);
  r.greater_is_pass = greater_is_pass;
  r.gated = gated;
  r.pass = greater_is_pass ? value > r.tol : value <= r.tol;
  out.push_back(std::move(r));
}

Eigen::VectorXd random_vec(SplitMix64& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

Eigen::MatrixXd random_gskew(SplitMix64& rng, const PointGeometry& geo) {
  Eigen::MatrixXd m(geo.n(), geo.n());
  for (int i = 0; i < geo.n(); ++i)
    for (int j = 0; j < geo.n(); ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return skew_part(m, geo.base.g, geo.base.g_inv);
}

void identity_checks(std::vector<CheckResult>& out, const PointContext& cx,
                     const PointGeometry& geo, SplitMix64& rng, int probes) {
  const int n = geo.n();
  const double tol = cx.tol.identity;

  push_check(out, cx, "christoffel_symmetry", christoffel_symmetry_residual(geo.base),
             tol, true);
  push_check(out, cx, "metric_compatibility", metric_compatibility_residual(geo.base),
             tol, true);
  auto sym = riemann_symmetry_residuals(geo.base);
  push_check(out, cx, "riemann_symmetry",
             std::max({sym.antisym_last_pair, sym.antisym_first_pair, sym.pair_exchange,
                       sym.first_bianchi}),
             10.0 * tol, true);

  double membership = 0.0;
  for (const auto& x : geo.xi)
    membership = std::max({membership, skewness_residual(x, geo.base.g),
                           geo.project_g(x).cwiseAbs().maxCoeff()});
  push_check(out, cx, "torsion_membership", membership, tol, true);

  double grad_g = 0.0, grad_m = 0.0, curv_m = 0.0, split = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd grad = geo.nabla_xi[i][j];  // (nabla_i xi)_j
      for (int b = 0; b < n; ++b) grad += geo.base.gamma[b](i, j) * geo.xi[b];
      Eigen::MatrixXd com = commutator(geo.xi[i], geo.xi[j]);
      grad_g = std::max(grad_g,
                        (geo.project_g(grad) - geo.project_g(com)).cwiseAbs().maxCoeff());
      Eigen::MatrixXd prime = grad - com;  // nabla'_i (xi_j)
      grad_m = std::max(grad_m, (geo.project_m(grad) - geo.project_m(prime) -
                                 geo.project_m(com))
                                    .cwiseAbs()
                                    .maxCoeff());
      if (i < j) {
        Eigen::MatrixXd grad_ji = geo.nabla_xi[j][i];
        for (int b = 0; b < n; ++b) grad_ji += geo.base.gamma[b](j, i) * geo.xi[b];
        Eigen::MatrixXd prime_ji = grad_ji - commutator(geo.xi[j], geo.xi[i]);
        Eigen::MatrixXd rhs = geo.project_m(prime) - geo.project_m(prime_ji) +
                              geo.project_m(com);
        curv_m = std::max(
            curv_m, (geo.project_m(geo.base.riem[i][j]) - rhs).cwiseAbs().maxCoeff());
        Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
        Eigen::VectorXd ej = Eigen::VectorXd::Unit(n, j);
        Eigen::MatrixXd full = geo.rprime[i][j] + geo.nabla_xi_of(ei, ej) -
                               geo.nabla_xi_of(ej, ei) - com;
        split = std::max(split, (geo.base.riem[i][j] - full).cwiseAbs().maxCoeff());
      }
    }
  push_check(out, cx, "torsion_gradient_g_part", grad_g, tol, true);
  push_check(out, cx, "torsion_gradient_m_part", grad_m, tol, true);
  push_check(out, cx, "curvature_m_part", curv_m, tol, true);
  push_check(out, cx, "curvature_split", split, tol, true);

  double pairing = 0.0, dual = 0.0, increment = 0.0, gradient = 0.0;
  double diff_identity = 0.0, qpair = 0.0, qskew = 0.0, projres = 0.0;
  for (int t = 0; t < probes; ++t) {
    Eigen::VectorXd X = random_vec(rng, n), Y = random_vec(rng, n), Z = random_vec(rng, n);
    Eigen::MatrixXd skew = random_gskew(rng, geo);
    Eigen::MatrixXd a_m = geo.project_m(skew);
    Eigen::MatrixXd a_g = geo.project_g(skew);

    pairing = std::max(pairing, std::abs(geo.base.gdot(r_op(geo, skew, X), Y) -
                                         killing_pairing(skew, geo.base.riem_of(X, Y))));
    dual = std::max(dual, std::abs(geo.base.gdot(xi_dot_unchecked(geo, a_m), X) +
                                   killing_pairing(a_m, geo.xi_of(X))));
    increment = std::max(increment,
                         std::abs(geo.gtdot(X, Y) - geo.base.gdot(X, Y) -
                                  killing_pairing(geo.xi_of(X), geo.xi_of(Y))));
    gradient = std::max(gradient, nabla_L(geo, X, Y, Z).residual());

    double lhs = 2.0 * geo.base.gdot(geo.s_of(X, Y), geo.L * Z);
    auto nx = [&](const Eigen::VectorXd& A, const Eigen::VectorXd& B) {
      return geo.nabla_xi_of(A, B);
    };
    double rhs = killing_pairing(nx(X, Y) + nx(Y, X), geo.xi_of(Z)) +
                 killing_pairing(nx(X, Z) - nx(Z, X), geo.xi_of(Y)) +
                 killing_pairing(nx(Y, Z) - nx(Z, Y), geo.xi_of(X));
    diff_identity = std::max(diff_identity, std::abs(lhs - rhs));

    Eigen::VectorXd qx = q_apply(geo, a_g, X);
    qpair = std::max(qpair, std::abs(geo.gtdot(qx, Y) -
                                     killing_pairing(geo.rprime_of(X, Y), a_g)));
    qskew = std::max(qskew,
                     std::abs(geo.gtdot(qx, Y) + geo.gtdot(X, q_apply(geo, a_g, Y))));

    BundleVector v{X, skew, BundleFlavor::Generic};
    BundleVector tan = project_tangent(geo, v);
    BundleVector nor = project_normal(geo, v);
    BundleVector tan2 = project_tangent(geo, tan);
    projres = std::max({projres, (tan.hor + nor.hor - v.hor).cwiseAbs().maxCoeff(),
                        (tan.ver + nor.ver - v.ver).cwiseAbs().maxCoeff(),
                        std::abs(bundle_dot(geo, tan, nor)),
                        (tan2.hor - tan.hor).cwiseAbs().maxCoeff(),
                        (tan2.ver - tan.ver).cwiseAbs().maxCoeff()});
  }
  push_check(out, cx, "curvature_pairing", pairing, tol, true);
  push_check(out, cx, "torsion_dual_pairing", dual, tol, true);
  push_check(out, cx, "metric_increment", increment, tol, true);
  push_check(out, cx, "transfer_gradient", gradient, tol, true);
  push_check(out, cx, "difference_identity", diff_identity, tol, true);

  // brute-force oracle for the difference tensor
  auto oracle_chart = tilde_chart(cx.sc->chart, cx.sc->projector, cx.backend, true);
  ChristoffelField oracle =
      christoffel(ChartPoint{oracle_chart, geo.base.x}, Backend::fd_richardson(1e-3));
  double oracle_res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        oracle_res = std::max(oracle_res,
                              std::abs(geo.S[i](k, j) - (oracle.components[k](i, j) -
                                                         geo.base.gamma[k](i, j))));
  push_check(out, cx, "difference_oracle", oracle_res, cx.tol.oracle, true);

  push_check(out, cx, "q_pairing", qpair, tol, true);
  push_check(out, cx, "q_skewness", qskew, tol, true);
  // exact linear algebra on the analytic path; torsion jitter otherwise
  double proj_tol = cx.backend.kind == BackendKind::Analytic ? 1e-10 : tol;
  push_check(out, cx, "projection_consistency", projres, proj_tol, true);
}

void curvature_checks(std::vector<CheckResult>& out, const PointContext& cx,
                      const BundleGeometry& bg, SplitMix64& rng) {
  const PointGeometry& geo = bg.pg;
  const int n = geo.n();
  const double tol = cx.tol.curvature;

  auto random_ptangent = [&]() {
    BundleVector v = lift_horizontal(geo, random_vec(rng, n));
    v.ver += geo.project_g(random_gskew(rng, geo));
    return v;
  };

  double skew_first = 0.0, skew_last = 0.0, exchange = 0.0, bianchi = 0.0;
  for (int t = 0; t < 5; ++t) {
    BundleVector u = random_ptangent(), v = random_ptangent();
    BundleVector w = random_ptangent(), z = random_ptangent();
    double ruvwz = bundle_dot(geo, curvature_P(bg, u, v, w), z);
    skew_first = std::max(skew_first,
                          std::abs(ruvwz + bundle_dot(geo, curvature_P(bg, v, u, w), z)));
    skew_last = std::max(skew_last,
                         std::abs(ruvwz + bundle_dot(geo, curvature_P(bg, u, v, z), w)));
    exchange = std::max(exchange,
                        std::abs(ruvwz - bundle_dot(geo, curvature_P(bg, w, z, u), v)));
    BundleVector b1 = curvature_P(bg, u, v, w);
    BundleVector b2 = curvature_P(bg, v, w, u);
    BundleVector b3 = curvature_P(bg, w, u, v);
    bianchi = std::max({bianchi, (b1.hor + b2.hor + b3.hor).cwiseAbs().maxCoeff(),
                        (b1.ver + b2.ver + b3.ver).cwiseAbs().maxCoeff()});
  }
  push_check(out, cx, "rp_skew_first", skew_first, tol, true);
  push_check(out, cx, "rp_skew_last", skew_last, tol, true);
  push_check(out, cx, "rp_pair_exchange", exchange, tol, true);
  push_check(out, cx, "rp_first_bianchi", bianchi, tol, true);

  double ricci_res = 0.0;
  for (int t = 0; t < 3; ++t) {
    BundleVector u = random_ptangent(), v = random_ptangent();
    ricci_res = std::max(ricci_res,
                         std::abs(ricci_P_closed(bg, u, v) - ricci_P_trace(bg, u, v)));
  }
  push_check(out, cx, "ricci_match", ricci_res, tol, true);
  push_check(out, cx, "scalar_match", std::abs(scalar_P_closed(bg) - scalar_P_trace(bg)),
             tol, true);

  // closed sectional forms on orthonormal type pairs
  double sec_res = 0.0;
  double sec_min = std::numeric_limits<double>::infinity(), sec_max = -sec_min;
  auto observe = [&](double kappa) {
    sec_min = std::min(sec_min, kappa);
    sec_max = std::max(sec_max, kappa);
  };
  auto basis = ptangent_basis(geo);
  for (int i = 0; i < n && i < 3; ++i)
    for (int j = i + 1; j < n && j < 4; ++j) {
      Eigen::VectorXd X = geo.frame_t.vectors.col(i), Y = geo.frame_t.vectors.col(j);
      double closed = sectional(bg.tilde, X, Y) -
                      0.75 * std::pow(bnorm(geo.rprime_of(X, Y)), 2);
      double direct = sectional_P(bg, basis[i], basis[j]);
      observe(direct);
      sec_res = std::max(sec_res, std::abs(closed - direct));
    }
  for (int i = 0; i < std::min(n, 2); ++i)
    for (int A = 0; A < std::min(bg.dim_g(), 2); ++A) {
      Eigen::VectorXd X = geo.frame_t.vectors.col(i);
      Eigen::VectorXd qx = q_apply(geo, geo.basis_g[A], X);
      double closed = 0.25 * geo.gtdot(qx, qx);
      double direct = sectional_P(bg, basis[i], basis[n + A]);
      observe(direct);
      sec_res = std::max(sec_res, std::abs(closed - direct));
    }
  for (int A = 0; A < bg.dim_g(); ++A)
    for (int B = A + 1; B < std::min(bg.dim_g(), A + 3); ++B) {
      Eigen::MatrixXd br = commutator(geo.basis_g[A], geo.basis_g[B]);
      double closed = 0.25 * killing_pairing(br, br);
      double direct = sectional_P(bg, basis[n + A], basis[n + B]);
      observe(direct);
      sec_res = std::max(sec_res, std::abs(closed - direct));
    }
  push_check(out, cx, "sectional_match", sec_res, tol, true);
  // evidence against constant sectional curvature, reported but not gated
  push_check(out, cx, "sectional_spread", sec_max - sec_min, 1.0, false);

  double ric_floor = 0.0;
  for (int t = 0; t < 5 && bg.dim_g() > 0; ++t) {
    Eigen::MatrixXd a = geo.project_g(random_gskew(rng, geo));
    BundleVector av = lift_vertical(a);
    ric_floor = std::max(ric_floor, -ricci_P_closed(bg, av, av));
  }
  push_check(out, cx, "vertical_ricci_floor", std::max(0.0, ric_floor), tol, true);

  // non-negative sectional curvature in the integrable flat case
  double flat_floor = 0.0;
  double riem_mag = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      riem_mag = std::max(riem_mag, geo.base.riem[i][j].cwiseAbs().maxCoeff());
  bool integrable_flat = cx.sc->expectations.xi_zero && riem_mag < 1e-10;
  if (integrable_flat) {
    for (int t = 0; t < 10; ++t) {
      BundleVector u = random_ptangent(), v = random_ptangent();
      flat_floor = std::max(flat_floor, -sectional_P(bg, u, v));
    }
  }
  push_check(out, cx, "sectional_floor_integrable", std::max(0.0, flat_floor), tol,
             integrable_flat);

  // scalar positivity transfer, checked when its hypothesis holds
  double rp_mag = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rp_mag = std::max(rp_mag, geo.rprime[i][j].cwiseAbs().maxCoeff());
  double s_tilde = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd ei = geo.frame_t.vectors.col(i), ej = geo.frame_t.vectors.col(j);
      s_tilde += geo.gtdot(bg.tilde.riem_of(ei, ej) * ej, ei);
    }
  double positivity = 0.0;
  if (rp_mag <= tol && s_tilde > tol) positivity = std::max(0.0, -scalar_P_closed(bg));
  push_check(out, cx, "scalar_positivity_transfer", positivity, tol, true);
}

void minimality_checks(std::vector<CheckResult>& out, const PointContext& cx,
                       const PointGeometry& geo) {
  const Expectations& exp = cx.sc->expectations;
  const double tol_min = override_or(cx, "min_residual", cx.tol.minimality);

  double xi_sq = 0.0;
  for (int i = 0; i < geo.n(); ++i) {
    Eigen::MatrixXd x = geo.xi_of(geo.frame.vectors.col(i));
    xi_sq += killing_pairing(x, x);
  }
  push_check(out, cx, "xi_norm", std::sqrt(std::max(0.0, xi_sq)), cx.tol.xi_zero,
             exp.xi_zero);

  SecondFundamentalPairing sff = second_fundamental_form(geo);
  push_check(out, cx, "sff_max", sff.max_abs(), cx.tol.sff_zero,
             exp.totally_geodesic || exp.xi_zero);
  push_check(out, cx, "sff_symmetry", sff.symmetry_residual(), cx.tol.identity, true);

  MinimalityResult min = minimality_residual(geo);
  HarmonicityResult h = harmonicity_residuals(geo);
  push_check(out, cx, "min_residual", min.norm, cx.tol.minimality, exp.minimal);
  push_check(out, cx, "h1_residual", h.h1_norm, cx.tol.minimality, exp.minimal);
  push_check(out, cx, "h2_residual", h.h2_norm, cx.tol.minimality, exp.minimal);

  bool min_pass = min.norm <= tol_min;
  bool h_pass = h.h1_norm <= tol_min && h.h2_norm <= tol_min;
  push_check(out, cx, "minimality_equivalence", min_pass == h_pass ? 0.0 : 1.0, 0.5,
             true);
  push_check(out, cx, "h2_h1_ratio", h.h1_norm <= tol_min ? h.h2_norm / tol_min : 0.0,
             1.0, false);

  if (exp.non_minimal) {
    push_check(out, cx, "nonminimal_min_excess", min.norm, cx.tol.nonminimal, true,
               true);
    push_check(out, cx, "nonminimal_h_excess", std::max(h.h1_norm, h.h2_norm),
               cx.tol.nonminimal, true, true);
  }
}

std::vector<CheckResult> evaluate_point(const PointContext& cx, const ChartPoint& pt,
                                        int index) {
  std::vector<CheckResult> out;
  SplitMix64 rng(mix_seed(mix_seed(cx.seed, hash_string(cx.sc->id)),
                          static_cast<uint64_t>(index)));

  bool need_curvature = cx.suites.count(Suite::Curvature) > 0;
  BundleGeometry bg = bundle_geometry(pt, cx.sc->projector, cx.backend, need_curvature);

  if (cx.suites.count(Suite::Identity))
    identity_checks(out, cx, bg.pg, rng, 100);
  if (need_curvature) curvature_checks(out, cx, bg, rng);
  if (cx.suites.count(Suite::Minimality)) minimality_checks(out, cx, bg.pg);
  return out;
}

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("GTORSION_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) cap = v;
  }
  return cap;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config file: ") + e.what());
  }
  if (!doc.contains("scenarios")) return;
  for (const auto& [id, body] : doc["scenarios"].items()) {
    find_scenario(id);  // unknown ids rejected before any computation
    ScenarioOverride& ov = config.scenario_overrides[id];
    if (body.contains("points")) ov.points = body["points"].get<int>();
    if (body.contains("seed")) ov.seed = body["seed"].get<uint64_t>();
    if (body.contains("backend"))
      ov.backend = backend_from_name(body["backend"].get<std::string>());
    if (body.contains("tolerances"))
      for (const auto& [name, tol] : body["tolerances"].items()) {
        check_info(name);
        ov.tol_overrides[name] = tol.get<double>();
      }
  }
}

Report run(const RunConfig& config) {
  // configuration validation happens before any computation
  std::vector<const Scenario*> scenarios;
  if (config.scenario_ids.empty()) {
    for (const auto& sc : catalogue()) scenarios.push_back(&sc);
  } else {
    for (const auto& id : config.scenario_ids) scenarios.push_back(&find_scenario(id));
  }
  if (config.points < 0) throw ConfigError("points must be >= 1");
  if (config.fd_step != 0.0 && (config.fd_step <= 0.0 || config.fd_step > 1e-2))
    throw ConfigError("fd step must lie in (0, 1e-2]");
  if (config.suites.empty()) throw ConfigError("no suites selected");
  for (const auto& [name, tol] : config.tol_overrides) {
    check_info(name);
    if (tol <= 0.0) throw ConfigError("tolerance override must be positive: " + name);
  }
  for (const auto& [id, ov] : config.scenario_overrides) {
    find_scenario(id);
    if (ov.points && *ov.points < 1) throw ConfigError("override points must be >= 1");
    for (const auto& [name, tol] : ov.tol_overrides) {
      check_info(name);
      if (tol <= 0.0) throw ConfigError("tolerance override must be positive: " + name);
    }
  }

  Report report;
  report.version = GTORSION_VERSION;
  report.seed = config.seed;
  report.backend =
      config.backend_override ? backend_name(*config.backend_override) : "scenario-default";
  report.fd_step = config.fd_step;
  for (Suite s : config.suites) report.suites.push_back(suite_name(s));

  for (const Scenario* sc : scenarios) {
    const ScenarioOverride* ov = nullptr;
    if (auto it = config.scenario_overrides.find(sc->id);
        it != config.scenario_overrides.end())
      ov = &it->second;

    PointContext cx;
    cx.sc = sc;
    cx.backend = sc->backend;
    if (config.backend_override) cx.backend.kind = *config.backend_override;
    if (ov && ov->backend) cx.backend.kind = *ov->backend;
    if (config.fd_step != 0.0) cx.backend.step = config.fd_step;
    cx.tol = scenario_tolerances(*sc, cx.backend.kind);
    cx.suites = config.suites;
    std::map<std::string, double> merged_tols = config.tol_overrides;
    if (ov)
      for (const auto& [name, tol] : ov->tol_overrides) merged_tols[name] = tol;
    cx.overrides = &merged_tols;
    cx.seed = config.seed;
    if (ov && ov->seed) cx.seed = *ov->seed;

    int count = config.points > 0 ? config.points : sc->default_points;
    if (ov && ov->points) count = *ov->points;
    std::vector<ChartPoint> pts = sample(*sc, count, cx.seed);

    std::vector<PointReport> point_reports(pts.size());
    std::vector<std::string> errors(pts.size());
    std::atomic<size_t> cursor{0};
    int workers = std::min<int>(thread_cap(), static_cast<int>(pts.size()));
    auto work = [&]() {
      for (size_t i = cursor.fetch_add(1); i < pts.size(); i = cursor.fetch_add(1)) {
        try {
          point_reports[i].index = static_cast<int>(i);
          point_reports[i].coords = pts[i].coords;
          point_reports[i].checks = evaluate_point(cx, pts[i], static_cast<int>(i));
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    };
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    for (size_t i = 0; i < pts.size(); ++i)
      if (!errors[i].empty()) {
        std::ostringstream os;
        os << "scenario " << sc->id << ", point " << i << " at ["
           << pts[i].coords.transpose() << "]: " << errors[i];
        throw NumericalError(os.str());
      }

    ScenarioReport sr;
    sr.id = sc->id;
    sr.backend = backend_name(cx.backend.kind);
    sr.points = static_cast<int>(pts.size());
    if (sc->expectations.xi_zero) sr.expectations.push_back("xi_zero");
    if (sc->expectations.minimal) sr.expectations.push_back("minimal");
    if (sc->expectations.non_minimal) sr.expectations.push_back("non_minimal");
    if (sc->expectations.totally_geodesic) sr.expectations.push_back("totally_geodesic");
    sr.point_reports = std::move(point_reports);

    for (const auto& pr : sr.point_reports)
      for (const auto& c : pr.checks) {
        auto& agg = sr.aggregates[c.name];
        agg.max_value = std::max(agg.max_value, c.value);
        agg.tol = c.tol;
        agg.greater_is_pass = c.greater_is_pass;
        agg.gated = agg.gated || c.gated;
      }
    for (auto& [name, agg] : sr.aggregates) {
      agg.pass = agg.greater_is_pass ? agg.max_value > agg.tol : agg.max_value <= agg.tol;
      if (agg.gated && !agg.pass) sr.pass = false;
    }
    if (!sr.pass) report.overall_pass = false;
    report.scenarios.push_back(std::move(sr));
  }

  return report;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["environment"] = {{"version", version},
                      {"backend", backend},
                      {"fd_step", fd_step},
                      {"seed", seed},
                      {"suites", suites}};
  j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& sc : scenarios) {
    nlohmann::ordered_json js;
    js["id"] = sc.id;
    js["backend"] = sc.backend;
    js["points"] = sc.points;
    js["expectations"] = sc.expectations;
    js["aggregates"] = nlohmann::ordered_json::object();
    for (const auto& [name, agg] : sc.aggregates)
      js["aggregates"][name] = {{"max", agg.max_value},
                                {"tol", agg.tol},
                                {"gated", agg.gated},
                                {"pass", agg.pass}};
    js["point_checks"] = nlohmann::ordered_json::array();
    for (const auto& pr : sc.point_reports) {
      nlohmann::ordered_json jp;
      jp["index"] = pr.index;
      jp["coords"] = std::vector<double>(pr.coords.data(),
                                         pr.coords.data() + pr.coords.size());
      jp["checks"] = nlohmann::ordered_json::array();
      for (const auto& c : pr.checks)
        jp["checks"].push_back({{"name", c.name},
                                {"value", c.value},
                                {"tol", c.tol},
                                {"gated", c.gated},
                                {"pass", c.pass}});
      js["point_checks"].push_back(std::move(jp));
    }
    js["pass"] = sc.pass;
    j["scenarios"].push_back(std::move(js));
  }
  j["overall_pass"] = overall_pass;
  return j;
}

}  // namespace gtorsion
