#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "refugia/continuation.hpp"
#include "refugia/spectra.hpp"
#include "refugia/thresholds.hpp"

using namespace refugia;

namespace {

struct RingSetup {
  Grid grid = build_grid(fixtures::ring(256));
  double b = 1.0, c = 1.0, mu = 2.0;
  double sigma1 = sigma1_curve(grid, b, mu);
  double astar = alpha_star(grid, mu, b, c);
};

const RingSetup& ring_setup() {
  static RingSetup s;
  return s;
}

}  // namespace

TEST_CASE("gamma_v seed enters on the side dictated by the direction scalar") {
  const auto& rs = ring_setup();
  ModelParams p;
  p.mu = rs.mu;
  p.b = rs.b;
  p.c = rs.c;

  p.alpha = rs.astar / 2.0;
  const auto sup = seed_from_gamma_v(rs.grid, p, 1e-3);
  CHECK(sup.first.params.lambda > rs.sigma1);
  CHECK(sup.first.strictly_positive);

  p.alpha = 2.0 * rs.astar;
  const auto sub = seed_from_gamma_v(rs.grid, p, 1e-3);
  CHECK(sub.first.params.lambda < rs.sigma1);
}

TEST_CASE("gamma_v seed approaches the bifurcation point linearly in s") {
  const auto& rs = ring_setup();
  ModelParams p;
  p.mu = rs.mu;
  p.b = rs.b;
  p.c = rs.c;
  p.alpha = 1.0;
  const auto p1 = seed_from_gamma_v(rs.grid, p, 2e-3).first;
  const auto p2 = seed_from_gamma_v(rs.grid, p, 1e-3).first;
  // linear extrapolation back to s = 0 recovers the origin within 5e-3 relative
  const double origin = 2.0 * p2.params.lambda - p1.params.lambda;
  CHECK(std::abs(origin - rs.sigma1) / rs.sigma1 < 5e-3);
  // amplitude shrinks linearly
  const double a1 = p1.u.values.lpNorm<Eigen::Infinity>();
  const double a2 = p2.u.values.lpNorm<Eigen::Infinity>();
  CHECK(a1 / a2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("gamma_u seed is supercritical with the predicted profile") {
  const auto& rs = ring_setup();
  ModelParams p;
  p.mu = -0.5;
  p.b = rs.b;
  p.c = rs.c;
  const double origin = -p.mu / p.c;
  for (double alpha : {0.0, 1.0, 10.0}) {
    p.alpha = alpha;
    const double s = 1e-3;
    const auto seeded = seed_from_gamma_u(rs.grid, p, s).first;
    CHECK(seeded.params.lambda > origin);
    // v-mean tracks the amplitude: mean(v)/s -> 1
    const double vmean =
        integrate(rs.grid, seeded.v) / measures(rs.grid).omega1;
    CHECK(vmean / s == doctest::Approx(1.0).epsilon(0.05));
    // prey dips below lambda where predators feed (phi_lower_star < 0)
    CHECK(seeded.u.values.minCoeff() < seeded.params.lambda);
  }
  // extrapolated origin matches |mu|/c within the grid tolerance
  p.alpha = 1.0;
  const auto q1 = seed_from_gamma_u(rs.grid, p, 2e-3).first;
  const auto q2 = seed_from_gamma_u(rs.grid, p, 1e-3).first;
  const double extrapolated = 2.0 * q2.params.lambda - q1.params.lambda;
  CHECK(std::abs(extrapolated - origin) / origin < 5e-3);
}

TEST_CASE("mu < 0 branch marches monotonically rightward") {
  const auto& rs = ring_setup();
  ModelParams p;
  p.mu = -0.5;
  p.b = rs.b;
  p.c = rs.c;
  p.alpha = 1.0;
  const auto seeded = seed_from_gamma_u(rs.grid, p, 1e-3);
  ContinuationConfig cfg;
  cfg.lambda_max = -p.mu / p.c + 1.0;
  cfg.max_steps = 400;
  const Branch br = continue_branch(rs.grid, seeded.first, seeded.second, cfg);
  CHECK(br.termination == BranchTermination::window_edge);
  CHECK(detect_folds(const_cast<Branch&>(br)).empty());
  for (size_t i = 1; i < br.points.size(); ++i)
    CHECK(br.points[i].params.lambda > br.points[i - 1].params.lambda);
  for (const auto& pt : br.points) CHECK(pt.strictly_positive);
}

TEST_CASE("subcritical branch folds and yields multiplicity") {
  const auto& rs = ring_setup();
  ModelParams p;
  p.mu = rs.mu;
  p.b = rs.b;
  p.c = rs.c;
  p.alpha = 4.0 * rs.astar;
  const auto seeded = seed_from_gamma_v(rs.grid, p, 1e-3);
  ContinuationConfig cfg;
  cfg.lambda_min = 0.0;
  cfg.lambda_max = rs.sigma1 + 0.6;
  cfg.max_steps = 600;
  Branch br = continue_branch(rs.grid, seeded.first, seeded.second, cfg);
  const auto folds = detect_folds(br);
  REQUIRE(!folds.empty());
  const double lambda_fold = br.points[folds[0]].params.lambda;
  CHECK(lambda_fold < rs.sigma1);

  // arclength consistency at every accepted point
  for (size_t i = 1; i < br.points.size(); ++i) {
    const auto& a = br.points[i - 1];
    const auto& bpt = br.points[i];
    Eigen::VectorXd diff(bpt.u.values.size() + bpt.v.values.size() + 1);
    diff << bpt.u.values - a.u.values, bpt.v.values - a.v.values,
        bpt.params.lambda - a.params.lambda;
    const double ds = bpt.s - a.s;
    CHECK(std::abs(state_norm(rs.grid, diff) - ds) <= 1e-10);
  }

  // each point is positive and inside the a priori box at its own lambda
  const double slack = 1.0 + 10.0 * rs.grid.hx * rs.grid.hx;
  for (const auto& pt : br.points) {
    const AprioriBox box = apriori_box(pt.params);
    CHECK(pt.v.values.maxCoeff() <= box.v_max * slack);
    CHECK(pt.u.values.maxCoeff() <= box.u_max * slack);
  }

  // multiplicity strictly between the fold and the origin
  ModelParams pm = p;
  pm.lambda = 0.5 * (lambda_fold + rs.sigma1);
  const auto found = distinct_states(multistart_newton(rs.grid, pm, 50, 2024), 1e-3);
  int positive = 0;
  for (const auto& st : found)
    if (st.positive()) ++positive;
  CHECK(positive >= 2);
}

TEST_CASE("fold detection on synthetic data") {
  CHECK(detect_folds(std::vector<double>{0.0, 0.1, 0.2, 0.3}).empty());
  // lambda(s) = s^2 sampled across s = 0
  std::vector<double> parabola;
  for (double s = -3.0; s <= 3.0; s += 0.5) parabola.push_back(s * s);
  const auto folds = detect_folds(parabola);
  REQUIRE(folds.size() == 1);
  CHECK(parabola[folds[0]] == 0.0);  // the sample at s = 0
}

TEST_CASE("limit-system branch blows up at the 1/lambda rate with bounded v") {
  const auto& rs = ring_setup();
  ContinuationConfig cfg;
  cfg.lambda_min = 0.02 * rs.sigma1;
  cfg.lambda_max = rs.sigma1 + 0.5;
  cfg.max_steps = 3000;
  cfg.ds_max = 1.0;
  const Branch br = continue_lp2_branch(rs.grid, rs.mu, rs.b, cfg);
  CHECK(br.origin == BranchOrigin::lp2);
  CHECK(std::abs(br.origin_lambda - rs.sigma1) < 1e-8);
  REQUIRE(br.points.size() > 10);

  const Measures m = measures(rs.grid);
  const double s0 = rs.mu * m.omega1 / m.omega0;
  const double t0 = m.omega / (rs.b * m.omega1);
  const auto& last = br.points.back();
  CHECK(last.params.lambda < 0.05 * rs.sigma1);
  CHECK(last.params.lambda * last.u.values.maxCoeff() ==
        doctest::Approx(s0).epsilon(0.08));
  const double vmean = integrate(rs.grid, last.v) / m.omega1;
  CHECK(vmean / last.params.lambda == doctest::Approx(t0).epsilon(0.08));
  // v stays inside the open interval (lambda/b, mu) along the traced branch
  for (const auto& pt : br.points) {
    if (pt.params.lambda > 0.9 * rs.sigma1) continue;  // skip the seed neighborhood
    CHECK(pt.v.values.minCoeff() > pt.params.lambda / rs.b);
    CHECK(pt.v.values.maxCoeff() < rs.mu);
  }
}
