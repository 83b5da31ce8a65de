#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "refugia/asymptotics.hpp"
#include "refugia/spectra.hpp"

using namespace refugia;
using fixtures::kPi;

namespace {
const Grid& ring_grid() {
  static Grid g = build_grid(fixtures::ring(256));
  return g;
}
}  // namespace

TEST_CASE("base-point Jacobian from measures") {
  const Grid& g = ring_grid();
  const BasePointJacobian bp = jacobian_base_point(g, 1.0, 2.0);
  CHECK(bp.s0 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bp.t0 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bp.J(0, 0) == 0.0);
  CHECK(bp.J(0, 1) == doctest::Approx(-2.0 * kPi).epsilon(1e-12));
  CHECK(bp.J(1, 0) == doctest::Approx(-kPi).epsilon(1e-12));
  CHECK(bp.J(1, 1) == doctest::Approx(-2.0 * kPi).epsilon(1e-12));
  CHECK(bp.det == doctest::Approx(-2.0 * kPi * kPi).epsilon(1e-12));
  CHECK(bp.det < 0.0);
  // the closed form -b t0 |Omega0| |Omega1| reproduces the determinant
  const Measures m = measures(g);
  CHECK(bp.det == doctest::Approx(-1.0 * bp.t0 * m.omega0 * m.omega1).epsilon(1e-12));

  // negative determinant on the rect geometry too
  const Grid r = build_grid(fixtures::rect(32, 16));
  CHECK(jacobian_base_point(r, 1.7, 0.9).det < 0.0);
}

TEST_CASE("Lyapunov-Schmidt extraction is exact by construction") {
  const Grid& g = ring_grid();
  const double lambda = 0.05;
  const Field w = field_from_function(
      g, Region::Omega, [&](double x, double) { return 40.0 + 3.0 * std::cos(x); });
  const Field v = field_from_function(
      g, Region::Omega1, [&](double x, double) { return lambda * (2.0 + 0.1 * std::sin(x)); });
  const LyapunovSchmidt ls = extract_lyapunov_schmidt(g, w, v, lambda);
  // reconstruction s + lambda phi = lambda w
  for (int i = 0; i < g.num_nodes(); ++i)
    CHECK(ls.s + lambda * ls.phi.values[i] ==
          doctest::Approx(lambda * w.values[i]).epsilon(1e-12));
  CHECK(std::abs(integrate(g, ls.phi)) < 1e-10);
  CHECK(std::abs(integrate(g, ls.psi)) < 1e-10);
}

TEST_CASE("phi0 reference profile solves the mean-zero problem") {
  const Grid& g = ring_grid();
  const double mu = 2.0;
  const Field phi0 = phi0_reference(g, mu);
  Field w = constant_field(g, Region::Omega, 0.0);
  w.values = g.weight;
  CHECK(std::abs(phi0.values.dot(w.values)) < 1e-9);
  // residual of -Lap phi0 = mu((|O1|/|O0|) 1_{O0} - 1_{O1})
  const Measures m = measures(g);
  Field rhs = constant_field(g, Region::Omega, 0.0);
  for (int i = 0; i < g.num_nodes(); ++i)
    rhs.values[i] = mu * (g.label[i] == Region::Omega0 ? m.omega1 / m.omega0 : -1.0);
  const Field lap = neumann_laplacian(g, Region::Omega).apply(phi0);
  CHECK((lap.values + rhs.values).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("limit-system scaling probe approaches the reduction base point") {
  const Grid& g = ring_grid();
  const double mu = 2.0, b = 1.0;
  const double sigma1 = sigma1_curve(g, b, mu);
  std::vector<double> lambdas;
  for (double f : {0.2, 0.1, 0.05, 0.025}) lambdas.push_back(f * sigma1);
  const auto rows = lp2_scaling_probe(g, mu, b, lambdas);
  REQUIRE(rows.size() == 4);

  const Measures m = measures(g);
  const double s0 = mu * m.omega1 / m.omega0;
  const double t0 = m.omega / (b * m.omega1);

  // blow-up rate: log |w|_inf vs log(1/lambda) slope within 0.05 of 1
  double sxx = 0, sxy = 0, sx = 0, sy = 0;
  for (const auto& r : rows) {
    const double x = std::log(1.0 / r.lambda);
    const double y = std::log(r.state.u.values.lpNorm<Eigen::Infinity>());
    sxx += x * x;
    sxy += x * y;
    sx += x;
    sy += y;
  }
  const int n = static_cast<int>(rows.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(std::abs(slope - 1.0) <= 0.05);

  const auto& last = rows.back();
  CHECK(last.lambda_wmax == doctest::Approx(s0).epsilon(0.05));
  CHECK(last.mean_v_over_lambda == doctest::Approx(t0).epsilon(0.05));
  CHECK(std::abs(last.s - s0) / s0 < 0.05);
  CHECK(std::abs(last.t - t0) / t0 < 0.05);

  // Harnack bracket v/lambda in [1/b, C_H/b] with a ratio flat in lambda
  for (const auto& r : rows) {
    CHECK(r.vmin_over_lambda >= 1.0 / b - 0.05);
    CHECK(r.harnack_ratio < 10.0);
    // sharp bounds: lambda/b < v < mu nodewise
    CHECK(r.state.v.values.minCoeff() > r.lambda / b);
    CHECK(r.state.v.values.maxCoeff() < mu);
  }

  // the mean-zero profile approaches phi0 and the psi-part dies out
  const Field phi0 = phi0_reference(g, mu);
  const double phi_err =
      (last.phi.values - phi0.values).lpNorm<Eigen::Infinity>() /
      phi0.values.lpNorm<Eigen::Infinity>();
  CHECK(phi_err < 0.15);
  const double psi_scale = rows.front().psi.values.lpNorm<Eigen::Infinity>();
  CHECK(last.psi.values.lpNorm<Eigen::Infinity>() < psi_scale);
}

TEST_CASE("alpha sweep collapses to the prey-only state in regime A") {
  const Grid& g = ring_grid();
  const double mu = 2.0, b = 1.0, c = 1.0;
  const double sigma1 = sigma1_curve(g, b, mu);
  const double lambda = 1.5 * sigma1;
  const auto sweep = alpha_sweep(g, lambda, mu, b, c, {0.0, 1.0, 10.0, 100.0, 1000.0});
  REQUIRE(sweep.rows.size() == 5);
  for (const auto& r : sweep.rows) CHECK(r.solved);
  // the alpha = 0 baseline row is included, then the error decays monotonically
  double prev = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < sweep.rows.size(); ++i) {
    CHECK(sweep.rows[i].err_prey_only < prev);
    prev = sweep.rows[i].err_prey_only;
  }
  CHECK(sweep.rows.back().err_prey_only < 0.1 * sweep.rows[1].err_prey_only);
  CHECK(sweep.rows.back().limit_case == AlphaLimitCase::prey_only);
}

TEST_CASE("alpha sweep left of the curve tracks the rescaled limit") {
  const Grid& g = ring_grid();
  const double mu = 2.0, b = 1.0, c = 1.0;
  const double sigma1 = sigma1_curve(g, b, mu);
  const double lambda = 0.6 * sigma1;
  // small alpha rows may genuinely lack positive solutions (the fold has not
  // dipped below this lambda yet); the sweep records them without failing
  const auto sweep = alpha_sweep(g, lambda, mu, b, c, {60.0, 180.0, 540.0, 1620.0});
  REQUIRE(sweep.has_lp2_reference);
  int solved = 0;
  for (const auto& r : sweep.rows) {
    if (!r.solved) continue;
    ++solved;
    CHECK(r.limit_case != AlphaLimitCase::unresolved);
  }
  CHECK(solved >= 2);
  REQUIRE(sweep.rows[2].solved);
  REQUIRE(sweep.rows[3].solved);
  CHECK(sweep.rows[3].limit_case == AlphaLimitCase::rescaled);
  // the rescaled comparison tightens along the chain: |alpha u - w|_inf -> 0
  CHECK(sweep.rows[3].err_rescaled < sweep.rows[2].err_rescaled);
  CHECK(sweep.rows[3].err_rescaled < 0.5);
  // every solved row lands on one of the two limit behaviors; the rescaled
  // rows keep v bounded away from extinction
  for (const auto& r : sweep.rows)
    if (r.solved && r.limit_case == AlphaLimitCase::rescaled)
      CHECK(r.state.v.values.minCoeff() > 0.1);
}
