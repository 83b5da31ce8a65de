#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "refugia/spectra.hpp"

using namespace refugia;
using fixtures::kPi;

TEST_CASE("zero potential gives the zero eigenvalue with constant eigenfunction") {
  const Grid g = build_grid(fixtures::ring(64));
  const Field q = constant_field(g, Region::Omega, 0.0);
  const EigenResult e = principal_eigen(g, Region::Omega, q, Bc::neumann);
  CHECK(std::abs(e.value) < 1e-10);
  const double expect = 1.0 / std::sqrt(2.0 * kPi);
  CHECK((e.eigenfunction.values.array() - expect).abs().maxCoeff() < 1e-8);
}

TEST_CASE("constant potential shifts the eigenvalue exactly") {
  const Grid g = build_grid(fixtures::rect(32, 16));
  const Field q = constant_field(g, Region::Omega, 0.37);
  const EigenResult e = principal_eigen(g, Region::Omega, q, Bc::neumann);
  CHECK(e.value == doctest::Approx(0.37).epsilon(1e-10));
}

TEST_CASE("principal eigenvalue matches the dense oracle on small grids") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (int rep = 0; rep < 3; ++rep) {
    const Grid g = build_grid(fixtures::ring(64));
    const SparseOperator lap = neumann_laplacian(g, Region::Omega);
    Field q = constant_field(g, Region::Omega, 0.0);
    for (int i = 0; i < q.values.size(); ++i) q.values[i] = unif(rng);
    const EigenResult mine = principal_eigen(lap, q);
    const double dense = oracle::dense_smallest_eigenvalue(lap, q);
    CHECK(mine.value == doctest::Approx(dense).epsilon(1e-8));
  }
  const Grid r = build_grid(fixtures::rect(32, 16));
  const SparseOperator lap_r = neumann_laplacian(r, Region::Omega);
  Field q = indicator_omega1(r);
  q.values *= 2.0;
  CHECK(principal_eigen(lap_r, q).value ==
        doctest::Approx(oracle::dense_smallest_eigenvalue(lap_r, q)).epsilon(1e-8));
}

TEST_CASE("eigenvalue curve: below b mu, increasing, Dirichlet limit") {
  const Grid g = build_grid(fixtures::ring(256));
  const double b = 1.0;
  CHECK(std::abs(sigma1_curve(g, b, 0.0)) < 1e-9);
  double prev = 0.0;
  for (double mu : {0.1, 0.5, 2.0, 10.0, 100.0}) {
    const double s = sigma1_curve(g, b, mu);
    CHECK(s > prev);
    CHECK(s < b * mu);
    prev = s;
  }
  const double sD = sigma1_dirichlet_refuge(g);
  CHECK(std::abs(sigma1_curve(g, b, 1e6) - sD) / sD < 0.02);
}

TEST_CASE("monotonicity of the principal eigenvalue in the potential") {
  const Grid g = build_grid(fixtures::ring(64));
  const SparseOperator lap = neumann_laplacian(g, Region::Omega);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    Field q1 = constant_field(g, Region::Omega, 0.0), q2 = q1;
    for (int i = 0; i < q1.values.size(); ++i) {
      q2.values[i] = unif(rng);
      q1.values[i] = q2.values[i] + 0.2 + unif(rng);
    }
    CHECK(principal_eigen(lap, q1).value > principal_eigen(lap, q2).value);
  }
}

TEST_CASE("phi_star is positive, normalized, and solves its equation") {
  const Grid g = build_grid(fixtures::ring(256));
  const double b = 1.0, mu = 2.0;
  const EigenResult phi = phi_star(g, b, mu);
  CHECK(phi.eigenfunction.values.minCoeff() > 0.0);
  Field sq = phi.eigenfunction;
  sq.values = sq.values.array().square();
  CHECK(integrate(g, sq) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(phi.residual < 1e-9);

  // eigenfunction leans into the refuge where the potential well vanishes
  const Field on0 = [&] {
    Field f = phi.eigenfunction;
    for (int i : g.omega1_nodes) f.values[i] = 0.0;
    return f;
  }();
  const Measures m = measures(g);
  const double mean0 = integrate(g, on0) / m.omega0;
  double deep1 = 0.0;
  for (int i : g.omega1_nodes)
    deep1 = std::max(deep1, phi.eigenfunction.values[i]);
  double min1 = deep1;
  for (int i : g.omega1_nodes) min1 = std::min(min1, phi.eigenfunction.values[i]);
  CHECK(mean0 > min1);
}

TEST_CASE("psi_star signs and monotonicity in alpha") {
  const Grid g = build_grid(fixtures::ring(256));
  const double b = 1.0, mu = 2.0, c = 1.0;
  const EigenResult phi = phi_star(g, b, mu);
  const Field psi0 = psi_star(g, mu, b, c, 0.0, phi);
  CHECK(psi0.values.minCoeff() > 0.0);

  const Field psi1 = psi_star(g, mu, b, c, 1.0, phi);
  const Field psi2 = psi_star(g, mu, b, c, 2.0, phi);
  CHECK(((psi1.values - psi0.values).array() < 0.0).all());
  CHECK(((psi2.values - psi1.values).array() < 0.0).all());

  // min psi -> -infinity linearly in alpha
  const double m10 = psi_star(g, mu, b, c, 10.0, phi).values.minCoeff();
  const double m20 = psi_star(g, mu, b, c, 20.0, phi).values.minCoeff();
  const double m40 = psi_star(g, mu, b, c, 40.0, phi).values.minCoeff();
  CHECK(m40 < m20);
  CHECK(m20 < m10);
  CHECK((m40 - m20) / (m20 - m10) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("phi_lower_star is negative with pinned L1 norm") {
  const Grid g = build_grid(fixtures::ring(256));
  const double b = 1.3, lambda = 0.8;
  const Field phis = phi_lower_star(g, b, lambda);
  CHECK(phis.values.maxCoeff() < 0.0);
  Field abs_phis = phis;
  abs_phis.values = phis.values.cwiseAbs();
  const Measures m = measures(g);
  CHECK(integrate(g, abs_phis) == doctest::Approx(b * m.omega1).epsilon(1e-6));
  const Field abs_on1 = restrict_to(g, abs_phis, Region::Omega1);
  CHECK(integrate(g, abs_on1) < b * m.omega1);
}

TEST_CASE("phi_lower_star vanishes with b") {
  const Grid g = build_grid(fixtures::ring(64));
  const Field phis = phi_lower_star(g, 0.0, 0.8);
  CHECK(phis.values.lpNorm<Eigen::Infinity>() < 1e-12);
}
