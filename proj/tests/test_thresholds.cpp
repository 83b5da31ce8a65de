#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "refugia/thresholds.hpp"

using namespace refugia;

TEST_CASE("K at lambda 0 is minus the eigenvalue curve and grows unbounded") {
  const Grid g = build_grid(fixtures::ring(128));
  const double mu = 2.0, b = 1.0, c = 1.0, alpha = 1.0;
  const double k0 = K_eval(g, 0.0, mu, alpha, b, c);
  CHECK(k0 == doctest::Approx(-sigma1_curve(g, b, mu)).epsilon(1e-9));
  CHECK(k0 < 0.0);
  CHECK(K_eval(g, 50.0, mu, alpha, b, c) > 0.0);

  // monotone in lambda beyond the regime threshold mu > c/(alpha b)
  double prev = k0;
  for (double l : {0.1, 0.3, 0.6, 1.0, 2.0, 4.0}) {
    const double k = K_eval(g, l, mu, alpha, b, c);
    CHECK(k > prev);
    prev = k;
  }
}

TEST_CASE("ell is the bracketed root of K and respects its limits") {
  const Grid g = build_grid(fixtures::ring(128));
  const double b = 1.0, c = 1.0, alpha = 2.0;

  SUBCASE("root property and Dirichlet ceiling") {
    const double mu = 3.0;
    const double l = ell(g, mu, alpha, b, c);
    CHECK(std::abs(K_eval(g, l, mu, alpha, b, c)) < 1e-6);
    CHECK(l > 0.0);
    CHECK(l < sigma1_dirichlet_refuge(g));
  }
  SUBCASE("out of regime is rejected") {
    CHECK_THROWS_AS(ell(g, 0.4, alpha, b, c), Error);  // mu <= c/(alpha b) = 0.5
    try {
      ell(g, 0.4, alpha, b, c);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::out_of_regime);
    }
  }
  SUBCASE("monotone increasing in mu") {
    double prev = 0.0;
    for (double mu : {0.6, 1.0, 2.0, 5.0}) {
      const double l = ell(g, mu, alpha, b, c);
      CHECK(l > prev);
      prev = l;
    }
  }
  SUBCASE("junction limit as mu approaches c/(alpha b)") {
    // ell -> sigma1((c/alpha) 1_{Omega1})
    Field q = indicator_omega1(g);
    q.values *= c / alpha;
    const double target = principal_eigen(g, Region::Omega, q, Bc::neumann).value;
    const double l = ell(g, 0.5 + 1e-6, alpha, b, c);
    CHECK(l == doctest::Approx(target).epsilon(1e-3));
  }
  SUBCASE("decreasing toward zero in alpha") {
    // the root balances alpha * ell^2 against mu, so the decay is O(1/sqrt(alpha))
    const double mu = 3.0;
    double prev = 1e9;
    for (double a : {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0}) {
      const double l = ell(g, mu, a, b, c);
      CHECK(l < prev);
      prev = l;
    }
    CHECK(prev < 0.05);
  }
}

TEST_CASE("ell_tilde is continuous at the junction and capped by the Dirichlet value") {
  const Grid g = build_grid(fixtures::ring(128));
  const double b = 1.0, c = 1.0, alpha = 2.0;
  const double mu_j = c / (alpha * b);
  const double left = ell_tilde(g, mu_j, alpha, b, c);
  const double right = ell_tilde(g, mu_j + 1e-6, alpha, b, c);
  CHECK(left == doctest::Approx(sigma1_curve(g, b, mu_j)).epsilon(1e-10));
  CHECK(left == doctest::Approx(right).epsilon(1e-3));

  const double sD = sigma1_dirichlet_refuge(g);
  double prev = 0.0;
  for (double mu : {0.2, 0.5, 1.0, 4.0, 16.0}) {
    const double lt = ell_tilde(g, mu, alpha, b, c);
    CHECK(lt <= sD + 1e-9);
    CHECK(lt >= prev - 1e-12);
    prev = lt;
  }
  // small mu branch equals the eigenvalue curve
  CHECK(ell_tilde(g, 0.3, alpha, b, c) ==
        doctest::Approx(sigma1_curve(g, b, 0.3)).epsilon(1e-10));
  // the nonexistence strip sits left of the bifurcation curve
  for (double mu : {1.0, 2.0, 5.0})
    CHECK(ell_tilde(g, mu, alpha, b, c) <= sigma1_curve(g, b, mu) + 1e-9);
}

TEST_CASE("m curve branches, junction, and monotonicity") {
  const double c = 1.0;
  CHECK(m_curve(0.3, 2.0, c) == doctest::Approx(-0.3));
  CHECK(m_curve(1.0, 2.0, c) == doctest::Approx(-1.125));
  const double at_junction = m_curve(0.5, 2.0, c);
  CHECK(at_junction == doctest::Approx(-c * c / 2.0));
  CHECK(at_junction == doctest::Approx(-(2.0 / 4.0) * std::pow(0.5 + 0.5, 2)));
  // C1 at the junction: slopes from both sides agree
  const double eps = 1e-7;
  const double slope_left = (m_curve(0.5, 2.0, c) - m_curve(0.5 - eps, 2.0, c)) / eps;
  const double slope_right = (m_curve(0.5 + eps, 2.0, c) - m_curve(0.5, 2.0, c)) / eps;
  CHECK(slope_left == doctest::Approx(slope_right).epsilon(1e-5));

  double prev = 0.0;
  for (double l : {0.1, 0.4, 1.0, 3.0}) {
    const double m = m_curve(l, 2.0, c);
    CHECK(m < prev);
    CHECK(m <= 0.0);
    prev = m;
  }
}

TEST_CASE("gamma_v direction scalar decreases in alpha and flips at alpha_star") {
  const Grid g = build_grid(fixtures::ring(256));
  const double mu = 2.0, b = 1.0, c = 1.0;
  const double d0 = lambda_prime0_gamma_v(g, mu, b, c, 0.0);
  CHECK(d0 > 0.0);
  double prev = d0;
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    const double d = lambda_prime0_gamma_v(g, mu, b, c, a);
    CHECK(d < prev);
    prev = d;
  }
  const double astar = alpha_star(g, mu, b, c);
  CHECK(lambda_prime0_gamma_v(g, mu, b, c, astar / 2.0) > 0.0);
  CHECK(lambda_prime0_gamma_v(g, mu, b, c, 2.0 * astar) < 0.0);
  CHECK(std::abs(lambda_prime0_gamma_v(g, mu, b, c, astar)) < 1e-6);

  // the direction scalar is linear in alpha, so alpha_star is its root
  const double d1 = lambda_prime0_gamma_v(g, mu, b, c, 1.0);
  const double astar_closed_form = d0 / (d0 - d1);
  CHECK(astar == doctest::Approx(astar_closed_form).epsilon(1e-6));
}

TEST_CASE("gamma_u direction scalar is positive for all alpha") {
  const Grid g = build_grid(fixtures::ring(256));
  const double mu = -0.5, b = 1.0, c = 1.0;
  for (double a : {0.0, 1.0, 10.0, 100.0})
    CHECK(lambda_prime0_gamma_u(g, mu, b, c, a) > 0.0);
  // with b = 0 the tangent profile vanishes and the formula collapses to 1/c
  CHECK(lambda_prime0_gamma_u(g, mu, 0.0, c, 0.0) == doctest::Approx(1.0 / c));
  // alpha coefficient stays positive because |phi_lower|_{L1(Omega1)} < b|Omega1|
  const double v0 = lambda_prime0_gamma_u(g, mu, b, c, 0.0);
  const double v1 = lambda_prime0_gamma_u(g, mu, b, c, 1.0);
  CHECK(v1 > v0);
}

TEST_CASE("classify matches the curves") {
  const Grid g = build_grid(fixtures::ring(128));
  const double b = 1.0, c = 1.0;
  SUBCASE("nonexistence left of ell_tilde for mu > 0") {
    const double mu = 3.0, alpha = 2.0;
    const double lt = ell_tilde(g, mu, alpha, b, c);
    const RegionVerdict v = classify(g, 0.9 * lt, mu, alpha, b, c);
    CHECK(v.classification == Classification::nonexistence_by_prop43);
  }
  SUBCASE("nonexistence below m for mu < 0") {
    const double alpha = 2.0, lambda = 1.0;
    const double m = m_curve(lambda, alpha, c);
    const RegionVerdict v = classify(g, lambda, m - 0.1, alpha, b, c);
    CHECK(v.classification == Classification::nonexistence_by_prop44);
  }
  SUBCASE("existence right of the bifurcation curve") {
    const double mu = 2.0, alpha = 1.0;
    const double s1 = sigma1_curve(g, b, mu);
    const RegionVerdict v = classify(g, s1 + 0.5, mu, alpha, b, c);
    CHECK(v.classification == Classification::existence_guaranteed);
  }
  SUBCASE("the strip between the curves stays indeterminate") {
    const double mu = 3.0, alpha = 2.0;
    const double lt = ell_tilde(g, mu, alpha, b, c);
    const double s1 = sigma1_curve(g, b, mu);
    REQUIRE(lt < s1);
    const RegionVerdict v = classify(g, 0.5 * (lt + s1), mu, alpha, b, c);
    CHECK(v.classification == Classification::indeterminate);
  }
  SUBCASE("mu < 0 existence beyond |mu|/c") {
    const RegionVerdict v = classify(g, 0.8, -0.5, 1.0, b, c);
    CHECK(v.classification == Classification::existence_guaranteed);
  }
}
