#include "refugia/thresholds.hpp"

#include <cmath>

namespace refugia {

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::nonexistence_by_prop43: return "nonexistence_by_prop43";
    case Classification::nonexistence_by_prop44: return "nonexistence_by_prop44";
    case Classification::existence_guaranteed: return "existence_guaranteed";
    case Classification::indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

// sigma1(xi 1_{Omega1}) with a reusable Laplacian
double sigma1_of(const SparseOperator& lap, const Field& ind, double xi) {
  Field q = ind;
  q.values *= xi;
  return principal_eigen(lap, q).value;
}

double K_of(const SparseOperator& lap, const Field& ind, double lambda, double mu,
            double alpha, double b, double c) {
  const double xi = b * (c * lambda + mu) / (alpha * b * lambda + 1.0);
  return lambda - sigma1_of(lap, ind, xi);
}

}  // namespace

double K_eval(const Grid& grid, double lambda, double mu, double alpha, double b, double c) {
  if (lambda < 0.0) fail(Errc::bad_parameter, "K is defined for lambda >= 0");
  SparseOperator lap = neumann_laplacian(grid, Region::Omega);
  return K_of(lap, indicator_omega1(grid), lambda, mu, alpha, b, c);
}

double ell(const Grid& grid, double mu, double alpha, double b, double c) {
  if (alpha <= 0.0) fail(Errc::out_of_regime, "ell needs alpha > 0");
  if (mu * alpha * b <= c) fail(Errc::out_of_regime, "ell needs mu > c/(alpha b)");
  SparseOperator lap = neumann_laplacian(grid, Region::Omega);
  const Field ind = indicator_omega1(grid);
  auto K = [&](double l) { return K_of(lap, ind, l, mu, alpha, b, c); };

  double lo = 0.0;  // K(0) = -sigma1(b mu 1) < 0
  double hi = 1.0;
  while (K(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e12) fail(Errc::no_sign_change, "no upper bracket for ell");
  }
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (K(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ell_tilde(const Grid& grid, double mu, double alpha, double b, double c) {
  if (mu <= 0.0) fail(Errc::bad_parameter, "ell_tilde needs mu > 0");
  if (alpha < 0.0) fail(Errc::bad_parameter, "ell_tilde needs alpha >= 0");
  if (mu * alpha * b <= c) return sigma1_curve(grid, b, mu);
  return ell(grid, mu, alpha, b, c);
}

double m_curve(double lambda, double alpha, double c) {
  if (lambda <= 0.0) fail(Errc::bad_parameter, "m is defined for lambda > 0");
  if (alpha < 0.0) fail(Errc::bad_parameter, "m needs alpha >= 0");
  if (alpha == 0.0 || lambda * alpha <= c) return -c * lambda;
  const double r = lambda + c / alpha;
  return -(alpha / 4.0) * r * r;
}

namespace {

// Shared pieces for the Gamma_v direction scan: phi* and the factorized
// Omega1 resolvent do not depend on alpha, only psi* does.
struct DirectionWorkspace {
  EigenResult phi;
  SparseOperator lap1;
  Field phi_sq;  // (phi*)^2 on Omega as plain values
  const Grid& grid;

  DirectionWorkspace(const Grid& g, double mu, double b)
      : phi(phi_star(g, b, mu)), lap1(neumann_laplacian(g, Region::Omega1)), grid(g) {
    phi_sq = phi.eigenfunction;
    phi_sq.values = phi.eigenfunction.values.array().square();
  }

  double lambda_prime0(double mu, double b, double c, double alpha) const {
    const Field psi = psi_star(grid, mu, b, c, alpha, phi, &lap1);
    Field integrand = phi.eigenfunction;
    integrand.values = phi.eigenfunction.values.cwiseProduct(phi_sq.values);
    const Field bpsi = extend_by_zero(grid, psi);
    integrand.values += b * bpsi.values.cwiseProduct(phi_sq.values);
    return integrate(grid, integrand);
  }
};

}  // namespace

double lambda_prime0_gamma_v(const Grid& grid, double mu, double b, double c, double alpha) {
  if (mu <= 0.0) fail(Errc::bad_parameter, "gamma_v direction needs mu > 0");
  DirectionWorkspace ws(grid, mu, b);
  return ws.lambda_prime0(mu, b, c, alpha);
}

double alpha_star(const Grid& grid, double mu, double b, double c) {
  if (mu <= 0.0) fail(Errc::bad_parameter, "alpha_star needs mu > 0");
  DirectionWorkspace ws(grid, mu, b);
  const double at_zero = ws.lambda_prime0(mu, b, c, 0.0);
  if (at_zero <= 0.0)
    fail(Errc::no_sign_change, "lambda'(0) must be positive at alpha = 0");
  double lo = 0.0, hi = 1.0;
  while (ws.lambda_prime0(mu, b, c, hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) fail(Errc::no_sign_change, "lambda'(0) never turns negative");
  }
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (ws.lambda_prime0(mu, b, c, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double lambda_prime0_gamma_u(const Grid& grid, double mu, double b, double c, double alpha) {
  if (mu >= 0.0) fail(Errc::bad_parameter, "gamma_u direction needs mu < 0");
  if (alpha < 0.0) fail(Errc::bad_parameter, "alpha must be nonnegative");
  const double lambda0 = -mu / c;
  const Field phis = phi_lower_star(grid, b, lambda0);
  const Field abs_phis = restrict_to(
      grid, Field{Region::Omega, phis.values.cwiseAbs()}, Region::Omega1);
  const double n1 = integrate(grid, abs_phis);  // L1 norm over Omega1
  const double om1 = measures(grid).omega1;
  return (c * c * n1 + c * om1 + alpha * (-mu) * (b * om1 - n1)) / (c * c * om1);
}

RegionVerdict classify(const Grid& grid, double lambda, double mu, double alpha, double b,
                       double c) {
  if (lambda <= 0.0) fail(Errc::bad_parameter, "classify needs lambda > 0");
  RegionVerdict v;
  v.m_value = m_curve(lambda, alpha, c);
  if (mu < 0.0) {
    if (mu <= v.m_value)
      v.classification = Classification::nonexistence_by_prop44;
    else if (lambda > -mu / c)
      v.classification = Classification::existence_guaranteed;
    else
      v.classification = Classification::indeterminate;
    return v;
  }
  v.sigma1 = sigma1_curve(grid, b, mu);
  v.ell_tilde = mu > 0.0 ? ell_tilde(grid, mu, alpha, b, c) : 0.0;
  if (mu > 0.0 && lambda <= v.ell_tilde)
    v.classification = Classification::nonexistence_by_prop43;
  else if (lambda > v.sigma1)
    v.classification = Classification::existence_guaranteed;
  else
    v.classification = Classification::indeterminate;
  return v;
}

}  // namespace refugia
