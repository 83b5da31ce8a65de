#pragma once

#include "refugia/spectra.hpp"

namespace refugia {

enum class Classification {
  nonexistence_by_prop43,
  nonexistence_by_prop44,
  existence_guaranteed,
  indeterminate,
};

const char* classification_name(Classification c);

struct RegionVerdict {
  Classification classification = Classification::indeterminate;
  double ell_tilde = std::numeric_limits<double>::quiet_NaN();  // mu > 0 only
  double m_value = std::numeric_limits<double>::quiet_NaN();    // mu < 0 side
  double sigma1 = std::numeric_limits<double>::quiet_NaN();     // mu >= 0 only
};

/// K(lambda, mu, alpha) = lambda - sigma1( b(c lambda + mu)/(alpha b lambda + 1) 1_{Omega1} ).
double K_eval(const Grid& grid, double lambda, double mu, double alpha, double b, double c);

/// Unique positive root of K for alpha > 0 and mu > c/(alpha b); bracketed
/// bisection to 1e-8, provably safe since K is increasing in that regime.
double ell(const Grid& grid, double mu, double alpha, double b, double c);

/// Nonexistence boundary for mu > 0: sigma1(b mu 1) left of mu = c/(alpha b),
/// ell beyond it; continuous at the junction. alpha = 0 falls back to the
/// sigma1 branch (its natural limit).
double ell_tilde(const Grid& grid, double mu, double alpha, double b, double c);

/// Nonexistence boundary for mu < 0: -c lambda up to lambda = c/alpha, then
/// the parabola -(alpha/4)(lambda + c/alpha)^2; C^1 at the junction.
double m_curve(double lambda, double alpha, double c);

/// Bifurcation direction off the predator-only branch:
/// lambda'(0) = integral over Omega of (phi* + b 1_{Omega1} psi*) (phi*)^2.
double lambda_prime0_gamma_v(const Grid& grid, double mu, double b, double c, double alpha);

/// Threshold alpha* where the Gamma_v bifurcation flips from supercritical to
/// subcritical; bracketed bisection on lambda'(0) to 1e-8.
double alpha_star(const Grid& grid, double mu, double b, double c);

/// Bifurcation direction off the prey-only branch at lambda = |mu|/c, mu < 0;
/// strictly positive for every alpha >= 0.
double lambda_prime0_gamma_u(const Grid& grid, double mu, double b, double c, double alpha);

/// Classifies a parameter point against the nonexistence boundaries and the
/// guaranteed-existence region. The strip between ell-tilde and the sigma1 curve is
/// reported indeterminate: only continuation can say more there.
RegionVerdict classify(const Grid& grid, double lambda, double mu, double alpha, double b,
                       double c);

}  // namespace refugia
