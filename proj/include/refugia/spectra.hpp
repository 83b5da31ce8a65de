#pragma once

#include "refugia/operators.hpp"

namespace refugia {

struct EigenResult {
  double value = 0.0;
  Field eigenfunction;  // strictly positive, L2-normalized against cell weights
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest eigenvalue and positive eigenfunction of -Laplacian + q on the
/// given region. Shifted inverse power iteration with Rayleigh-quotient
/// acceleration, seeded by the constant field; the principal pair of these
/// operators is simple, so no deflation is needed.
EigenResult principal_eigen(const Grid& grid, Region region, const Field& q, Bc bc);

/// Overload reusing a preassembled Laplacian (bisection loops call this).
EigenResult principal_eigen(const SparseOperator& lap, const Field& q);

/// sigma_1(b mu 1_{Omega1}) on Omega with the Neumann condition. Strictly
/// increasing in mu, zero at mu = 0, bounded by the refuge Dirichlet
/// eigenvalue as mu grows.
double sigma1_curve(const Grid& grid, double b, double mu);

/// Smallest Dirichlet eigenvalue of -Laplacian on the refuge.
double sigma1_dirichlet_refuge(const Grid& grid);

/// Positive L2-normalized eigenfunction of -Laplacian + b mu 1_{Omega1} on
/// Omega (the predator-branch bifurcation tangent's u-component).
EigenResult phi_star(const Grid& grid, double b, double mu);

/// v-component of the predator-branch tangent:
/// psi = (-Laplacian + mu)^{-1} on Omega1 of mu [alpha (sigma1 - b mu) + c] phi.
Field psi_star(const Grid& grid, double mu, double b, double c, double alpha,
               const EigenResult& phi, const SparseOperator* lap_omega1 = nullptr);

/// u-component of the prey-branch tangent:
/// (-Laplacian + lambda)^{-1} on Omega of -b lambda 1_{Omega1}; strictly
/// negative, with L1 norm b |Omega1|.
Field phi_lower_star(const Grid& grid, double b, double lambda);

}  // namespace refugia
