#pragma once

#include "refugia/continuation.hpp"

namespace refugia {

enum class AlphaLimitCase { prey_only, rescaled, unresolved };

const char* alpha_limit_case_name(AlphaLimitCase c);

struct AlphaSweepRow {
  double alpha;
  bool solved = false;
  double err_prey_only = 0.0;   // |u - lambda|_inf + |v|_inf
  double err_u = 0.0;           // |u - lambda|_inf
  double err_v = 0.0;           // |v|_inf
  double err_rescaled = 0.0;    // |alpha u - w_lp2|_inf, when a reference exists
  AlphaLimitCase limit_case = AlphaLimitCase::unresolved;
  SteadyState state;
};

struct AlphaSweepResult {
  std::vector<AlphaSweepRow> rows;
  bool has_lp2_reference = false;
  SteadyState lp2_reference;  // solution of the limit system at the same (lambda, mu, b)
};

/// Warm-started chain of steady solves along increasing alpha. The first
/// solution comes from multistart; each later alpha reuses the previous state,
/// inserting geometric intermediates when Newton loses the family.
AlphaSweepResult alpha_sweep(const Grid& grid, double lambda, double mu, double b, double c,
                             const std::vector<double>& alphas, std::uint64_t seed = 1,
                             const NewtonConfig& newton = {});

struct ScalingRow {
  double lambda;
  double lambda_wmax;      // lambda * |w|_inf, approaches mu |Omega1| / |Omega0|
  double mean_v_over_lambda;  // approaches |Omega| / (b |Omega1|)
  double meanzero_norm;    // sup norm of the mean-zero part of lambda w - s
  double s, t;             // extracted reduction scalars
  Field phi, psi;          // extracted mean-zero profiles
  double vmin_over_lambda, vmax_over_lambda;
  double harnack_ratio;    // max v / min v on Omega1
  SteadyState state;
};

/// Solutions of the limit system along a decreasing lambda list, warm-started
/// from a traced branch, with the blow-up scaling diagnostics per point.
std::vector<ScalingRow> lp2_scaling_probe(const Grid& grid, double mu, double b,
                                          const std::vector<double>& lambdas,
                                          const NewtonConfig& newton = {});

struct LyapunovSchmidt {
  double s, t;
  Field phi, psi;
};

/// Mean / mean-zero split of the scaled unknowns: s = mean(lambda w) on Omega,
/// t = mean(v / lambda) on Omega1, phi = (lambda w - s)/lambda,
/// psi = (v/lambda - t)/lambda. Reconstruction is exact by construction.
LyapunovSchmidt extract_lyapunov_schmidt(const Grid& grid, const Field& w, const Field& v,
                                         double lambda);

/// Reduced 2x2 Jacobian at the reduction base point, built from measures:
/// [[0, -s0 b |Omega1|], [-(t0/s0)|Omega0|, -b t0 |Omega1|]]; its determinant
/// -b t0 |Omega0| |Omega1| is negative for every valid geometry.
struct BasePointJacobian {
  double s0, t0;
  Eigen::Matrix2d J;
  double det;
};
BasePointJacobian jacobian_base_point(const Grid& grid, double b, double mu);

/// Mean-zero reference profile of the reduction:
/// mu (-Lap)^{-1}_{zero mean} ((|Omega1|/|Omega0|) 1_{Omega0} - 1_{Omega1}).
Field phi0_reference(const Grid& grid, double mu);

}  // namespace refugia
