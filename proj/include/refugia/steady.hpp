#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "refugia/operators.hpp"

namespace refugia {

struct ModelParams {
  double lambda = 1.0;  // prey growth rate (positive for all existence claims)
  double mu = 0.0;      // predator growth rate, may be negative
  double b = 1.0;       // predation loss, positive
  double c = 1.0;       // predation gain, positive
  double alpha = 0.0;   // directed-flux strength, nonnegative
  void validate() const;
};

struct NewtonConfig {
  double tol = 1e-10;      // sup-norm residual target
  int max_iter = 50;
  int max_backtracks = 30;
};

// Entries smaller than this are not treated as strictly positive: Newton
// limits of semitrivial states carry round-off noise of about solver
// tolerance, far below any genuine coexistence amplitude at desk scale.
inline constexpr double kPositivityFloor = 1e-7;

// The residual is quadratically flat across the semitrivial manifolds, so a
// converged state can sit at distance sqrt(tol) from them without being a
// coexistence state. A component counts as present only above this amplitude.
inline constexpr double kSemitrivialFloor = 1e-4;

inline bool component_strictly_positive(const Eigen::VectorXd& vals) {
  return vals.minCoeff() > kPositivityFloor &&
         vals.lpNorm<Eigen::Infinity>() > kSemitrivialFloor;
}

struct SteadyState {
  Field u;  // prey on Omega (w-component for the limit system)
  Field v;  // predator on Omega1
  ModelParams params;
  double residual_norm = 0.0;
  bool u_positive = false;
  bool v_positive = false;
  double identity_u = 0.0;  // integral of the u-equation reaction terms
  double identity_v = 0.0;
  int iterations = 0;
  bool converged = false;
  bool positive() const { return u_positive && v_positive; }
};

enum class SteadyKind { sp2, lp2 };

/// Residual of the substituted steady system: the u-equation couples to v
/// extended by zero into the refuge; the v-equation carries the directed-flux
/// factor 1/(1 + alpha u). Throws DegenerateDenominator when 1 + alpha u loses
/// positivity on Omega1.
std::pair<Field, Field> residual_sp2(const Grid& grid, const ModelParams& p, const Field& u,
                                     const Field& v);

/// Analytic block Jacobian of residual_sp2 at (u, v), ordered [u; v].
Eigen::SparseMatrix<double> jacobian_sp2(const Grid& grid, const ModelParams& p,
                                         const Field& u, const Field& v);

/// Cross-check diagnostic: the unsubstituted steady residual, whose
/// v-equation keeps the directed flux as u Lap v - v Lap u. At a converged
/// state of the substituted system it vanishes along with it (the two differ
/// by alpha v times the u-equation residual).
std::pair<Field, Field> residual_sp_raw(const Grid& grid, const ModelParams& p,
                                        const Field& u, const Field& v);

/// Residual of the alpha -> infinity limit system for (w, v); needs 1 + w > 0.
std::pair<Field, Field> residual_lp2(const Grid& grid, const ModelParams& p, const Field& w,
                                     const Field& v);

Eigen::SparseMatrix<double> jacobian_lp2(const Grid& grid, const ModelParams& p,
                                         const Field& w, const Field& v);

/// Partial derivative of the residual with respect to lambda (continuation).
std::pair<Field, Field> dresidual_dlambda(const Grid& grid, const ModelParams& p,
                                          const Field& u, const Field& v, SteadyKind kind);

/// Damped Newton on the chosen system. Backtracking halves the step on the
/// l2 residual; positivity is recorded, never enforced.
SteadyState newton_solve(const Grid& grid, const ModelParams& p, const Field& u0,
                         const Field& v0, const NewtonConfig& cfg = {},
                         SteadyKind kind = SteadyKind::sp2);

/// Non-throwing variant for multistart sweeps.
std::optional<SteadyState> try_newton_solve(const Grid& grid, const ModelParams& p,
                                            const Field& u0, const Field& v0,
                                            const NewtonConfig& cfg = {},
                                            SteadyKind kind = SteadyKind::sp2);

enum class Semitrivial { prey_only, predator_only };

/// Gamma_u (lambda, 0) or Gamma_v (0, mu); exact discrete steady states.
SteadyState semitrivial(const Grid& grid, Semitrivial which, const ModelParams& p);

/// Integrated steady equations; vanish at any converged state because the
/// flux-form Laplacian telescopes.
std::pair<double, double> integral_identities(const Grid& grid, const ModelParams& p,
                                              const SteadyState& state);

/// Upper bounds confining every positive steady state, uniformly in alpha.
struct AprioriBox {
  double u_max;  // lambda
  double v_max;  // max(lambda/b, mu + c lambda)
};
AprioriBox apriori_box(const ModelParams& p);

/// Latin-hypercube constants plus nodewise noise inside the a priori box;
/// deterministic in (seed, index).
std::pair<Field, Field> multistart_initial(const Grid& grid, const ModelParams& p,
                                           std::uint64_t seed, int index, int total);

/// Runs n_starts independent damped Newton solves and returns the converged
/// states (all of them; callers deduplicate).
std::vector<SteadyState> multistart_newton(const Grid& grid, const ModelParams& p,
                                           int n_starts, std::uint64_t seed,
                                           const NewtonConfig& cfg = {},
                                           SteadyKind kind = SteadyKind::sp2);

/// Distinct states under the sup-norm metric on (u, v).
std::vector<SteadyState> distinct_states(const std::vector<SteadyState>& states,
                                         double tol = 1e-3);

double state_distance_inf(const SteadyState& a, const SteadyState& b);

}  // namespace refugia
