#pragma once

#include "refugia/steady.hpp"

namespace refugia {

struct EvolutionConfig {
  double dt = 0.05;
  double dt_min = 1e-7;
  double dt_max = 0.5;
  double t_final = 200.0;
  double steady_tol = 1e-8;       // on the sup norm of dU/dt
  double cutoff_delta = -1.0;     // ellipticity cutoff; <= 0 picks 1/(4 alpha)
  double negative_floor = -1e-12; // monitored overshoot allowance
  double blowup_ceiling = 1e8;
  int snapshot_every = 0;         // 0: first/last only
  void validate(double alpha) const;
};

/// The cutoff applied to u inside the v-diffusion coefficient: identity on
/// nonnegative arguments, clamped at -delta below, C^1-monotone in between,
/// so a = 1 + alpha chi(u) >= 1 - alpha delta > 1/2 stays elliptic.
double chi_cutoff(double s, double delta);

struct Monitor {
  double t;
  double min_u, min_v;
  double mass_u, mass_v;
  double steady_residual;  // sup norm of the steady-system residual
  double dudt_norm;
};

enum class EvolveStatus { steady_detected, time_reached, blowup, failure };

const char* evolve_status_name(EvolveStatus s);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::pair<Field, Field>> snapshots;
  std::vector<Monitor> monitors;
  Field u_final, v_final;
  double t_final = 0.0;
  EvolveStatus status = EvolveStatus::failure;
  int steps = 0;
};

/// One IMEX step: implicit diffusion for u with explicit logistic reaction,
/// then implicit divergence-form diffusion for v with the coefficient frozen
/// at 1 + alpha chi(u^n), explicit directed flux built on the fresh u, and
/// explicit reaction. v == 0 is an exact fixed set of the update.
std::pair<Field, Field> step(const Grid& grid, const ModelParams& p, const Field& u,
                             const Field& v, double dt, double cutoff_delta = -1.0);

/// Integrates to t_final or until the steady residual monitor flatlines.
/// Negative overshoot beyond the floor or solver trouble halves dt and
/// retries; positivity is never enforced by clipping.
Trajectory evolve(const Grid& grid, const ModelParams& p, const Field& u0, const Field& v0,
                  const EvolutionConfig& cfg);

/// Sup norm of the steady residual at the current state.
double steady_residual_monitor(const Grid& grid, const ModelParams& p, const Field& u,
                               const Field& v);

}  // namespace refugia
