#include "refugia/evolution.hpp"

#include <cmath>

namespace refugia {

void EvolutionConfig::validate(double alpha) const {
  if (!(dt > 0.0)) fail(Errc::validation_error, "dt must be positive");
  if (!(t_final > 0.0)) fail(Errc::validation_error, "T must be positive");
  if (cutoff_delta > 0.0 && alpha > 0.0 && cutoff_delta >= 0.5 / alpha)
    fail(Errc::validation_error, "cutoff delta must lie in (0, 1/(2 alpha))");
}

double chi_cutoff(double s, double delta) {
  if (s >= 0.0) return s;
  if (s <= -delta) return -delta;
  // monotone C^1 Hermite blend between the clamp and the identity
  const double t = (s + delta) / delta;
  return delta * (-t * t * t + 2.0 * t * t - 1.0);
}

const char* evolve_status_name(EvolveStatus s) {
  switch (s) {
    case EvolveStatus::steady_detected: return "steady_detected";
    case EvolveStatus::time_reached: return "time_reached";
    case EvolveStatus::blowup: return "blowup";
    case EvolveStatus::failure: return "failure";
  }
  return "?";
}

double steady_residual_monitor(const Grid& grid, const ModelParams& p, const Field& u,
                               const Field& v) {
  const auto r = residual_sp2(grid, p, u, v);
  return std::max(r.first.values.lpNorm<Eigen::Infinity>(),
                  r.second.values.lpNorm<Eigen::Infinity>());
}

namespace {

double pick_delta(const ModelParams& p, double requested) {
  if (requested > 0.0) return requested;
  return p.alpha > 0.0 ? 0.25 / p.alpha : 0.25;
}

// (W + dt * W(-Lap)) u = W rhs for the u-update; refactored when dt changes
struct ImplicitDiffusion {
  SparseOperator lap;
  double dt = -1.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac;

  explicit ImplicitDiffusion(SparseOperator op) : lap(std::move(op)) {}

  void refactor(double new_dt) {
    if (new_dt == dt) return;
    Eigen::SparseMatrix<double> m = lap.weighted_matrix() * new_dt;
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < lap.size(); ++i) t.emplace_back(i, i, lap.weights()[i]);
    Eigen::SparseMatrix<double> wdiag(lap.size(), lap.size());
    wdiag.setFromTriplets(t.begin(), t.end());
    m += wdiag;
    fac.compute(m);
    if (fac.info() != Eigen::Success) fail(Errc::solve_failure, "u-step factorization failed");
    dt = new_dt;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = fac.solve(lap.weights().cwiseProduct(rhs));
    if (!x.allFinite()) fail(Errc::solve_failure, "u-step solve returned non-finite values");
    return x;
  }
};

std::pair<Field, Field> step_impl(const Grid& grid, const ModelParams& p, const Field& u,
                                  const Field& v, double dt, double delta,
                                  ImplicitDiffusion& udiff) {
  // u-update: implicit diffusion, explicit logistic reaction with v extended
  // by zero into the refuge
  const Field vext = extend_by_zero(grid, v);
  Eigen::VectorXd urhs = u.values;
  for (int i = 0; i < grid.num_nodes(); ++i)
    urhs[i] += dt * u.values[i] * (p.lambda - u.values[i] - p.b * vext.values[i]);
  udiff.refactor(dt);
  Field u_new;
  u_new.region = Region::Omega;
  u_new.values = udiff.solve(urhs);

  // v-update after u, with the directed flux expanded through the product
  // rule: the spatial part is (1 + alpha u) Lap v - alpha v Lap u, where
  // Lap u is the free Laplacian on Omega (prey cross the interface). The
  // stiff divergence-form diffusion with the cutoff coefficient goes
  // implicit; the explicit remainder subtracts the same frozen-coefficient
  // operator, so the two cancel identically at steadiness and joint fixed
  // points of the stepper solve the substituted steady system exactly.
  Field a = constant_field(grid, Region::Omega1, 1.0);
  if (p.alpha > 0.0) {
    for (size_t k = 0; k < grid.omega1_nodes.size(); ++k)
      a.values[k] = 1.0 + p.alpha * chi_cutoff(u.values[grid.omega1_nodes[k]], delta);
  }
  const SparseOperator vdiff = divergence_form(grid, a);
  const Field lap_v = neumann_laplacian(grid, Region::Omega1).apply(v);
  const Field frozen = vdiff.apply(v);
  Eigen::VectorXd vrhs = v.values;
  if (p.alpha > 0.0) {
    const Field lap_u = restrict_to(grid, udiff.lap.apply(u_new), Region::Omega1);
    for (size_t k = 0; k < grid.omega1_nodes.size(); ++k) {
      const double uk = u_new.values[grid.omega1_nodes[k]];
      vrhs[k] += dt * ((1.0 + p.alpha * uk) * lap_v.values[k] -
                       p.alpha * v.values[k] * lap_u.values[k] - frozen.values[k]);
    }
  } else {
    vrhs += dt * (lap_v.values - frozen.values);
  }
  for (size_t k = 0; k < grid.omega1_nodes.size(); ++k) {
    const double uk = u_new.values[grid.omega1_nodes[k]];
    vrhs[k] += dt * v.values[k] * (p.mu + p.c * uk - v.values[k]);
  }
  Eigen::SparseMatrix<double> m = vdiff.weighted_matrix() * dt;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < vdiff.size(); ++i) t.emplace_back(i, i, vdiff.weights()[i]);
  Eigen::SparseMatrix<double> wdiag(vdiff.size(), vdiff.size());
  wdiag.setFromTriplets(t.begin(), t.end());
  m += wdiag;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac(m);
  if (fac.info() != Eigen::Success) fail(Errc::solve_failure, "v-step factorization failed");
  Field v_new;
  v_new.region = Region::Omega1;
  v_new.values = fac.solve(vdiff.weights().cwiseProduct(vrhs));
  if (!u_new.values.allFinite() || !v_new.values.allFinite())
    fail(Errc::nonfinite_state, "time step produced non-finite values");
  return {std::move(u_new), std::move(v_new)};
}

}  // namespace

std::pair<Field, Field> step(const Grid& grid, const ModelParams& p, const Field& u,
                             const Field& v, double dt, double cutoff_delta) {
  if (!(dt > 0.0)) fail(Errc::bad_parameter, "dt must be positive");
  check_field(grid, u, Region::Omega);
  check_field(grid, v, Region::Omega1);
  if (!u.values.allFinite() || !v.values.allFinite())
    fail(Errc::nonfinite_state, "state has non-finite entries");
  ImplicitDiffusion udiff(neumann_laplacian(grid, Region::Omega));
  return step_impl(grid, p, u, v, dt, pick_delta(p, cutoff_delta), udiff);
}

Trajectory evolve(const Grid& grid, const ModelParams& p, const Field& u0, const Field& v0,
                  const EvolutionConfig& cfg) {
  p.validate();
  cfg.validate(p.alpha);
  check_field(grid, u0, Region::Omega);
  check_field(grid, v0, Region::Omega1);
  if (u0.values.minCoeff() < 0.0)
    fail(Errc::validation_error, "initial prey density must be nonnegative");
  if (v0.values.minCoeff() < 0.0)
    fail(Errc::validation_error, "initial predator density must be nonnegative");
  const double delta = pick_delta(p, cfg.cutoff_delta);

  Trajectory traj;
  Field u = u0, v = v0;
  double t = 0.0, dt = cfg.dt;
  ImplicitDiffusion udiff(neumann_laplacian(grid, Region::Omega));

  auto record = [&](double now) {
    Monitor m;
    m.t = now;
    m.min_u = u.values.minCoeff();
    m.min_v = v.values.minCoeff();
    m.mass_u = integrate(grid, u);
    m.mass_v = integrate(grid, v);
    m.steady_residual = steady_residual_monitor(grid, p, u, v);
    m.dudt_norm = std::numeric_limits<double>::quiet_NaN();
    traj.monitors.push_back(m);
  };
  auto snapshot = [&](double now) {
    traj.times.push_back(now);
    traj.snapshots.emplace_back(u, v);
  };

  record(0.0);
  snapshot(0.0);
  int streak = 0;
  traj.status = EvolveStatus::time_reached;
  while (t < cfg.t_final - 1e-14) {
    const double dt_eff = std::min(dt, cfg.t_final - t);
    std::pair<Field, Field> next;
    bool ok = true;
    try {
      next = step_impl(grid, p, u, v, dt_eff, delta, udiff);
    } catch (const Error&) {
      ok = false;
    }
    if (ok) {
      // biologically relevant states stay nonnegative; a clear overshoot
      // means the step was too long, so retry instead of clipping
      const double mn = std::min(next.first.values.minCoeff(), next.second.values.minCoeff());
      if (mn < cfg.negative_floor) ok = false;
      if (ok && std::max(next.first.values.lpNorm<Eigen::Infinity>(),
                         next.second.values.lpNorm<Eigen::Infinity>()) > cfg.blowup_ceiling) {
        traj.status = EvolveStatus::blowup;
        break;
      }
    }
    if (!ok) {
      dt *= 0.5;
      streak = 0;
      if (dt < cfg.dt_min) {
        traj.status = EvolveStatus::failure;
        break;
      }
      continue;
    }

    const double dudt =
        std::max((next.first.values - u.values).lpNorm<Eigen::Infinity>(),
                 (next.second.values - v.values).lpNorm<Eigen::Infinity>()) /
        dt_eff;
    u = std::move(next.first);
    v = std::move(next.second);
    t += dt_eff;
    ++traj.steps;
    record(t);
    traj.monitors.back().dudt_norm = dudt;
    if (cfg.snapshot_every > 0 && traj.steps % cfg.snapshot_every == 0) snapshot(t);

    if (dudt < cfg.steady_tol) {
      traj.status = EvolveStatus::steady_detected;
      break;
    }
    if (++streak >= 8) {
      dt = std::min(dt * 1.2, cfg.dt_max);
      streak = 0;
    }
  }
  snapshot(t);
  traj.u_final = std::move(u);
  traj.v_final = std::move(v);
  traj.t_final = t;
  return traj;
}

}  // namespace refugia
