#include "refugia/asymptotics.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

#include "refugia/spectra.hpp"

namespace refugia {

const char* alpha_limit_case_name(AlphaLimitCase c) {
  switch (c) {
    case AlphaLimitCase::prey_only: return "prey_only";
    case AlphaLimitCase::rescaled: return "rescaled";
    case AlphaLimitCase::unresolved: return "unresolved";
  }
  return "?";
}

namespace {

// Newton continuation in alpha: try the target directly, bisect the gap in
// log-alpha when the previous state leaves the basin.
std::optional<SteadyState> alpha_step(const Grid& grid, ModelParams p, double alpha_from,
                                      double alpha_to, const SteadyState& from,
                                      const NewtonConfig& newton, int depth = 0) {
  p.alpha = alpha_to;
  if (auto direct = try_newton_solve(grid, p, from.u, from.v, newton)) return direct;
  if (depth >= 12) return std::nullopt;
  const double mid = alpha_from > 0.0 ? std::sqrt(alpha_from * alpha_to)
                                      : 0.5 * (alpha_from + alpha_to);
  auto half = alpha_step(grid, p, alpha_from, mid, from, newton, depth + 1);
  if (!half) return std::nullopt;
  return alpha_step(grid, p, mid, alpha_to, *half, newton, depth + 1);
}

SteadyState best_positive(std::vector<SteadyState> states) {
  std::vector<SteadyState> pos;
  for (auto& s : states)
    if (s.positive()) pos.push_back(std::move(s));
  if (pos.empty()) fail(Errc::solution_not_found, "no positive steady state found");
  // deterministic pick: the strongest coexistence state
  return *std::max_element(pos.begin(), pos.end(),
                           [](const SteadyState& a, const SteadyState& b) {
                             return a.v.values.minCoeff() < b.v.values.minCoeff();
                           });
}

// polish an LP2 solution at an exact lambda from a warm start, walking
// lambda in halves when the direct jump leaves the Newton basin (the
// w-component moves like 1/lambda, so long jumps are genuinely far)
std::optional<SteadyState> lp2_at_lambda(const Grid& grid, double mu, double b,
                                         double lambda_from, double lambda,
                                         const Field& w0, const Field& v0,
                                         const NewtonConfig& newton, int depth = 0) {
  ModelParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.b = b;
  if (auto direct = try_newton_solve(grid, p, w0, v0, newton, SteadyKind::lp2))
    return direct;
  if (depth >= 16) return std::nullopt;
  const double mid = std::sqrt(lambda_from * lambda);
  auto half = lp2_at_lambda(grid, mu, b, lambda_from, mid, w0, v0, newton, depth + 1);
  if (!half) return std::nullopt;
  return lp2_at_lambda(grid, mu, b, mid, lambda, half->u, half->v, newton, depth + 1);
}

}  // namespace

AlphaSweepResult alpha_sweep(const Grid& grid, double lambda, double mu, double b, double c,
                             const std::vector<double>& alphas, std::uint64_t seed,
                             const NewtonConfig& newton) {
  AlphaSweepResult result;
  ModelParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.b = b;
  p.c = c;

  // rescaled reference only exists left of the bifurcation curve
  if (mu > 0.0) {
    const double sigma1 = sigma1_curve(grid, b, mu);
    if (lambda < sigma1) {
      ContinuationConfig ccfg;
      ccfg.lambda_min = 0.8 * lambda;
      ccfg.lambda_max = sigma1 + 1.0;
      ccfg.max_steps = 2000;
      ccfg.newton = newton;
      try {
        const Branch br = continue_lp2_branch(grid, mu, b, ccfg);
        const BranchPoint* nearest = nullptr;
        for (const auto& pt : br.points)
          if (!nearest ||
              std::abs(pt.params.lambda - lambda) < std::abs(nearest->params.lambda - lambda))
            nearest = &pt;
        if (nearest) {
          if (auto ref = lp2_at_lambda(grid, mu, b, nearest->params.lambda, lambda,
                                       nearest->u, nearest->v, newton)) {
            result.lp2_reference = *ref;
            result.has_lp2_reference = ref->positive();
          }
        }
      } catch (const Error&) {
        // sweep proceeds without the rescaled comparison
      }
    }
  }

  std::optional<SteadyState> prev;
  double prev_alpha = 0.0;
  for (double alpha : alphas) {
    AlphaSweepRow row;
    row.alpha = alpha;
    std::optional<SteadyState> sol;
    if (!prev) {
      ModelParams pa = p;
      pa.alpha = alpha;
      // in the rescaled regime the coexistence state sits at u ~ w/alpha,
      // far below any constant-level start, so seed from the limit system
      if (result.has_lp2_reference && alpha > 0.0) {
        Field ug = result.lp2_reference.u;
        ug.values /= alpha;
        sol = try_newton_solve(grid, pa, ug, result.lp2_reference.v, newton);
        if (sol && !sol->positive()) sol = std::nullopt;
      }
      if (!sol) {
        try {
          sol = best_positive(multistart_newton(grid, pa, 50, seed, newton));
        } catch (const Error&) {
          sol = std::nullopt;
        }
      }
    } else {
      sol = alpha_step(grid, p, prev_alpha, alpha, *prev, newton);
    }
    if (sol && sol->converged) {
      row.solved = true;
      row.state = *sol;
      row.err_u = (sol->u.values.array() - lambda).abs().maxCoeff();
      row.err_v = sol->v.values.lpNorm<Eigen::Infinity>();
      row.err_prey_only = row.err_u + row.err_v;
      if (result.has_lp2_reference) {
        row.err_rescaled =
            (alpha * sol->u.values - result.lp2_reference.u.values).lpNorm<Eigen::Infinity>();
        const double err_v_rescaled =
            (sol->v.values - result.lp2_reference.v.values).lpNorm<Eigen::Infinity>();
        row.limit_case = row.err_prey_only <= row.err_rescaled + err_v_rescaled
                             ? AlphaLimitCase::prey_only
                             : AlphaLimitCase::rescaled;
      } else {
        row.limit_case = AlphaLimitCase::prey_only;
      }
      prev = std::move(sol);
      prev_alpha = alpha;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<ScalingRow> lp2_scaling_probe(const Grid& grid, double mu, double b,
                                          const std::vector<double>& lambdas,
                                          const NewtonConfig& newton) {
  if (lambdas.empty()) return {};
  const double lambda_min = *std::min_element(lambdas.begin(), lambdas.end());

  ContinuationConfig ccfg;
  ccfg.lambda_min = 0.5 * lambda_min;
  ccfg.lambda_max = sigma1_curve(grid, b, mu) + 1.0;
  ccfg.max_steps = 4000;
  ccfg.ds = 0.05;
  ccfg.ds_max = 2.0;  // the w-component grows like 1/lambda; allow long steps
  ccfg.newton = newton;
  const Branch branch = continue_lp2_branch(grid, mu, b, ccfg);

  std::vector<ScalingRow> rows;
  for (double lambda : lambdas) {
    const BranchPoint* nearest = nullptr;
    for (const auto& pt : branch.points)
      if (!nearest ||
          std::abs(pt.params.lambda - lambda) < std::abs(nearest->params.lambda - lambda))
        nearest = &pt;
    if (!nearest) fail(Errc::solution_not_found, "LP2 branch is empty");
    auto sol = lp2_at_lambda(grid, mu, b, nearest->params.lambda, lambda, nearest->u,
                             nearest->v, newton);
    if (!sol || !sol->positive())
      fail(Errc::solution_not_found,
           "no positive limit-system solution at lambda = " + std::to_string(lambda));

    ScalingRow row;
    row.lambda = lambda;
    row.state = *sol;
    row.lambda_wmax = lambda * sol->u.values.lpNorm<Eigen::Infinity>();
    const LyapunovSchmidt ls = extract_lyapunov_schmidt(grid, sol->u, sol->v, lambda);
    row.s = ls.s;
    row.t = ls.t;
    row.mean_v_over_lambda = ls.t;
    Eigen::VectorXd meanzero = lambda * sol->u.values;
    meanzero.array() -= ls.s;
    row.meanzero_norm = meanzero.lpNorm<Eigen::Infinity>();
    row.vmin_over_lambda = sol->v.values.minCoeff() / lambda;
    row.vmax_over_lambda = sol->v.values.maxCoeff() / lambda;
    row.harnack_ratio = sol->v.values.maxCoeff() / sol->v.values.minCoeff();
    row.phi = ls.phi;
    row.psi = ls.psi;
    rows.push_back(std::move(row));
  }
  return rows;
}

LyapunovSchmidt extract_lyapunov_schmidt(const Grid& grid, const Field& w, const Field& v,
                                         double lambda) {
  if (!(lambda > 0.0)) fail(Errc::bad_parameter, "extraction needs lambda > 0");
  check_field(grid, w, Region::Omega);
  check_field(grid, v, Region::Omega1);
  const Measures m = measures(grid);
  LyapunovSchmidt out;
  Field wt = w;
  wt.values *= lambda;
  out.s = integrate(grid, wt) / m.omega;
  Field vt = v;
  vt.values /= lambda;
  out.t = integrate(grid, vt) / m.omega1;
  out.phi = wt;
  out.phi.values = (wt.values.array() - out.s) / lambda;
  out.psi = vt;
  out.psi.values = (vt.values.array() - out.t) / lambda;
  return out;
}

BasePointJacobian jacobian_base_point(const Grid& grid, double b, double mu) {
  if (mu <= 0.0) fail(Errc::bad_parameter, "base point needs mu > 0");
  if (b <= 0.0) fail(Errc::bad_parameter, "base point needs b > 0");
  const Measures m = measures(grid);
  BasePointJacobian out;
  out.s0 = mu * m.omega1 / m.omega0;
  out.t0 = m.omega / (b * m.omega1);
  out.J << 0.0, -out.s0 * b * m.omega1, -(out.t0 / out.s0) * m.omega0,
      -b * out.t0 * m.omega1;
  out.det = out.J.determinant();
  return out;
}

Field phi0_reference(const Grid& grid, double mu) {
  const Measures m = measures(grid);
  Field rhs = constant_field(grid, Region::Omega, 0.0);
  for (int i = 0; i < grid.num_nodes(); ++i)
    rhs.values[i] = grid.label[i] == Region::Omega0 ? m.omega1 / m.omega0 : -1.0;
  Field out = mean_zero_inverse(grid, Region::Omega, rhs);
  out.values *= mu;
  return out;
}

}  // namespace refugia
