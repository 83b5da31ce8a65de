#include "refugia/continuation.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "refugia/spectra.hpp"
#include "refugia/thresholds.hpp"

namespace refugia {

const char* branch_origin_name(BranchOrigin o) {
  switch (o) {
    case BranchOrigin::from_gamma_v: return "gamma_v";
    case BranchOrigin::from_gamma_u: return "gamma_u";
    case BranchOrigin::lp2: return "lp2";
    case BranchOrigin::manual: return "manual";
  }
  return "?";
}

const char* branch_termination_name(BranchTermination t) {
  switch (t) {
    case BranchTermination::window_edge: return "window_edge";
    case BranchTermination::max_steps: return "max_steps";
    case BranchTermination::corrector_failure: return "corrector_failure";
    case BranchTermination::stall_at_fold: return "stall_at_fold";
    case BranchTermination::running: return "running";
  }
  return "?";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct Stacked {
  // layout: [u (n); v (n1); lambda]
  static Eigen::VectorXd pack(const Field& u, const Field& v, double lambda) {
    Eigen::VectorXd x(u.values.size() + v.values.size() + 1);
    x.head(u.values.size()) = u.values;
    x.segment(u.values.size(), v.values.size()) = v.values;
    x[x.size() - 1] = lambda;
    return x;
  }
};

Eigen::VectorXd metric_weights(const Grid& grid) {
  const int n = grid.num_nodes();
  const int n1 = grid.region_size(Region::Omega1);
  Eigen::VectorXd w(n + n1 + 1);
  w.head(n) = grid.weight;
  for (int k = 0; k < n1; ++k) w[n + k] = grid.weight[grid.omega1_nodes[k]];
  w[n + n1] = 1.0;
  return w;
}

struct CorrectorResult {
  Field u;
  Field v;
  double lambda = 0.0;
  double jac_proxy = 0.0;
  bool ok = false;
};

// Bordered Newton for F(u,v,lambda) = 0 with the arclength constraint
// <t, X - X_ref>_w = ds, solved by block elimination: two solves with the
// state Jacobian per iteration. Exactly at a fold the Jacobian is singular
// and the factorization (or the line search) fails; the caller halves ds,
// which moves the crossing off the singular point.
CorrectorResult correct(const Grid& grid, ModelParams p, Field u, Field v,
                        const Eigen::VectorXd& tangent, const Eigen::VectorXd& x_ref,
                        double ds, const ContinuationConfig& cfg, SteadyKind kind) {
  const int n = grid.num_nodes();
  const int n1 = grid.region_size(Region::Omega1);
  const Eigen::VectorXd w = metric_weights(grid);
  CorrectorResult out;
  double proxy = 0.0;
  for (int it = 0; it < cfg.corrector_max_iter; ++it) {
    std::pair<Field, Field> res;
    try {
      res = kind == SteadyKind::sp2 ? residual_sp2(grid, p, u, v)
                                    : residual_lp2(grid, p, u, v);
    } catch (const Error&) {
      return out;
    }
    const Eigen::VectorXd x = Stacked::pack(u, v, p.lambda);
    const double constraint = ((x - x_ref).cwiseProduct(w)).dot(tangent) - ds;
    const double rnorm =
        std::max(res.first.values.lpNorm<Eigen::Infinity>(),
                 res.second.values.lpNorm<Eigen::Infinity>());
    // both tolerances scale with the state amplitude; on the limit-system
    // branch the w-component grows like 1/lambda and absolute targets sink
    // below the round-off floor of the discrete Laplacian
    const double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
    if (rnorm <= cfg.newton.tol * scale && std::abs(constraint) <= 1e-10 * scale) {
      out.u = std::move(u);
      out.v = std::move(v);
      out.lambda = p.lambda;
      out.jac_proxy = proxy;
      out.ok = true;
      return out;
    }

    SpMat j;
    std::pair<Field, Field> flam;
    try {
      j = kind == SteadyKind::sp2 ? jacobian_sp2(grid, p, u, v)
                                  : jacobian_lp2(grid, p, u, v);
      flam = dresidual_dlambda(grid, p, u, v, kind);
    } catch (const Error&) {
      return out;
    }
    Eigen::SparseLU<SpMat> lu(j);
    if (lu.info() != Eigen::Success) return out;

    Eigen::VectorXd rhs(n + n1), fl(n + n1);
    rhs.head(n) = -res.first.values;
    rhs.tail(n1) = -res.second.values;
    fl.head(n) = flam.first.values;
    fl.tail(n1) = flam.second.values;
    const Eigen::VectorXd a = lu.solve(rhs);       // -J^{-1} F
    const Eigen::VectorXd b = -lu.solve(fl);       // -J^{-1} F_lambda
    if (!a.allFinite() || !b.allFinite()) return out;

    // tangent components acting on the state block and on lambda
    const Eigen::VectorXd tw = tangent.cwiseProduct(w);
    const double t_dot_a = tw.head(n + n1).dot(a);
    const double t_dot_b = tw.head(n + n1).dot(b);
    const double t_lambda = tw[n + n1];
    const double denom = t_dot_b + t_lambda;
    if (std::abs(denom) < 1e-14) return out;
    const double dlambda = (-constraint - t_dot_a) / denom;
    const Eigen::VectorXd dx = a + dlambda * b;

    u.values += dx.head(n);
    v.values += dx.segment(n, n1);
    p.lambda += dlambda;
    const double bnorm = std::sqrt(b.cwiseProduct(w.head(n + n1)).dot(b));
    proxy = 1.0 / (1.0 + bnorm);
  }
  return out;
}

BranchPoint make_point(const CorrectorResult& c, const ModelParams& base, double s,
                       const Eigen::VectorXd& tangent) {
  BranchPoint pt;
  pt.params = base;
  pt.params.lambda = c.lambda;
  pt.u = c.u;
  pt.v = c.v;
  pt.s = s;
  pt.tangent = tangent;
  pt.jac_proxy = c.jac_proxy;
  pt.strictly_positive = component_strictly_positive(c.u.values) &&
                         component_strictly_positive(c.v.values);
  return pt;
}

std::pair<BranchPoint, Eigen::VectorXd> seed_common(
    const Grid& grid, const ModelParams& p, double s, double lambda0, const Field& du,
    const Field& dv, double dlambda, const Field& u_base, const Field& v_base,
    const NewtonConfig& newton, SteadyKind kind) {
  Eigen::VectorXd t = Stacked::pack(du, dv, dlambda);
  const double tn = state_norm(grid, t);
  t /= tn;

  ModelParams seed_params = p;
  seed_params.lambda = lambda0 + s * dlambda;
  Field u = u_base, v = v_base;
  u.values += s * du.values;
  v.values += s * dv.values;

  const Eigen::VectorXd x_ref = Stacked::pack(u_base, v_base, lambda0);
  const double ds_eff = s * tn;  // arclength of the analytic predictor

  ContinuationConfig cfg;
  cfg.newton = newton;
  const CorrectorResult c = correct(grid, seed_params, u, v, t, x_ref, ds_eff, cfg, kind);
  if (!c.ok)
    fail(Errc::correction_failed, "seed correction failed; try a smaller seed amplitude");
  return {make_point(c, p, ds_eff, t), t};
}

}  // namespace

double state_dot(const Grid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.cwiseProduct(metric_weights(grid)).dot(b);
}

double state_norm(const Grid& grid, const Eigen::VectorXd& stacked) {
  return std::sqrt(state_dot(grid, stacked, stacked));
}

std::pair<BranchPoint, Eigen::VectorXd> seed_from_gamma_v(const Grid& grid,
                                                          const ModelParams& p, double s,
                                                          const NewtonConfig& newton) {
  if (p.mu <= 0.0) fail(Errc::bad_parameter, "gamma_v seeding needs mu > 0");
  const EigenResult phi = phi_star(grid, p.b, p.mu);
  const Field psi = psi_star(grid, p.mu, p.b, p.c, p.alpha, phi);
  const double dlambda = lambda_prime0_gamma_v(grid, p.mu, p.b, p.c, p.alpha);
  const Field u0 = constant_field(grid, Region::Omega, 0.0);
  const Field v0 = constant_field(grid, Region::Omega1, p.mu);
  return seed_common(grid, p, s, phi.value, phi.eigenfunction, psi, dlambda, u0, v0, newton,
                     SteadyKind::sp2);
}

std::pair<BranchPoint, Eigen::VectorXd> seed_from_gamma_u(const Grid& grid,
                                                          const ModelParams& p, double s,
                                                          const NewtonConfig& newton) {
  if (p.mu >= 0.0) fail(Errc::bad_parameter, "gamma_u seeding needs mu < 0");
  const double lambda0 = -p.mu / p.c;
  const Field phis = phi_lower_star(grid, p.b, lambda0);
  const double dlambda = lambda_prime0_gamma_u(grid, p.mu, p.b, p.c, p.alpha);
  // u(s) = lambda(s) + s phi_star, so du/ds = lambda'(0) + phi_star
  Field du = phis;
  du.values.array() += dlambda;
  const Field dv = constant_field(grid, Region::Omega1, 1.0);
  const Field u0 = constant_field(grid, Region::Omega, lambda0);
  const Field v0 = constant_field(grid, Region::Omega1, 0.0);
  return seed_common(grid, p, s, lambda0, du, dv, dlambda, u0, v0, newton, SteadyKind::sp2);
}

Branch continue_branch(const Grid& grid, const BranchPoint& base,
                       const Eigen::VectorXd& tangent, const ContinuationConfig& cfg,
                       SteadyKind kind) {
  Branch branch;
  branch.points.push_back(base);
  Eigen::VectorXd t = tangent / state_norm(grid, tangent);
  double ds = cfg.ds;
  int easy_streak = 0;

  while (static_cast<int>(branch.points.size()) < cfg.max_steps) {
    const BranchPoint& cur = branch.points.back();
    const Eigen::VectorXd x_cur = Stacked::pack(cur.u, cur.v, cur.params.lambda);

    ModelParams pred = cur.params;
    pred.lambda += ds * t[t.size() - 1];
    Field u = cur.u, v = cur.v;
    const int n = grid.num_nodes();
    const int n1 = grid.region_size(Region::Omega1);
    u.values += ds * t.head(n);
    v.values += ds * t.segment(n, n1);

    const CorrectorResult c = correct(grid, pred, u, v, t, x_cur, ds, cfg, kind);
    if (!c.ok) {
      ds *= 0.5;
      easy_streak = 0;
      if (ds < cfg.ds_min) {
        if (branch.points.size() <= 1)
          fail(Errc::stall_at_fold, "step length underflow at the first step");
        branch.termination = BranchTermination::stall_at_fold;
        break;
      }
      continue;
    }

    // s accumulates the realized secant length, so the normalization
    // |dstate|^2 + (dlambda)^2 = (ds)^2 holds exactly between points
    Eigen::VectorXd secant = Stacked::pack(c.u, c.v, c.lambda) - x_cur;
    const double sn = state_norm(grid, secant);
    BranchPoint next = make_point(c, cur.params, cur.s + sn, t);
    if (sn > 0.0) t = secant / sn;
    next.tangent = t;
    branch.points.push_back(std::move(next));

    if (branch.points.back().params.lambda < cfg.lambda_min ||
        branch.points.back().params.lambda > cfg.lambda_max) {
      branch.termination = BranchTermination::window_edge;
      break;
    }
    if (++easy_streak >= 4) {
      ds = std::min(ds * 1.3, cfg.ds_max);
      easy_streak = 0;
    }
  }
  if (branch.termination == BranchTermination::running)
    branch.termination = BranchTermination::max_steps;
  detect_folds(branch);
  return branch;
}

std::vector<int> detect_folds(const std::vector<double>& lambdas) {
  std::vector<int> folds;
  for (size_t i = 1; i + 1 < lambdas.size(); ++i) {
    const double before = lambdas[i] - lambdas[i - 1];
    const double after = lambdas[i + 1] - lambdas[i];
    if (before * after < 0.0) folds.push_back(static_cast<int>(i));
  }
  return folds;
}

std::vector<int> detect_folds(Branch& branch) {
  std::vector<double> ls;
  ls.reserve(branch.points.size());
  for (const auto& p : branch.points) ls.push_back(p.params.lambda);
  const std::vector<int> folds = detect_folds(ls);
  for (auto& p : branch.points) p.fold = false;
  for (int i : folds) branch.points[i].fold = true;
  return folds;
}

Branch continue_lp2_branch(const Grid& grid, double mu, double b,
                           const ContinuationConfig& cfg) {
  if (mu <= 0.0) fail(Errc::bad_parameter, "LP2 branch needs mu > 0");
  const EigenResult phi = phi_star(grid, b, mu);
  // kernel tangent of the limit system at (0, mu): same phi*, and
  // psi = (-Lap + mu)^{-1} (mu (sigma1 - b mu) phi*); the quadratic term of
  // the w-equation vanishes, so lambda'(0) = b int_{Omega1} psi (phi*)^2 < 0
  // and the branch enters subcritically, consistent with its blow-up end.
  Field rhs = restrict_to(grid, phi.eigenfunction, Region::Omega1);
  rhs.values *= mu * (phi.value - b * mu);
  const Field psi = shifted_inverse(grid, Region::Omega1, mu, rhs);
  Field integrand = restrict_to(grid, phi.eigenfunction, Region::Omega1);
  integrand.values = psi.values.cwiseProduct(integrand.values.array().square().matrix());
  const double dlambda = b * integrate(grid, integrand);

  ModelParams p;
  p.lambda = phi.value;
  p.mu = mu;
  p.b = b;
  const Field u0 = constant_field(grid, Region::Omega, 0.0);
  const Field v0 = constant_field(grid, Region::Omega1, mu);
  auto seeded = seed_common(grid, p, cfg.seed_s, phi.value, phi.eigenfunction, psi, dlambda,
                            u0, v0, cfg.newton, SteadyKind::lp2);
  Branch branch = continue_branch(grid, seeded.first, seeded.second, cfg, SteadyKind::lp2);
  branch.origin = BranchOrigin::lp2;
  branch.origin_lambda = phi.value;
  return branch;
}

}  // namespace refugia
