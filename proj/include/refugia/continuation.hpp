#pragma once

#include "refugia/steady.hpp"

namespace refugia {

struct BranchPoint {
  ModelParams params;  // lambda varies along the branch
  Field u, v;
  double s = 0.0;                 // arclength coordinate
  Eigen::VectorXd tangent;        // unit tangent in (u, v, lambda), weighted metric
  bool fold = false;
  double jac_proxy = 0.0;         // fold-proximity proxy, 1/(1+|J^{-1} F_lambda|)
  bool strictly_positive = false;
};

enum class BranchOrigin { from_gamma_v, from_gamma_u, lp2, manual };
enum class BranchTermination {
  window_edge,
  max_steps,
  corrector_failure,
  stall_at_fold,
  running,
};

const char* branch_origin_name(BranchOrigin o);
const char* branch_termination_name(BranchTermination t);

struct Branch {
  std::vector<BranchPoint> points;
  BranchOrigin origin = BranchOrigin::manual;
  double origin_lambda = 0.0;  // analytic bifurcation value the branch left
  BranchTermination termination = BranchTermination::running;
};

struct ContinuationConfig {
  double ds = 0.02;
  double ds_min = 1e-7;
  double ds_max = 0.2;
  int max_steps = 400;
  double lambda_min = 0.0;
  double lambda_max = 10.0;
  double seed_s = 1e-3;  // amplitude of the analytic seed off the semitrivial state
  NewtonConfig newton;
  int corrector_max_iter = 12;
};

/// First branch point off the predator-only state at
/// lambda = sigma1(b mu 1_{Omega1}), along the analytic tangent
/// (phi*, psi*, lambda'(0)); Newton-corrected with an arclength constraint so
/// the corrector cannot collapse back onto the semitrivial state.
std::pair<BranchPoint, Eigen::VectorXd> seed_from_gamma_v(const Grid& grid,
                                                          const ModelParams& p, double s,
                                                          const NewtonConfig& newton = {});

/// First branch point off the prey-only state at lambda = |mu|/c (mu < 0),
/// along (phi_lower_star + lambda'(0), 1, lambda'(0)).
std::pair<BranchPoint, Eigen::VectorXd> seed_from_gamma_u(const Grid& grid,
                                                          const ModelParams& p, double s,
                                                          const NewtonConfig& newton = {});

/// Pseudo-arclength trace: secant predictor after the first step, bordered
/// Newton corrector solved by block elimination, adaptive step length.
Branch continue_branch(const Grid& grid, const BranchPoint& base,
                       const Eigen::VectorXd& tangent, const ContinuationConfig& cfg,
                       SteadyKind kind = SteadyKind::sp2);

/// Indices where d lambda / ds flips sign; marks fold flags on the branch.
std::vector<int> detect_folds(Branch& branch);
std::vector<int> detect_folds(const std::vector<double>& lambdas);

/// Branch of the limit system seeded at (0, mu) and traced toward
/// lambda -> 0+, where the w-component blows up like 1/lambda.
Branch continue_lp2_branch(const Grid& grid, double mu, double b,
                           const ContinuationConfig& cfg);

/// Weighted norm on stacked (u, v, lambda) increments used by the arclength
/// constraint.
double state_norm(const Grid& grid, const Eigen::VectorXd& stacked);
double state_dot(const Grid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace refugia
