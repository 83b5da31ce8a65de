#include "refugia/acceptance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "refugia/asymptotics.hpp"
#include "refugia/evolution.hpp"
#include "refugia/thresholds.hpp"

namespace refugia {

bool AcceptanceReport::all_pass() const {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

namespace {

constexpr double kPi = std::numbers::pi;

RingSpec ring_fixture(int n = 256) {
  RingSpec r;
  r.circumference = 2.0 * kPi;
  r.refuge_start = 0.0;
  r.refuge_length = kPi;
  r.resolution = n;
  return r;
}

RectSpec rect_fixture(int nx = 128, int ny = 64) {
  RectSpec r;
  r.outer_min = {0.0, 0.0};
  r.outer_max = {2.0, 1.0};
  r.hole_min = {0.8, 0.4};
  r.hole_max = {1.2, 0.6};
  r.resolution = {nx, ny};
  return r;
}

// dense full-spectrum reference, independent of the power-iteration path
double dense_smallest_eigenvalue(const SparseOperator& lap, const Field& q) {
  const Eigen::VectorXd& w = lap.weights();
  Eigen::MatrixXd m = Eigen::MatrixXd(lap.weighted_matrix());
  m += Eigen::MatrixXd(w.cwiseProduct(q.values).asDiagonal());
  const Eigen::VectorXd si = w.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd tilde = si.asDiagonal() * m * si.asDiagonal();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(tilde).eigenvalues()[0];
}

struct Checker {
  bool pass = true;
  std::ostringstream details;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (details.tellp() > 0) details << "; ";
      details << what;
    }
  }
  template <class T>
  void note(const std::string& key, T value) {
    if (details.tellp() > 0) details << "; ";
    details << key << "=" << value;
  }
};

struct Suite {
  Grid ring = build_grid(ring_fixture());
  Grid rect = build_grid(rect_fixture());
  double b = 1.0, c = 1.0, mu = 2.0;
  double sigma1_ring = sigma1_curve(ring, b, mu);
  double astar = alpha_star(ring, mu, b, c);
  std::vector<SteadyState> positive_registry;  // every positive sp2 solution produced

  void remember(const SteadyState& st) {
    if (st.converged && st.positive()) positive_registry.push_back(st);
  }
  void remember(const std::vector<SteadyState>& states) {
    for (const auto& st : states) remember(st);
  }
  void remember_branch(const Branch& br) {
    for (const auto& pt : br.points) {
      if (!pt.strictly_positive) continue;
      SteadyState st;
      st.u = pt.u;
      st.v = pt.v;
      st.params = pt.params;
      st.converged = true;
      st.u_positive = st.v_positive = true;
      positive_registry.push_back(std::move(st));
    }
  }
};

CriterionResult criterion1(Suite& s) {
  Checker ck;
  for (const Grid* g : {&s.ring, &s.rect}) {
    const char* tag = g == &s.ring ? "ring" : "rect";
    double prev = -1.0;
    bool increasing = true, below = true;
    for (int k = 0; k < 50; ++k) {
      const double mu = 0.1 * std::pow(1e4, k / 49.0);  // 0.1 .. 1e3, log spaced
      const double sig = sigma1_curve(*g, s.b, mu);
      if (sig <= prev) increasing = false;
      if (sig >= s.b * mu) below = false;
      prev = sig;
    }
    ck.require(increasing, std::string(tag) + ": curve not strictly increasing");
    ck.require(below, std::string(tag) + ": sigma1 >= b mu somewhere");
    ck.require(std::abs(sigma1_curve(*g, s.b, 0.0)) <= 1e-9,
               std::string(tag) + ": sigma1(0) != 0");
  }
  // saturation at mu = 1e6: the potential's boundary layer is ~1e-3 wide,
  // far below the base spacing, so this clause runs on interface-graded
  // variants of the fixtures that resolve the layer; both sides of the
  // comparison live on the same grid
  {
    RingSpec rg = ring_fixture();
    rg.interface_grading = 6;
    RectSpec rc = rect_fixture();
    rc.interface_grading = 6;
    const Grid ring_g = build_grid(rg);
    const Grid rect_g = build_grid(rc);
    for (const Grid* g : {&ring_g, &rect_g}) {
      const char* tag = g == &ring_g ? "ring" : "rect";
      const double sD = sigma1_dirichlet_refuge(*g);
      const double gap = std::abs(sigma1_curve(*g, s.b, 1e6) - sD) / sD;
      ck.require(gap <= 0.02,
                 std::string(tag) + ": mu=1e6 not within 2% of the Dirichlet limit");
      ck.note(std::string(tag) + "_saturation_gap", gap);
    }
  }
  // analytic Dirichlet values with observed error quartering under refinement
  const double ring_exact = 1.0;
  const double e_ring = std::abs(sigma1_dirichlet_refuge(s.ring) - ring_exact);
  const double e_ring_fine =
      std::abs(sigma1_dirichlet_refuge(build_grid(ring_fixture(512))) - ring_exact);
  ck.require(e_ring / ring_exact < 1e-3, "ring Dirichlet eigenvalue off");
  ck.require(e_ring / e_ring_fine >= 2.8, "ring refinement does not quarter the error");

  const double rect_exact = kPi * kPi * (1.0 / 0.16 + 1.0 / 0.04);
  const double e_rect = std::abs(sigma1_dirichlet_refuge(s.rect) - rect_exact);
  const double e_rect_fine =
      std::abs(sigma1_dirichlet_refuge(build_grid(rect_fixture(256, 128))) - rect_exact);
  ck.require(e_rect / rect_exact < 5e-3, "rect Dirichlet eigenvalue off");
  ck.require(e_rect / e_rect_fine >= 2.8, "rect refinement does not quarter the error");
  ck.note("ring_err_ratio", e_ring / e_ring_fine);
  ck.note("rect_err_ratio", e_rect / e_rect_fine);
  return {1, "Eigenvalue curve (monotone, below b mu, Dirichlet limit, h^2)", ck.pass,
          ck.details.str()};
}

CriterionResult criterion2(Suite& s) {
  Checker ck;
  ModelParams p;
  p.mu = s.mu;
  p.b = s.b;
  p.c = s.c;
  p.alpha = s.astar / 2.0;
  const auto seed1 = seed_from_gamma_v(s.ring, p, 1e-3);
  const auto seed2 = seed_from_gamma_v(s.ring, p, 5e-4);
  const double origin = 2.0 * seed2.first.params.lambda - seed1.first.params.lambda;
  ck.require(std::abs(origin - s.sigma1_ring) / s.sigma1_ring <= 5e-3,
             "extrapolated origin misses sigma1 by more than 5e-3 relative");
  ck.note("origin_rel_err", std::abs(origin - s.sigma1_ring) / s.sigma1_ring);

  ContinuationConfig cfg;
  cfg.lambda_min = s.sigma1_ring - 0.1;
  cfg.lambda_max = s.sigma1_ring + 2.05;
  cfg.max_steps = 2000;
  const Branch br = continue_branch(s.ring, seed1.first, seed1.second, cfg);
  double lmax = 0.0;
  bool positive = true;
  for (const auto& pt : br.points) {
    lmax = std::max(lmax, pt.params.lambda);
    if (!pt.strictly_positive) positive = false;
  }
  s.remember_branch(br);
  ck.require(br.termination == BranchTermination::window_edge,
             std::string("branch ended by ") + branch_termination_name(br.termination));
  ck.require(lmax >= s.sigma1_ring + 2.0, "branch did not cross origin+2");
  ck.require(positive, "branch left the positive cone");
  return {2, "Bifurcation from the predator-only branch", ck.pass, ck.details.str()};
}

CriterionResult criterion3(Suite& s) {
  Checker ck;
  const double d0 = lambda_prime0_gamma_v(s.ring, s.mu, s.b, s.c, 0.0);
  ck.require(d0 > 0.0, "lambda'(0) at alpha=0 is not positive");
  int sign_changes = 0;
  double prev = d0;
  for (int k = 0; k <= 32; ++k) {
    const double alpha = s.astar * std::pow(10.0, -2.0 + 4.0 * k / 32.0);
    const double d = lambda_prime0_gamma_v(s.ring, s.mu, s.b, s.c, alpha);
    if ((prev > 0.0) != (d > 0.0)) ++sign_changes;
    prev = d;
  }
  ck.require(sign_changes == 1, "direction scalar does not cross zero exactly once");

  ModelParams p;
  p.mu = s.mu;
  p.b = s.b;
  p.c = s.c;
  p.alpha = s.astar / 2.0;
  const double above = seed_from_gamma_v(s.ring, p, 1e-3).first.params.lambda;
  ck.require(above > s.sigma1_ring, "alpha*/2 entry is not supercritical");
  p.alpha = 2.0 * s.astar;
  const double below = seed_from_gamma_v(s.ring, p, 1e-3).first.params.lambda;
  ck.require(below < s.sigma1_ring, "2 alpha* entry is not subcritical");
  ck.note("alpha_star", s.astar);
  return {3, "Direction threshold alpha*", ck.pass, ck.details.str()};
}

CriterionResult criterion4(Suite& s) {
  Checker ck;
  ModelParams p;
  p.mu = s.mu;
  p.b = s.b;
  p.c = s.c;
  p.alpha = 4.0 * s.astar;
  const auto seeded = seed_from_gamma_v(s.ring, p, 1e-3);
  ContinuationConfig cfg;
  cfg.lambda_min = 0.0;
  cfg.lambda_max = s.sigma1_ring + 0.6;
  cfg.max_steps = 800;
  Branch br = continue_branch(s.ring, seeded.first, seeded.second, cfg);
  s.remember_branch(br);
  const auto folds = detect_folds(br);
  ck.require(!folds.empty(), "no fold recorded on the 4 alpha* branch");
  if (!folds.empty()) {
    const double lambda_fold = br.points[folds[0]].params.lambda;
    ck.require(lambda_fold < s.sigma1_ring, "fold is not left of the bifurcation point");
    ck.note("lambda_fold", lambda_fold);

    ModelParams pm = p;
    pm.lambda = 0.5 * (lambda_fold + s.sigma1_ring);
    const auto found = multistart_newton(s.ring, pm, 50, 424242);
    s.remember(found);
    const auto distinct = distinct_states(found, 1e-3);
    int positive = 0;
    for (const auto& st : distinct)
      if (st.positive()) ++positive;
    ck.require(positive >= 2, "multistart found fewer than 2 distinct positive states");
    ck.note("distinct_positive", positive);
  }
  return {4, "Fold and multiplicity at 4 alpha*", ck.pass, ck.details.str()};
}

CriterionResult criterion5(Suite& s) {
  Checker ck;
  ModelParams p;
  p.mu = -0.5;
  p.b = s.b;
  p.c = s.c;
  p.alpha = 1.0;
  const double origin = -p.mu / p.c;
  const auto q1 = seed_from_gamma_u(s.ring, p, 1e-3).first;
  const auto q2 = seed_from_gamma_u(s.ring, p, 5e-4).first;
  const double extrapolated = 2.0 * q2.params.lambda - q1.params.lambda;
  ck.require(std::abs(extrapolated - origin) / origin <= 5e-3,
             "extrapolated origin misses |mu|/c");
  ck.note("origin_rel_err", std::abs(extrapolated - origin) / origin);

  for (double alpha : {0.0, 1.0, 10.0, 100.0})
    ck.require(lambda_prime0_gamma_u(s.ring, p.mu, p.b, p.c, alpha) > 0.0,
               "lambda'(0) not positive at alpha=" + std::to_string(alpha));

  const Field phis = phi_lower_star(s.ring, p.b, origin);
  Field abs_phis = phis;
  abs_phis.values = phis.values.cwiseAbs();
  const double l1 = integrate(s.ring, abs_phis);
  const double target = p.b * measures(s.ring).omega1;
  ck.require(std::abs(l1 - target) / target <= 1e-6, "L1 identity violated");
  ck.note("l1_rel_err", std::abs(l1 - target) / target);
  return {5, "Bifurcation from the prey-only branch", ck.pass, ck.details.str()};
}

CriterionResult criterion6(Suite& s) {
  Checker ck;
  std::mt19937_64 rng(20260810);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int positives_found = 0;
  int checked = 0;
  for (int k = 0; k < 100; ++k) {  // mu > 0 side, lambda <= ell_tilde
    ModelParams p;
    p.b = s.b;
    p.c = s.c;
    p.mu = 0.8 + 3.2 * unif(rng);
    p.alpha = 0.5 + 7.5 * unif(rng);
    const double lt = ell_tilde(s.ring, p.mu, p.alpha, p.b, p.c);
    p.lambda = (0.15 + 0.83 * unif(rng)) * lt;
    ++checked;
    for (const auto& st : multistart_newton(s.ring, p, 50, 1000 + k))
      if (st.positive()) ++positives_found;
  }
  for (int k = 0; k < 100; ++k) {  // mu < 0 side, mu <= m(lambda, alpha)
    ModelParams p;
    p.b = s.b;
    p.c = s.c;
    p.lambda = 0.1 + 2.4 * unif(rng);
    p.alpha = 6.0 * unif(rng);
    p.mu = m_curve(p.lambda, p.alpha, p.c) * (1.0 + 1.5 * unif(rng));
    ++checked;
    for (const auto& st : multistart_newton(s.ring, p, 50, 5000 + k))
      if (st.positive()) ++positives_found;
  }
  ck.require(checked == 200, "parameter sampling incomplete");
  ck.require(positives_found == 0,
             std::to_string(positives_found) + " positive states in nonexistence regions");
  return {6, "Nonexistence regions hold against multistart attack", ck.pass,
          ck.details.str()};
}

CriterionResult criterion7(Suite& s) {
  Checker ck;
  // dedicated coverage of the stated alpha set on top of the shared registry
  for (double alpha : {0.0, 1.0, 10.0, 100.0}) {
    ModelParams p;
    p.mu = s.mu;
    p.b = s.b;
    p.c = s.c;
    p.alpha = alpha;
    p.lambda = 1.5 * s.sigma1_ring;
    s.remember(multistart_newton(s.ring, p, 12, 777));
  }
  const double slack = 1.0 + 10.0 * s.ring.hx * s.ring.hx;
  int violations = 0;
  for (const auto& st : s.positive_registry) {
    const AprioriBox box = apriori_box(st.params);
    if (st.u.values.maxCoeff() > box.u_max * slack) ++violations;
    if (st.v.values.maxCoeff() > box.v_max * slack) ++violations;
  }
  ck.note("registry_size", s.positive_registry.size());
  ck.require(s.positive_registry.size() >= 100, "registry suspiciously small");
  ck.require(violations == 0, std::to_string(violations) + " box violations");
  return {7, "A priori box over every positive solution produced", ck.pass,
          ck.details.str()};
}

CriterionResult criterion8(Suite& s) {
  Checker ck;
  const double lambda = 1.5 * s.sigma1_ring;
  const auto sweep = alpha_sweep(s.ring, lambda, s.mu, s.b, s.c, {1.0, 10.0, 100.0, 1000.0});
  bool all_solved = true, decreasing = true;
  double first = 0.0, last = 0.0;
  for (size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    if (!r.solved) {
      all_solved = false;
      continue;
    }
    s.remember(r.state);
    if (i == 0)
      first = r.err_prey_only;
    else if (r.err_prey_only >= last)
      decreasing = false;
    last = r.err_prey_only;
  }
  ck.require(all_solved, "some alpha rows unsolved");
  ck.require(decreasing, "collapse error is not monotone decreasing");
  ck.require(last < 0.1 * first, "final error above 10% of the alpha=1 error");
  ck.note("err_alpha1", first);
  ck.note("err_alpha1000", last);
  return {8, "Collapse to the prey-only state as alpha grows", ck.pass, ck.details.str()};
}

CriterionResult criterion9(Suite& s) {
  Checker ck;
  std::vector<double> lambdas;
  for (double f : {0.2, 0.1, 0.05, 0.025}) lambdas.push_back(f * s.sigma1_ring);
  const auto rows = lp2_scaling_probe(s.ring, s.mu, s.b, lambdas);
  ck.require(rows.size() == 4, "probe incomplete");
  if (rows.size() == 4) {
    for (const auto& r : rows) {
      ck.require(r.state.v.values.minCoeff() > r.lambda / s.b,
                 "v dips to lambda/b or below");
      ck.require(r.state.v.values.maxCoeff() < s.mu, "v reaches mu");
    }
    double sxx = 0, sxy = 0, sx = 0, sy = 0;
    for (const auto& r : rows) {
      const double x = std::log(1.0 / r.lambda);
      const double y = std::log(r.state.u.values.lpNorm<Eigen::Infinity>());
      sxx += x * x;
      sxy += x * y;
      sx += x;
      sy += y;
    }
    const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
    ck.require(std::abs(slope - 1.0) <= 0.05, "blow-up slope outside 1 +- 0.05");
    ck.note("slope", slope);

    const Measures m = measures(s.ring);
    const double s0 = s.mu * m.omega1 / m.omega0;
    const double t0 = m.omega / (s.b * m.omega1);
    ck.require(std::abs(rows.back().lambda_wmax - s0) / s0 <= 0.05,
               "lambda |w| misses s0 by over 5%");
    ck.require(std::abs(rows.back().mean_v_over_lambda - t0) / t0 <= 0.05,
               "mean v/lambda misses t0 by over 5%");
    ck.note("lambda_wmax", rows.back().lambda_wmax);
    ck.note("mean_v_over_lambda", rows.back().mean_v_over_lambda);

    const BasePointJacobian bp = jacobian_base_point(s.ring, s.b, s.mu);
    const double det_formula = -s.b * t0 * m.omega0 * m.omega1;
    ck.require(bp.det < 0.0, "det J not negative");
    ck.require(std::abs(bp.det - det_formula) <= 1e-12 * std::abs(det_formula),
               "det J does not reproduce the measure formula");
    ck.require(bp.J(0, 0) == 0.0, "J(0,0) not exactly zero");
  }
  return {9, "Limit-system bounds and blow-up scaling", ck.pass, ck.details.str()};
}

CriterionResult criterion10(Suite& s) {
  Checker ck;
  ModelParams p;
  p.mu = s.mu;
  p.b = s.b;
  p.c = s.c;
  p.alpha = 1.0;
  p.lambda = 1.5 * s.sigma1_ring;
  const Field u0 = field_from_function(s.ring, Region::Omega, [&](double x, double) {
    return 0.4 * p.lambda * (1.0 + 0.3 * std::cos(x));
  });
  const Field v0 = field_from_function(s.ring, Region::Omega1, [&](double x, double) {
    return 0.5 * p.mu * (1.0 + 0.2 * std::sin(x));
  });
  EvolutionConfig cfg;
  cfg.t_final = 600.0;
  cfg.steady_tol = 1e-9;
  const Trajectory tr = evolve(s.ring, p, u0, v0, cfg);
  ck.require(tr.status == EvolveStatus::steady_detected, "no steady state detected");
  const double res = steady_residual_monitor(s.ring, p, tr.u_final, tr.v_final);
  ck.require(res < 1e-6, "steady residual above 1e-6");
  ck.note("final_residual", res);

  const SteadyState st = newton_solve(s.ring, p, tr.u_final, tr.v_final);
  s.remember(st);
  const double dist =
      std::max((st.u.values - tr.u_final.values).lpNorm<Eigen::Infinity>(),
               (st.v.values - tr.v_final.values).lpNorm<Eigen::Infinity>());
  ck.require(dist < 1e-6, "final state differs from the Newton solution");
  ck.note("newton_distance", dist);

  double worst = 0.0;
  for (const auto& m : tr.monitors) worst = std::min({worst, m.min_u, m.min_v});
  ck.require(worst >= -1e-12, "negative overshoot beyond -1e-12");

  const Field vz = constant_field(s.ring, Region::Omega1, 0.0);
  EvolutionConfig short_cfg;
  short_cfg.t_final = 5.0;
  const Trajectory tz = evolve(s.ring, p, u0, vz, short_cfg);
  ck.require(tz.v_final.values.lpNorm<Eigen::Infinity>() == 0.0,
             "v == 0 invariance is not exact");
  return {10, "Evolution agrees with the steady solver", ck.pass, ck.details.str()};
}

CriterionResult criterion11(Suite& s) {
  Checker ck;
  std::mt19937_64 rng(616);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  double worst = 0.0;
  for (const Grid* g : {&s.ring, &s.rect}) {
    ModelParams p;
    p.lambda = 1.1;
    p.mu = 1.7;
    p.b = 1.2;
    p.c = 0.8;
    p.alpha = 1.9;
    const int n = g->num_nodes();
    const int n1 = g->region_size(Region::Omega1);
    for (int st = 0; st < 20; ++st) {
      for (SteadyKind kind : {SteadyKind::sp2, SteadyKind::lp2}) {
        Field u = constant_field(*g, Region::Omega, 0.0);
        Field v = constant_field(*g, Region::Omega1, 0.0);
        for (int i = 0; i < n; ++i) u.values[i] = p.lambda * unif(rng);
        for (int i = 0; i < n1; ++i) v.values[i] = 1.6 * unif(rng);
        Eigen::VectorXd dir(n + n1);
        for (int i = 0; i < dir.size(); ++i) dir[i] = normal(rng);
        dir /= dir.lpNorm<Eigen::Infinity>();
        const double eps = 1e-6 * (1.0 + std::max(u.values.lpNorm<Eigen::Infinity>(),
                                                  v.values.lpNorm<Eigen::Infinity>()));
        auto eval = [&](double sign) {
          Field up = u, vp = v;
          up.values += sign * eps * dir.head(n);
          vp.values += sign * eps * dir.tail(n1);
          const auto r = kind == SteadyKind::sp2 ? residual_sp2(*g, p, up, vp)
                                                 : residual_lp2(*g, p, up, vp);
          Eigen::VectorXd out(n + n1);
          out << r.first.values, r.second.values;
          return out;
        };
        const Eigen::VectorXd fd = (eval(1.0) - eval(-1.0)) / (2.0 * eps);
        const Eigen::SparseMatrix<double> j = kind == SteadyKind::sp2
                                                  ? jacobian_sp2(*g, p, u, v)
                                                  : jacobian_lp2(*g, p, u, v);
        const double rel = ((j * dir) - fd).lpNorm<Eigen::Infinity>() /
                           std::max(1.0, fd.lpNorm<Eigen::Infinity>());
        worst = std::max(worst, rel);
      }
    }
  }
  ck.require(worst <= 1e-6, "finite-difference mismatch above 1e-6");
  ck.note("worst_rel_err", worst);
  return {11, "Analytic Jacobians match central differences", ck.pass, ck.details.str()};
}

CriterionResult criterion12(Suite& s) {
  Checker ck;
  const Grid small_ring = build_grid(ring_fixture(64));
  const Grid small_rect = build_grid(rect_fixture(32, 16));
  double worst = 0.0;
  for (const Grid* g : {&small_ring, &small_rect}) {
    const SparseOperator lap = neumann_laplacian(*g, Region::Omega);
    for (double mu : {0.0, 0.5, 2.0, 10.0}) {
      Field q = indicator_omega1(*g);
      q.values *= s.b * mu;
      worst = std::max(worst, std::abs(principal_eigen(lap, q).value -
                                       dense_smallest_eigenvalue(lap, q)));
    }
    const SparseOperator dlap = dirichlet_laplacian_refuge(*g);
    const Field q0 = constant_field(*g, Region::Omega0, 0.0);
    worst = std::max(worst, std::abs(principal_eigen(dlap, q0).value -
                                     dense_smallest_eigenvalue(dlap, q0)));
  }
  ck.require(worst <= 1e-8, "eigenvalues disagree with the dense oracle");
  ck.note("worst_eigen_gap", worst);

  // ell via bisection vs a brute-force scan for the K sign change
  const double mu = 3.0, alpha = 2.0;
  const double from_bisection = ell(small_ring, mu, alpha, s.b, s.c);
  double bracket_lo = 0.0;
  for (double l = 1e-3; l < 2.0; l += 1e-3) {
    if (K_eval(small_ring, l, mu, alpha, s.b, s.c) > 0.0) {
      bracket_lo = l - 1e-3;
      break;
    }
  }
  double from_scan = -1.0;
  for (double l = bracket_lo; l < bracket_lo + 2e-3; l += 1e-6) {
    if (K_eval(small_ring, l, mu, alpha, s.b, s.c) > 0.0) {
      from_scan = l - 0.5e-6;
      break;
    }
  }
  ck.require(from_scan > 0.0, "scan found no sign change");
  ck.require(std::abs(from_bisection - from_scan) <= 1e-6,
             "bisection and scan disagree beyond 1e-6");
  ck.note("ell_gap", std::abs(from_bisection - from_scan));
  return {12, "Oracle equivalence (dense eigensolver, ell scan)", ck.pass,
          ck.details.str()};
}

}  // namespace

AcceptanceReport run_acceptance(std::ostream& log) {
  Suite s;
  AcceptanceReport report;
  using Fn = CriterionResult (*)(Suite&);
  // criterion 7 audits every positive solution the others produced, so it runs last
  const std::pair<int, Fn> order[] = {
      {1, criterion1},   {2, criterion2},   {3, criterion3},   {4, criterion4},
      {5, criterion5},   {6, criterion6},   {8, criterion8},   {9, criterion9},
      {10, criterion10}, {11, criterion11}, {12, criterion12}, {7, criterion7},
  };
  for (const auto& [id, fn] : order) {
    log << "[ run  ] criterion " << id << "\n" << std::flush;
    report.results.push_back(fn(s));
  }
  std::sort(report.results.begin(), report.results.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  for (const auto& r : report.results) {
    log << (r.pass ? "[ PASS ] " : "[ FAIL ] ") << r.id << ". " << r.name;
    if (!r.details.empty()) log << "  (" << r.details << ")";
    log << "\n";
  }
  log << (report.all_pass() ? "acceptance: all criteria passed\n"
                            : "acceptance: FAILURES present\n");
  return report;
}

}  // namespace refugia
