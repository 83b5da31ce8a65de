#include "refugia/steady.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <random>

#include "refugia/parallel.hpp"

namespace refugia {

void ModelParams::validate() const {
  if (!(b > 0.0)) fail(Errc::validation_error, "b must be positive");
  if (!(c > 0.0)) fail(Errc::validation_error, "c must be positive");
  if (!(alpha >= 0.0)) fail(Errc::validation_error, "alpha must be nonnegative");
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// v-equation nonlinearity of the substituted system and its partials:
//   g(u, v) = v h / (1 + alpha u),  h = alpha u (lambda - u - b v) + mu + c u - v
struct Sp2Reaction {
  double lambda, mu, b, c, alpha;
  double h(double u, double v) const {
    return alpha * u * (lambda - u - b * v) + mu + c * u - v;
  }
  double g(double u, double v) const { return v * h(u, v) / (1.0 + alpha * u); }
  double dg_du(double u, double v) const {
    const double den = 1.0 + alpha * u;
    const double hu = alpha * (lambda - 2.0 * u - b * v) + c;
    return v * (hu * den - alpha * h(u, v)) / (den * den);
  }
  double dg_dv(double u, double v) const {
    const double hv = -alpha * b * u - 1.0;
    return (h(u, v) + v * hv) / (1.0 + alpha * u);
  }
  double dg_dlambda(double u, double v) const {
    return v * alpha * u / (1.0 + alpha * u);
  }
};

// Limit-system analog: g(w, v) = v h / (1 + w), h = w (lambda - b v) + mu - v
struct Lp2Reaction {
  double lambda, mu, b;
  double h(double w, double v) const { return w * (lambda - b * v) + mu - v; }
  double g(double w, double v) const { return v * h(w, v) / (1.0 + w); }
  double dg_dw(double w, double v) const {
    const double den = 1.0 + w;
    return v * ((lambda - b * v) * den - h(w, v)) / (den * den);
  }
  double dg_dv(double w, double v) const {
    return (h(w, v) + v * (-b * w - 1.0)) / (1.0 + w);
  }
  double dg_dlambda(double w, double v) const { return v * w / (1.0 + w); }
};

void check_state(const Grid& grid, const Field& u, const Field& v) {
  check_field(grid, u, Region::Omega);
  check_field(grid, v, Region::Omega1);
}

void check_denominator_sp2(const Grid& grid, const ModelParams& p, const Field& u) {
  if (p.alpha == 0.0) return;
  for (int node : grid.omega1_nodes)
    if (1.0 + p.alpha * u.values[node] <= 0.0)
      fail(Errc::degenerate_denominator, "1 + alpha u lost positivity on Omega1");
}

void check_denominator_lp2(const Field& w) {
  for (int i = 0; i < w.values.size(); ++i)
    if (1.0 + w.values[i] <= 0.0)
      fail(Errc::degenerate_denominator, "1 + w lost positivity");
}

}  // namespace

std::pair<Field, Field> residual_sp2(const Grid& grid, const ModelParams& p, const Field& u,
                                     const Field& v) {
  check_state(grid, u, v);
  check_denominator_sp2(grid, p, u);
  const Field vext = extend_by_zero(grid, v);
  Field ru = neumann_laplacian(grid, Region::Omega).apply(u);
  for (int i = 0; i < grid.num_nodes(); ++i)
    ru.values[i] += u.values[i] * (p.lambda - u.values[i] - p.b * vext.values[i]);

  Field rv = neumann_laplacian(grid, Region::Omega1).apply(v);
  const Sp2Reaction re{p.lambda, p.mu, p.b, p.c, p.alpha};
  for (size_t k = 0; k < grid.omega1_nodes.size(); ++k)
    rv.values[k] += re.g(u.values[grid.omega1_nodes[k]], v.values[k]);
  return {std::move(ru), std::move(rv)};
}

std::pair<Field, Field> residual_sp_raw(const Grid& grid, const ModelParams& p,
                                        const Field& u, const Field& v) {
  check_state(grid, u, v);
  const Field vext = extend_by_zero(grid, v);
  Field ru = neumann_laplacian(grid, Region::Omega).apply(u);
  for (int i = 0; i < grid.num_nodes(); ++i)
    ru.values[i] += u.values[i] * (p.lambda - u.values[i] - p.b * vext.values[i]);

  const Field lap_u = restrict_to(grid, neumann_laplacian(grid, Region::Omega).apply(u),
                                  Region::Omega1);
  const Field lap_v = neumann_laplacian(grid, Region::Omega1).apply(v);
  Field rv = lap_v;
  for (size_t k = 0; k < grid.omega1_nodes.size(); ++k) {
    const double uk = u.values[grid.omega1_nodes[k]];
    rv.values[k] += p.alpha * (uk * lap_v.values[k] - v.values[k] * lap_u.values[k]) +
                    v.values[k] * (p.mu + p.c * uk - v.values[k]);
  }
  return {std::move(ru), std::move(rv)};
}

std::pair<Field, Field> residual_lp2(const Grid& grid, const ModelParams& p, const Field& w,
                                     const Field& v) {
  check_state(grid, w, v);
  check_denominator_lp2(w);
  const Field vext = extend_by_zero(grid, v);
  Field rw = neumann_laplacian(grid, Region::Omega).apply(w);
  for (int i = 0; i < grid.num_nodes(); ++i)
    rw.values[i] += w.values[i] * (p.lambda - p.b * vext.values[i]);

  Field rv = neumann_laplacian(grid, Region::Omega1).apply(v);
  const Lp2Reaction re{p.lambda, p.mu, p.b};
  for (size_t k = 0; k < grid.omega1_nodes.size(); ++k)
    rv.values[k] += re.g(w.values[grid.omega1_nodes[k]], v.values[k]);
  return {std::move(rw), std::move(rv)};
}

namespace {

// assembles [du-block, dv-block; dvu-block, dvv-block] for either system
template <class DiagUU, class DiagUV, class DiagVU, class DiagVV>
SpMat assemble_jacobian(const Grid& grid, DiagUU duu, DiagUV duv, DiagVU dvu, DiagVV dvv) {
  const int n = grid.num_nodes();
  const int n1 = grid.region_size(Region::Omega1);
  const SpMat lu = neumann_laplacian(grid, Region::Omega).pointwise_matrix();
  const SpMat lv = neumann_laplacian(grid, Region::Omega1).pointwise_matrix();
  std::vector<Triplet> t;
  t.reserve(lu.nonZeros() + lv.nonZeros() + n + 3 * n1);
  for (int k = 0; k < lu.outerSize(); ++k)
    for (SpMat::InnerIterator it(lu, k); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < lv.outerSize(); ++k)
    for (SpMat::InnerIterator it(lv, k); it; ++it)
      t.emplace_back(n + it.row(), n + it.col(), it.value());
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, duu(i));
  for (int k = 0; k < n1; ++k) {
    const int node = grid.omega1_nodes[k];
    t.emplace_back(node, n + k, duv(k));
    t.emplace_back(n + k, node, dvu(k));
    t.emplace_back(n + k, n + k, dvv(k));
  }
  SpMat j(n + n1, n + n1);
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

}  // namespace

Eigen::SparseMatrix<double> jacobian_sp2(const Grid& grid, const ModelParams& p,
                                         const Field& u, const Field& v) {
  check_state(grid, u, v);
  check_denominator_sp2(grid, p, u);
  const Field vext = extend_by_zero(grid, v);
  const Sp2Reaction re{p.lambda, p.mu, p.b, p.c, p.alpha};
  return assemble_jacobian(
      grid,
      [&](int i) { return p.lambda - 2.0 * u.values[i] - p.b * vext.values[i]; },
      [&](int k) { return -p.b * u.values[grid.omega1_nodes[k]]; },
      [&](int k) { return re.dg_du(u.values[grid.omega1_nodes[k]], v.values[k]); },
      [&](int k) { return re.dg_dv(u.values[grid.omega1_nodes[k]], v.values[k]); });
}

Eigen::SparseMatrix<double> jacobian_lp2(const Grid& grid, const ModelParams& p,
                                         const Field& w, const Field& v) {
  check_state(grid, w, v);
  check_denominator_lp2(w);
  const Field vext = extend_by_zero(grid, v);
  const Lp2Reaction re{p.lambda, p.mu, p.b};
  return assemble_jacobian(
      grid, [&](int i) { return p.lambda - p.b * vext.values[i]; },
      [&](int k) { return -p.b * w.values[grid.omega1_nodes[k]]; },
      [&](int k) { return re.dg_dw(w.values[grid.omega1_nodes[k]], v.values[k]); },
      [&](int k) { return re.dg_dv(w.values[grid.omega1_nodes[k]], v.values[k]); });
}

std::pair<Field, Field> dresidual_dlambda(const Grid& grid, const ModelParams& p,
                                          const Field& u, const Field& v, SteadyKind kind) {
  check_state(grid, u, v);
  Field du = u;  // dRu/dlambda = u for both systems
  Field dv = constant_field(grid, Region::Omega1, 0.0);
  if (kind == SteadyKind::sp2) {
    const Sp2Reaction re{p.lambda, p.mu, p.b, p.c, p.alpha};
    for (size_t k = 0; k < grid.omega1_nodes.size(); ++k)
      dv.values[k] = re.dg_dlambda(u.values[grid.omega1_nodes[k]], v.values[k]);
  } else {
    const Lp2Reaction re{p.lambda, p.mu, p.b};
    for (size_t k = 0; k < grid.omega1_nodes.size(); ++k)
      dv.values[k] = re.dg_dlambda(u.values[grid.omega1_nodes[k]], v.values[k]);
  }
  return {std::move(du), std::move(dv)};
}

namespace {

double stacked_inf_norm(const std::pair<Field, Field>& r) {
  return std::max(r.first.values.lpNorm<Eigen::Infinity>(),
                  r.second.values.lpNorm<Eigen::Infinity>());
}

double stacked_l2_norm(const std::pair<Field, Field>& r) {
  return std::sqrt(r.first.values.squaredNorm() + r.second.values.squaredNorm());
}

std::pair<Field, Field> eval_residual(const Grid& grid, const ModelParams& p, const Field& u,
                                      const Field& v, SteadyKind kind) {
  return kind == SteadyKind::sp2 ? residual_sp2(grid, p, u, v) : residual_lp2(grid, p, u, v);
}

void finish_state(const Grid& grid, const ModelParams& p, SteadyState& st, SteadyKind kind) {
  const auto r = eval_residual(grid, p, st.u, st.v, kind);
  st.residual_norm = stacked_inf_norm(r);
  st.u_positive = component_strictly_positive(st.u.values);
  st.v_positive = component_strictly_positive(st.v.values);
  if (kind == SteadyKind::sp2) {
    const auto ids = integral_identities(grid, p, st);
    st.identity_u = ids.first;
    st.identity_v = ids.second;
  }
}

}  // namespace

SteadyState newton_solve(const Grid& grid, const ModelParams& p, const Field& u0,
                         const Field& v0, const NewtonConfig& cfg, SteadyKind kind) {
  p.validate();
  check_state(grid, u0, v0);
  const int n = grid.num_nodes();
  const int n1 = grid.region_size(Region::Omega1);

  Field u = u0, v = v0;
  auto res = eval_residual(grid, p, u, v, kind);
  double rnorm2 = stacked_l2_norm(res);

  SteadyState st;
  st.params = p;
  for (int it = 0; it < cfg.max_iter; ++it) {
    // tolerance scales with the state amplitude: the discrete Laplacian
    // amplifies round-off by |state|/h^2, which dwarfs any absolute target
    // on the blow-up branch of the limit system
    const double tol_eff =
        cfg.tol * (1.0 + u.values.lpNorm<Eigen::Infinity>() +
                   v.values.lpNorm<Eigen::Infinity>());
    if (stacked_inf_norm(res) <= tol_eff) {
      st.u = std::move(u);
      st.v = std::move(v);
      st.iterations = it;
      st.converged = true;
      finish_state(grid, p, st, kind);
      return st;
    }
    const SpMat j = kind == SteadyKind::sp2 ? jacobian_sp2(grid, p, u, v)
                                            : jacobian_lp2(grid, p, u, v);
    Eigen::SparseLU<SpMat> lu(j);
    if (lu.info() != Eigen::Success)
      fail(Errc::solve_failure, "Newton Jacobian factorization failed");
    Eigen::VectorXd rhs(n + n1);
    rhs.head(n) = -res.first.values;
    rhs.tail(n1) = -res.second.values;
    const Eigen::VectorXd step = lu.solve(rhs);
    if (!step.allFinite()) fail(Errc::solve_failure, "Newton step is non-finite");

    // backtracking on the l2 residual; degenerate evaluations count as +inf
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt, t *= 0.5) {
      Field ut = u, vt = v;
      ut.values += t * step.head(n);
      vt.values += t * step.tail(n1);
      double cand_norm = std::numeric_limits<double>::infinity();
      std::pair<Field, Field> cand;
      try {
        cand = eval_residual(grid, p, ut, vt, kind);
        cand_norm = stacked_l2_norm(cand);
      } catch (const Error&) {
      }
      if (cand_norm < (1.0 - 1e-4 * t) * rnorm2) {
        u = std::move(ut);
        v = std::move(vt);
        res = std::move(cand);
        rnorm2 = cand_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      fail(Errc::max_iterations, "Newton line search made no progress");
  }
  fail(Errc::max_iterations, "Newton did not converge in " + std::to_string(cfg.max_iter) +
                                 " iterations");
}

std::optional<SteadyState> try_newton_solve(const Grid& grid, const ModelParams& p,
                                            const Field& u0, const Field& v0,
                                            const NewtonConfig& cfg, SteadyKind kind) {
  try {
    return newton_solve(grid, p, u0, v0, cfg, kind);
  } catch (const Error&) {
    return std::nullopt;
  }
}

SteadyState semitrivial(const Grid& grid, Semitrivial which, const ModelParams& p) {
  p.validate();
  SteadyState st;
  st.params = p;
  if (which == Semitrivial::prey_only) {
    if (p.lambda <= 0.0) fail(Errc::bad_parameter, "prey-only state needs lambda > 0");
    st.u = constant_field(grid, Region::Omega, p.lambda);
    st.v = constant_field(grid, Region::Omega1, 0.0);
  } else {
    if (p.mu <= 0.0) fail(Errc::bad_parameter, "predator-only state needs mu > 0");
    st.u = constant_field(grid, Region::Omega, 0.0);
    st.v = constant_field(grid, Region::Omega1, p.mu);
  }
  st.converged = true;
  finish_state(grid, p, st, SteadyKind::sp2);
  return st;
}

std::pair<double, double> integral_identities(const Grid& grid, const ModelParams& p,
                                              const SteadyState& state) {
  const Field vext = extend_by_zero(grid, state.v);
  Field fu = constant_field(grid, Region::Omega, 0.0);
  for (int i = 0; i < grid.num_nodes(); ++i)
    fu.values[i] =
        state.u.values[i] * (p.lambda - state.u.values[i] - p.b * vext.values[i]);
  Field fv = constant_field(grid, Region::Omega1, 0.0);
  const Sp2Reaction re{p.lambda, p.mu, p.b, p.c, p.alpha};
  for (size_t k = 0; k < grid.omega1_nodes.size(); ++k)
    fv.values[k] = re.g(state.u.values[grid.omega1_nodes[k]], state.v.values[k]);
  return {integrate(grid, fu), integrate(grid, fv)};
}

AprioriBox apriori_box(const ModelParams& p) {
  return {p.lambda, std::max(p.lambda / p.b, p.mu + p.c * p.lambda)};
}

std::pair<Field, Field> multistart_initial(const Grid& grid, const ModelParams& p,
                                           std::uint64_t seed, int index, int total) {
  const AprioriBox box = apriori_box(p);
  const double vmax = box.v_max > 0.0 ? box.v_max : box.u_max / p.b;
  // latin hypercube in the two constant levels, decorrelated strata
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(index));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double su = (index % total + unif(rng)) / total;
  const double sv = ((index * 7919 + 13) % total + unif(rng)) / total;
  const double cu = box.u_max * (0.05 + 0.9 * su);
  const double cv = vmax * (0.05 + 0.9 * sv);
  Field u = constant_field(grid, Region::Omega, 0.0);
  Field v = constant_field(grid, Region::Omega1, 0.0);
  for (int i = 0; i < u.values.size(); ++i)
    u.values[i] = cu * (1.0 + 0.2 * (2.0 * unif(rng) - 1.0));
  for (int i = 0; i < v.values.size(); ++i)
    v.values[i] = cv * (1.0 + 0.2 * (2.0 * unif(rng) - 1.0));
  return {std::move(u), std::move(v)};
}

std::vector<SteadyState> multistart_newton(const Grid& grid, const ModelParams& p,
                                           int n_starts, std::uint64_t seed,
                                           const NewtonConfig& cfg, SteadyKind kind) {
  std::vector<std::optional<SteadyState>> slots(n_starts);
  parallel_for(n_starts, [&](int i) {
    auto init = multistart_initial(grid, p, seed, i, n_starts);
    slots[i] = try_newton_solve(grid, p, init.first, init.second, cfg, kind);
  });
  std::vector<SteadyState> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

double state_distance_inf(const SteadyState& a, const SteadyState& b) {
  return std::max((a.u.values - b.u.values).lpNorm<Eigen::Infinity>(),
                  (a.v.values - b.v.values).lpNorm<Eigen::Infinity>());
}

std::vector<SteadyState> distinct_states(const std::vector<SteadyState>& states, double tol) {
  std::vector<SteadyState> out;
  for (const auto& s : states) {
    bool dup = false;
    for (const auto& kept : out)
      if (state_distance_inf(s, kept) <= tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(s);
  }
  return out;
}

}  // namespace refugia
