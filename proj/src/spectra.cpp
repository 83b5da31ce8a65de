#include "refugia/spectra.hpp"

#include <cmath>

namespace refugia {

namespace {

// solve (sym + (q - shift) W) x = W b by LDLT; factorization owned locally
struct ShiftedSolver {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac;
  bool ok = false;

  void compute(const Eigen::SparseMatrix<double>& sym, const Eigen::VectorXd& w,
               const Eigen::VectorXd& q, double shift) {
    Eigen::SparseMatrix<double> m = sym;
    Eigen::VectorXd d = w.array() * (q.array() - shift);
    Eigen::SparseMatrix<double> diag(w.size(), w.size());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(w.size());
    for (int i = 0; i < w.size(); ++i) t.emplace_back(i, i, d[i]);
    diag.setFromTriplets(t.begin(), t.end());
    m += diag;
    fac.compute(m);
    ok = fac.info() == Eigen::Success;
  }
};

}  // namespace

EigenResult principal_eigen(const SparseOperator& lap, const Field& q) {
  if (q.region != lap.region() || q.values.size() != lap.size())
    fail(Errc::region_mismatch, "potential region mismatch");
  const auto& sym = lap.weighted_matrix();
  const Eigen::VectorXd& w = lap.weights();
  const int n = lap.size();

  auto w_norm = [&](const Eigen::VectorXd& x) { return std::sqrt(x.dot(w.cwiseProduct(x))); };
  auto rayleigh = [&](const Eigen::VectorXd& x) {
    return (x.dot(sym * x) + x.dot(w.cwiseProduct(q.values).cwiseProduct(x))) /
           x.dot(w.cwiseProduct(x));
  };
  // pointwise residual of (-Lap + q) x = sigma x
  auto residual_inf = [&](const Eigen::VectorXd& x, double sigma) {
    Eigen::VectorXd r = (sym * x).cwiseQuotient(w) + q.values.cwiseProduct(x) - sigma * x;
    return r.lpNorm<Eigen::Infinity>();
  };

  const double qmin = q.values.minCoeff();
  // pointwise residual scale: the operator diagonal 1/h^2 dominates on fine
  // or graded meshes, the potential on stiff wells
  double diag_scale = 0.0;
  for (int i = 0; i < n; ++i) diag_scale = std::max(diag_scale, sym.coeff(i, i) / w[i]);
  const double qscale = 1.0 + q.values.lpNorm<Eigen::Infinity>() + diag_scale;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  x /= w_norm(x);

  double shift = qmin - 1.0;  // keeps sym + (q - shift) W positive definite
  ShiftedSolver solver;
  solver.compute(sym, w, q.values, shift);
  if (!solver.ok) fail(Errc::no_convergence, "initial eigensolver factorization failed");

  double sigma = rayleigh(x);
  const int max_iter = 200;
  const double tol = 1e-11;
  int it = 0;
  double res = residual_inf(x, sigma);
  for (; it < max_iter && res > tol * qscale; ++it) {
    Eigen::VectorXd y = solver.fac.solve(w.cwiseProduct(x));
    if (!y.allFinite()) fail(Errc::no_convergence, "eigensolver produced non-finite iterate");
    x = y / w_norm(y);
    sigma = rayleigh(x);
    res = residual_inf(x, sigma);
    // Rayleigh acceleration once the plain iteration has locked onto the
    // principal direction; refactor only while it still pays off
    if (it >= 2 && res > tol * qscale) {
      ShiftedSolver next;
      next.compute(sym, w, q.values, sigma - 1e-12 * qscale);
      if (next.ok) {
        Eigen::VectorXd z = next.fac.solve(w.cwiseProduct(x));
        if (z.allFinite() && w_norm(z) > 0.0) {
          Eigen::VectorXd cand = z / w_norm(z);
          const double cs = rayleigh(cand);
          if (residual_inf(cand, cs) < res) {
            x = cand;
            sigma = cs;
            res = residual_inf(x, sigma);
          }
        }
      }
    }
  }
  if (res > 1e-8 * qscale)
    fail(Errc::no_convergence, "eigen iteration stalled, residual " + std::to_string(res));

  if (x.sum() < 0.0) x = -x;  // principal eigenfunction has one sign
  // strict positivity up to round-off: under huge potentials the exact
  // eigenfunction decays below the representable range inside the well and
  // picks up solver noise there; genuine second modes carry O(1) negative mass
  if (x.minCoeff() < -1e-10 * x.maxCoeff())
    fail(Errc::no_convergence, "principal eigenfunction is not single-signed");

  EigenResult out;
  out.value = sigma;
  out.eigenfunction.region = lap.region();
  out.eigenfunction.values = std::move(x);
  out.residual = res;
  out.iterations = it;
  return out;
}

EigenResult principal_eigen(const Grid& grid, Region region, const Field& q, Bc bc) {
  if (bc == Bc::dirichlet) {
    if (region != Region::Omega0)
      fail(Errc::region_mismatch, "Dirichlet principal eigenvalue is for the refuge");
    return principal_eigen(dirichlet_laplacian_refuge(grid), q);
  }
  return principal_eigen(neumann_laplacian(grid, region), q);
}

double sigma1_curve(const Grid& grid, double b, double mu) {
  if (mu < 0.0) fail(Errc::bad_parameter, "sigma1 curve is defined for mu >= 0");
  Field q = indicator_omega1(grid);
  q.values *= b * mu;
  return principal_eigen(grid, Region::Omega, q, Bc::neumann).value;
}

double sigma1_dirichlet_refuge(const Grid& grid) {
  Field q = constant_field(grid, Region::Omega0, 0.0);
  return principal_eigen(grid, Region::Omega0, q, Bc::dirichlet).value;
}

EigenResult phi_star(const Grid& grid, double b, double mu) {
  if (mu <= 0.0) fail(Errc::bad_parameter, "phi_star needs mu > 0");
  Field q = indicator_omega1(grid);
  q.values *= b * mu;
  return principal_eigen(grid, Region::Omega, q, Bc::neumann);
}

Field psi_star(const Grid& grid, double mu, double b, double c, double alpha,
               const EigenResult& phi, const SparseOperator* lap_omega1) {
  if (mu <= 0.0) fail(Errc::bad_parameter, "psi_star needs mu > 0");
  Field rhs = restrict_to(grid, phi.eigenfunction, Region::Omega1);
  rhs.values *= mu * (alpha * (phi.value - b * mu) + c);
  if (lap_omega1) return lap_omega1->solve_shifted(mu, rhs);
  return shifted_inverse(grid, Region::Omega1, mu, rhs);
}

Field phi_lower_star(const Grid& grid, double b, double lambda) {
  if (lambda <= 0.0) fail(Errc::bad_parameter, "phi_lower_star needs lambda > 0");
  Field rhs = indicator_omega1(grid);
  rhs.values *= -b * lambda;
  return shifted_inverse(grid, Region::Omega, lambda, rhs);
}

}  // namespace refugia
