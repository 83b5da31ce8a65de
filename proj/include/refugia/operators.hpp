#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <map>
#include <memory>
#include <mutex>

#include "refugia/geometry.hpp"

namespace refugia {

enum class Bc { neumann, dirichlet };

// Discrete elliptic operator over one region, kept in weighted symmetric form:
// sym = W * (-L) where L is the named differential operator and W the diagonal
// of cell weights. For Neumann closures sym is PSD with constants in the
// kernel; the refuge Dirichlet closure makes it PD. Shifted factorizations are
// cached per shift; apply() is read-only and safe to share across threads.
class SparseOperator {
public:
  SparseOperator(Region region, Eigen::SparseMatrix<double> sym, Eigen::VectorXd weights,
                 bool symmetric = true);

  Region region() const { return region_; }
  int size() const { return static_cast<int>(weights_.size()); }
  const Eigen::SparseMatrix<double>& weighted_matrix() const { return sym_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  bool symmetric() const { return symmetric_; }

  /// Pointwise action of the named operator: returns L f (e.g. Laplacian of f).
  Field apply(const Field& f) const;

  /// Matrix of the pointwise action L (rows scaled by 1/w); not symmetric on
  /// nonuniform grids. Used to assemble Newton systems.
  Eigen::SparseMatrix<double> pointwise_matrix() const;

  /// Solves (-L + m) x = rhs for m > 0 (or m >= 0 when the operator is PD).
  Field solve_shifted(double m, const Field& rhs) const;

  /// Energy inner product f^T sym g = <-L f, g>_w.
  double quadratic_form(const Field& f, const Field& g) const;

private:
  using Factorization = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;
  const Factorization& factorization(double shift) const;

  struct FactorCache {
    std::mutex mutex;
    std::map<double, std::shared_ptr<Factorization>> entries;
  };

  Region region_;
  Eigen::SparseMatrix<double> sym_;
  Eigen::VectorXd weights_;
  bool symmetric_;
  std::unique_ptr<FactorCache> cache_ = std::make_unique<FactorCache>();
};

/// Laplacian on Omega or Omega1 with zero-flux closures: the outer boundary is
/// natural Neumann and, for Omega1, the faces toward Omega0 are walls (the
/// normal on the interface points from Omega1 into Omega0).
SparseOperator neumann_laplacian(const Grid& grid, Region region);

/// -Laplacian on the refuge with homogeneous Dirichlet data on its boundary
/// faces; positive definite. Sign convention: apply() returns Laplacian f.
SparseOperator dirichlet_laplacian_refuge(const Grid& grid);

/// Divergence-form operator div(a grad .) on Omega1 with harmonic face
/// averaging of the coefficient; reduces to neumann_laplacian(Omega1) at a==1.
SparseOperator divergence_form(const Grid& grid, const Field& a);

/// The directed-flux contribution -div(v grad u) sampled on Omega1, in
/// conservative flux form with zero-flux interface walls (the caller applies
/// the strength alpha). Its integral over Omega1 telescopes to zero.
Field advective_term(const Grid& grid, const Field& v, const Field& u);

/// (-Laplacian + m)^{-1} rhs on a Neumann region, m > 0.
Field shifted_inverse(const Grid& grid, Region region, double m, const Field& rhs);

/// Zero-mean inverse of -Laplacian on a Neumann region: the right-hand side is
/// projected onto zero weighted mean and the representative with zero mean is
/// returned.
Field mean_zero_inverse(const Grid& grid, Region region, const Field& rhs);

/// Matrix-market export of the weighted symmetric matrix, for debugging.
void export_matrix_market(const SparseOperator& op, const std::string& path);

}  // namespace refugia
