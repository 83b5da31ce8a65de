#include "refugia/operators.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace refugia {

namespace {

using Triplet = Eigen::Triplet<double>;

Eigen::VectorXd region_weights(const Grid& grid, Region r) {
  if (r == Region::Omega) return grid.weight;
  const auto& nodes = grid.region_nodes(r);
  Eigen::VectorXd w(nodes.size());
  for (size_t k = 0; k < nodes.size(); ++k) w[k] = grid.weight[nodes[k]];
  return w;
}

// local index of a node within region r, -1 if outside
int local_index(const Grid& grid, Region r, int node) {
  switch (r) {
    case Region::Omega: return node;
    case Region::Omega0: return grid.to_omega0[node];
    case Region::Omega1: return grid.to_omega1[node];
  }
  return -1;
}

void add_face(std::vector<Triplet>& t, int a, int b, double trans) {
  t.emplace_back(a, a, trans);
  t.emplace_back(b, b, trans);
  t.emplace_back(a, b, -trans);
  t.emplace_back(b, a, -trans);
}

}  // namespace

SparseOperator::SparseOperator(Region region, Eigen::SparseMatrix<double> sym,
                               Eigen::VectorXd weights, bool symmetric)
    : region_(region), sym_(std::move(sym)), weights_(std::move(weights)),
      symmetric_(symmetric) {}

Field SparseOperator::apply(const Field& f) const {
  if (f.region != region_ || f.values.size() != size())
    fail(Errc::region_mismatch, "operator/field region mismatch");
  Field out;
  out.region = region_;
  out.values = -(sym_ * f.values).cwiseQuotient(weights_);
  return out;
}

Eigen::SparseMatrix<double> SparseOperator::pointwise_matrix() const {
  Eigen::SparseMatrix<double> m = sym_;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      it.valueRef() = -it.value() / weights_[it.row()];
  return m;
}

const SparseOperator::Factorization& SparseOperator::factorization(double shift) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->entries.find(shift);
  if (it != cache_->entries.end()) return *it->second;
  Eigen::SparseMatrix<double> m = sym_;
  if (shift != 0.0) {
    Eigen::SparseMatrix<double> d(size(), size());
    std::vector<Triplet> t;
    t.reserve(size());
    for (int i = 0; i < size(); ++i) t.emplace_back(i, i, shift * weights_[i]);
    d.setFromTriplets(t.begin(), t.end());
    m += d;
  }
  auto fac = std::make_shared<Factorization>();
  fac->compute(m);
  if (fac->info() != Eigen::Success)
    fail(Errc::solve_failure, "LDLT factorization failed at shift " + std::to_string(shift));
  cache_->entries[shift] = fac;
  return *cache_->entries[shift];
}

Field SparseOperator::solve_shifted(double m, const Field& rhs) const {
  if (rhs.region != region_ || rhs.values.size() != size())
    fail(Errc::region_mismatch, "operator/rhs region mismatch");
  if (m <= 0.0 && region_ != Region::Omega0)
    fail(Errc::bad_parameter, "shifted solve needs a positive shift on Neumann regions");
  const auto& fac = factorization(m);
  Field out;
  out.region = region_;
  out.values = fac.solve(weights_.cwiseProduct(rhs.values));
  if (!out.values.allFinite()) fail(Errc::solve_failure, "shifted solve returned non-finite values");
  return out;
}

double SparseOperator::quadratic_form(const Field& f, const Field& g) const {
  return f.values.dot(sym_ * g.values);
}

SparseOperator neumann_laplacian(const Grid& grid, Region region) {
  if (region == Region::Omega0)
    fail(Errc::region_mismatch, "Neumann Laplacian is assembled on Omega or Omega1");
  const int n = grid.region_size(region);
  std::vector<Triplet> t;
  t.reserve(grid.faces.size() * 4);
  for (const auto& f : grid.faces) {
    const int a = local_index(grid, region, f.a);
    const int b = local_index(grid, region, f.b);
    if (a < 0 || b < 0) continue;  // interface faces become zero-flux walls
    add_face(t, a, b, f.area / f.dist);
  }
  Eigen::SparseMatrix<double> sym(n, n);
  sym.setFromTriplets(t.begin(), t.end());
  return SparseOperator(region, std::move(sym), region_weights(grid, region));
}

SparseOperator dirichlet_laplacian_refuge(const Grid& grid) {
  const int n = grid.region_size(Region::Omega0);
  if (n == 0) fail(Errc::empty_refuge, "refuge has no nodes");
  std::vector<Triplet> t;
  for (const auto& f : grid.faces) {
    const int a = grid.to_omega0[f.a];
    const int b = grid.to_omega0[f.b];
    if (a >= 0 && b >= 0) {
      add_face(t, a, b, f.area / f.dist);
    } else if (a >= 0 || b >= 0) {
      // boundary face: homogeneous value at the face, half-cell distance
      const int inside = a >= 0 ? a : b;
      const double d = a >= 0 ? f.da : f.db;
      t.emplace_back(inside, inside, f.area / d);
    }
  }
  Eigen::SparseMatrix<double> sym(n, n);
  sym.setFromTriplets(t.begin(), t.end());
  return SparseOperator(Region::Omega0, std::move(sym), region_weights(grid, Region::Omega0));
}

SparseOperator divergence_form(const Grid& grid, const Field& a) {
  check_field(grid, a, Region::Omega1);
  if (a.values.minCoeff() <= 0.0)
    fail(Errc::nonelliptic_coefficient, "coefficient must be positive nodewise");
  const int n = grid.region_size(Region::Omega1);
  std::vector<Triplet> t;
  for (const auto& f : grid.faces) {
    const int i = grid.to_omega1[f.a];
    const int j = grid.to_omega1[f.b];
    if (i < 0 || j < 0) continue;
    // distance-weighted harmonic mean of the coefficient at the face
    const double af = f.dist / (f.da / a.values[i] + f.db / a.values[j]);
    add_face(t, i, j, f.area * af / f.dist);
  }
  Eigen::SparseMatrix<double> sym(n, n);
  sym.setFromTriplets(t.begin(), t.end());
  return SparseOperator(Region::Omega1, std::move(sym), region_weights(grid, Region::Omega1));
}

Field advective_term(const Grid& grid, const Field& v, const Field& u) {
  check_field(grid, v, Region::Omega1);
  check_field(grid, u, Region::Omega);
  Field out = constant_field(grid, Region::Omega1, 0.0);
  for (const auto& f : grid.faces) {
    const int i = grid.to_omega1[f.a];
    const int j = grid.to_omega1[f.b];
    if (i < 0 || j < 0) continue;
    // face value of v by distance-weighted interpolation, gradient of u across
    const double vf = (v.values[i] * f.db + v.values[j] * f.da) / f.dist;
    const double flux = f.area * vf * (u.values[f.b] - u.values[f.a]) / f.dist;
    out.values[i] -= flux / grid.weight[f.a];
    out.values[j] += flux / grid.weight[f.b];
  }
  // out now holds -div(v grad u): outgoing minus incoming flux per cell
  return out;
}

Field shifted_inverse(const Grid& grid, Region region, double m, const Field& rhs) {
  if (m <= 0.0) fail(Errc::bad_parameter, "shift must be positive");
  return neumann_laplacian(grid, region).solve_shifted(m, rhs);
}

Field mean_zero_inverse(const Grid& grid, Region region, const Field& rhs) {
  if (rhs.region != region || rhs.values.size() != grid.region_size(region))
    fail(Errc::region_mismatch, "rhs region mismatch");
  SparseOperator lap = neumann_laplacian(grid, region);
  const Eigen::VectorXd& w = lap.weights();
  const double vol = w.sum();
  Eigen::VectorXd r = rhs.values;
  r.array() -= w.dot(r) / vol;  // project out the mean

  // The weighted -Laplacian is singular with constants in the kernel. Pinning
  // one node (zero its row/column, unit diagonal) leaves a PD system whose
  // solution solves the original equations for mean-zero data; the zero-mean
  // representative is recovered by subtracting the weighted mean.
  Eigen::SparseMatrix<double> m = lap.weighted_matrix();
  Eigen::VectorXd b = w.cwiseProduct(r);
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (it.row() == 0 || it.col() == 0) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
    }
  m.prune(0.0);
  b[0] = 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fac(m);
  if (fac.info() != Eigen::Success)
    fail(Errc::solve_failure, "mean-zero inverse factorization failed");
  Eigen::VectorXd x = fac.solve(b);
  x.array() -= w.dot(x) / vol;
  Field out;
  out.region = region;
  out.values = std::move(x);
  return out;
}

void export_matrix_market(const SparseOperator& op, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::validation_error, "cannot open " + path);
  const auto& m = op.weighted_matrix();
  out << "%%MatrixMarket matrix coordinate real "
      << (op.symmetric() ? "symmetric" : "general") << "\n";
  int count = 0;
  char buf[128];
  std::string body;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (op.symmetric() && it.row() < it.col()) continue;
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                    static_cast<int>(it.col()) + 1, it.value());
      body += buf;
      ++count;
    }
  out << m.rows() << " " << m.cols() << " " << count << "\n" << body;
}

}  // namespace refugia
