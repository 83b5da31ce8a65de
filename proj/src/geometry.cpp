#include "refugia/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>

#include <nlohmann/json.hpp>

namespace refugia {

const char* region_name(Region r) {
  switch (r) {
    case Region::Omega: return "Omega";
    case Region::Omega0: return "Omega0";
    case Region::Omega1: return "Omega1";
  }
  return "?";
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::refuge_touches_boundary: return "RefugeTouchesBoundary";
    case Errc::disconnected_complement: return "DisconnectedComplement";
    case Errc::region_mismatch: return "RegionMismatch";
    case Errc::empty_refuge: return "EmptyRefuge";
    case Errc::nonelliptic_coefficient: return "NonellipticCoefficient";
    case Errc::solve_failure: return "SolveFailure";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::out_of_regime: return "OutOfRegime";
    case Errc::no_sign_change: return "NoSignChange";
    case Errc::degenerate_denominator: return "DegenerateDenominator";
    case Errc::max_iterations: return "MaxIterations";
    case Errc::bad_parameter: return "BadParameter";
    case Errc::correction_failed: return "CorrectionFailed";
    case Errc::stall_at_fold: return "StallAtFold";
    case Errc::blowup_detected: return "BlowupDetected";
    case Errc::nonfinite_state: return "NonfiniteState";
    case Errc::solution_not_found: return "SolutionNotFound";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
  }
  return "Error";
}

int Grid::region_size(Region r) const {
  switch (r) {
    case Region::Omega: return num_nodes();
    case Region::Omega0: return static_cast<int>(omega0_nodes.size());
    case Region::Omega1: return static_cast<int>(omega1_nodes.size());
  }
  return 0;
}

const std::vector<int>& Grid::region_nodes(Region r) const {
  static const std::vector<int> empty;
  switch (r) {
    case Region::Omega0: return omega0_nodes;
    case Region::Omega1: return omega1_nodes;
    default: fail(Errc::region_mismatch, "region_nodes needs Omega0 or Omega1");
  }
  return empty;
}

namespace {

// Splits [0, len] segments into cell counts proportional to a target spacing.
int segment_cells(double seg_len, double target_h) {
  int n = static_cast<int>(std::lround(seg_len / target_h));
  return std::max(n, 1);
}

// Uniform partition of one axis segment; appends cell centers and widths.
void fill_segment(double a, double b, int cells, std::vector<double>& centers,
                  std::vector<double>& widths) {
  const double h = (b - a) / cells;
  for (int k = 0; k < cells; ++k) {
    centers.push_back(a + (k + 0.5) * h);
    widths.push_back(h);
  }
}

// Partition with geometric ladders of halved cells toward graded ends, a
// uniform bulk in between. Cell faces still align with the segment endpoints,
// so region measures stay exact.
void fill_segment_graded(double a, double b, int base_cells, int levels, bool grade_left,
                         bool grade_right, std::vector<double>& centers,
                         std::vector<double>& widths) {
  if (levels <= 0 || (!grade_left && !grade_right)) {
    fill_segment(a, b, base_cells, centers, widths);
    return;
  }
  const double h0 = (b - a) / base_cells;
  std::vector<double> ladder(levels);  // coarse to fine
  double ladder_len = 0.0;
  for (int k = 0; k < levels; ++k) {
    ladder[k] = h0 / static_cast<double>(1 << (k + 1));
    ladder_len += ladder[k];
  }
  double bulk = (b - a) - ladder_len * ((grade_left ? 1 : 0) + (grade_right ? 1 : 0));
  int bulk_cells = std::max(1, static_cast<int>(std::lround(bulk / h0)));
  if (bulk <= 0.0) {  // segment too short for the ladder; fall back to uniform
    fill_segment(a, b, base_cells, centers, widths);
    return;
  }
  std::vector<double> ws;
  if (grade_left)
    for (int k = levels - 1; k >= 0; --k) ws.push_back(ladder[k]);  // fine to coarse
  for (int k = 0; k < bulk_cells; ++k) ws.push_back(bulk / bulk_cells);
  if (grade_right)
    for (int k = 0; k < levels; ++k) ws.push_back(ladder[k]);  // coarse to fine
  double x = a;
  for (double w : ws) {
    centers.push_back(x + 0.5 * w);
    widths.push_back(w);
    x += w;
  }
}

void finalize_index_maps(Grid& g) {
  const int n = g.num_nodes();
  g.to_omega0.assign(n, -1);
  g.to_omega1.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (g.label[i] == Region::Omega0) {
      g.to_omega0[i] = static_cast<int>(g.omega0_nodes.size());
      g.omega0_nodes.push_back(i);
    } else {
      g.to_omega1[i] = static_cast<int>(g.omega1_nodes.size());
      g.omega1_nodes.push_back(i);
    }
  }
  for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
    if (g.label[g.faces[f].a] != g.label[g.faces[f].b]) g.interface_faces.push_back(f);
  }
  if (g.interface_faces.empty())
    fail(Errc::validation_error, "grid has no refuge interface");
}

void check_omega1_connected(const Grid& g) {
  const int n1 = static_cast<int>(g.omega1_nodes.size());
  if (n1 == 0) fail(Errc::disconnected_complement, "Omega1 is empty");
  std::vector<char> seen(g.num_nodes(), 0);
  std::queue<int> todo;
  todo.push(g.omega1_nodes[0]);
  seen[g.omega1_nodes[0]] = 1;
  // adjacency through faces restricted to Omega1
  std::vector<std::vector<int>> adj(g.num_nodes());
  for (const auto& f : g.faces) {
    if (g.label[f.a] == Region::Omega1 && g.label[f.b] == Region::Omega1) {
      adj[f.a].push_back(f.b);
      adj[f.b].push_back(f.a);
    }
  }
  int visited = 0;
  while (!todo.empty()) {
    int i = todo.front();
    todo.pop();
    ++visited;
    for (int j : adj[i])
      if (!seen[j]) {
        seen[j] = 1;
        todo.push(j);
      }
  }
  if (visited != n1) fail(Errc::disconnected_complement, "Omega1 is not connected");
}

Grid build_ring(const RingSpec& rs) {
  if (!(rs.circumference > 0.0))
    fail(Errc::validation_error, "ring circumference must be positive");
  if (!(rs.refuge_length > 0.0))
    fail(Errc::empty_refuge, "refuge arc length must be positive");
  if (rs.refuge_length >= rs.circumference)
    fail(Errc::refuge_touches_boundary, "refuge arc must be shorter than the circumference");
  if (rs.resolution < 16)
    fail(Errc::validation_error, "ring resolution must be at least 16");

  const double C = rs.circumference;
  const double target_h = C / rs.resolution;
  const int n0 = segment_cells(rs.refuge_length, target_h);
  const int n1 = segment_cells(C - rs.refuge_length, target_h);

  Grid g;
  g.spec = rs;
  g.dim = 1;
  std::vector<double> centers, widths;
  fill_segment_graded(0.0, rs.refuge_length, n0, rs.interface_grading, true, true, centers,
                      widths);
  const int refuge_cells = static_cast<int>(centers.size());
  fill_segment_graded(rs.refuge_length, C, n1, rs.interface_grading, true, true, centers,
                      widths);
  const int n = static_cast<int>(centers.size());
  g.x.resize(n);
  g.label.resize(n);
  g.weight.resize(n);
  for (int i = 0; i < n; ++i) {
    g.x[i] = std::fmod(rs.refuge_start + centers[i], C);
    g.label[i] = i < refuge_cells ? Region::Omega0 : Region::Omega1;
    g.weight[i] = widths[i];
    g.hx = std::max(g.hx, widths[i]);
  }
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;  // wrap face closes the circle
    Grid::Face f;
    f.a = i;
    f.b = j;
    f.area = 1.0;
    f.da = 0.5 * widths[i];
    f.db = 0.5 * widths[j];
    f.dist = f.da + f.db;
    g.faces.push_back(f);
  }
  finalize_index_maps(g);
  check_omega1_connected(g);
  return g;
}

struct Axis {
  std::vector<double> centers, widths;
  int hole_begin = 0, hole_end = 0;  // cell index range covering the hole
};

Axis build_axis(double lo, double hi, double hole_lo, double hole_hi, int resolution,
                int grading) {
  Axis ax;
  const double target_h = (hi - lo) / resolution;
  const int na = segment_cells(hole_lo - lo, target_h);
  const int nb = segment_cells(hole_hi - hole_lo, target_h);
  const int nc = segment_cells(hi - hole_hi, target_h);
  fill_segment_graded(lo, hole_lo, na, grading, false, true, ax.centers, ax.widths);
  ax.hole_begin = static_cast<int>(ax.centers.size());
  fill_segment_graded(hole_lo, hole_hi, nb, grading, true, true, ax.centers, ax.widths);
  ax.hole_end = static_cast<int>(ax.centers.size());
  fill_segment_graded(hole_hi, hi, nc, grading, true, false, ax.centers, ax.widths);
  return ax;
}

Grid build_rect(const RectSpec& rc) {
  for (int d = 0; d < 2; ++d) {
    if (!(rc.outer_min[d] < rc.outer_max[d]))
      fail(Errc::validation_error, "outer box is degenerate");
    if (!(rc.hole_min[d] < rc.hole_max[d]))
      fail(Errc::empty_refuge, "hole box is degenerate");
    if (!(rc.hole_min[d] > rc.outer_min[d] && rc.hole_max[d] < rc.outer_max[d]))
      fail(Errc::refuge_touches_boundary, "hole box must be strictly inside the outer box");
    if (rc.resolution[d] < 16)
      fail(Errc::validation_error, "rect resolution must be at least 16 per axis");
  }

  const Axis ax = build_axis(rc.outer_min[0], rc.outer_max[0], rc.hole_min[0],
                             rc.hole_max[0], rc.resolution[0], rc.interface_grading);
  const Axis ay = build_axis(rc.outer_min[1], rc.outer_max[1], rc.hole_min[1],
                             rc.hole_max[1], rc.resolution[1], rc.interface_grading);
  const int nx = static_cast<int>(ax.centers.size());
  const int ny = static_cast<int>(ay.centers.size());

  Grid g;
  g.spec = rc;
  g.dim = 2;
  const int n = nx * ny;
  g.x.resize(n);
  g.y.resize(n);
  g.label.resize(n);
  g.weight.resize(n);
  auto id = [nx](int i, int j) { return j * nx + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = id(i, j);
      g.x[k] = ax.centers[i];
      g.y[k] = ay.centers[j];
      g.weight[k] = ax.widths[i] * ay.widths[j];
      const bool in_hole = i >= ax.hole_begin && i < ax.hole_end && j >= ay.hole_begin &&
                           j < ay.hole_end;
      g.label[k] = in_hole ? Region::Omega0 : Region::Omega1;
    }
  for (double w : ax.widths) g.hx = std::max(g.hx, w);
  for (double w : ay.widths) g.hy = std::max(g.hy, w);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      Grid::Face f;
      f.a = id(i, j);
      f.b = id(i + 1, j);
      f.area = ay.widths[j];
      f.da = 0.5 * ax.widths[i];
      f.db = 0.5 * ax.widths[i + 1];
      f.dist = f.da + f.db;
      g.faces.push_back(f);
    }
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Grid::Face f;
      f.a = id(i, j);
      f.b = id(i, j + 1);
      f.area = ax.widths[i];
      f.da = 0.5 * ay.widths[j];
      f.db = 0.5 * ay.widths[j + 1];
      f.dist = f.da + f.db;
      g.faces.push_back(f);
    }
  finalize_index_maps(g);
  check_omega1_connected(g);
  return g;
}

}  // namespace

Grid build_grid(const DomainSpec& spec) {
  return std::visit(
      [](const auto& s) -> Grid {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RingSpec>)
          return build_ring(s);
        else
          return build_rect(s);
      },
      spec);
}

Measures measures(const Grid& grid) {
  Measures m{0.0, 0.0, 0.0};
  for (int i = 0; i < grid.num_nodes(); ++i) {
    m.omega += grid.weight[i];
    if (grid.label[i] == Region::Omega0)
      m.omega0 += grid.weight[i];
    else
      m.omega1 += grid.weight[i];
  }
  return m;
}

void check_field(const Grid& grid, const Field& f, Region expected) {
  if (f.region != expected)
    fail(Errc::region_mismatch, std::string("expected field on ") + region_name(expected) +
                                    ", got " + region_name(f.region));
  if (f.values.size() != grid.region_size(f.region))
    fail(Errc::region_mismatch, "field size does not match region node count");
}

double integrate(const Grid& grid, const Field& f) {
  if (f.values.size() != grid.region_size(f.region))
    fail(Errc::region_mismatch, "field size does not match region node count");
  double acc = 0.0;
  if (f.region == Region::Omega) {
    for (int i = 0; i < grid.num_nodes(); ++i) acc += grid.weight[i] * f.values[i];
  } else {
    const auto& nodes = grid.region_nodes(f.region);
    for (size_t k = 0; k < nodes.size(); ++k) acc += grid.weight[nodes[k]] * f.values[k];
  }
  return acc;
}

Field constant_field(const Grid& grid, Region r, double value) {
  Field f;
  f.region = r;
  f.values = Eigen::VectorXd::Constant(grid.region_size(r), value);
  return f;
}

Field field_from_function(const Grid& grid, Region r,
                          const std::function<double(double, double)>& fn) {
  Field f;
  f.region = r;
  f.values.resize(grid.region_size(r));
  if (r == Region::Omega) {
    for (int i = 0; i < grid.num_nodes(); ++i)
      f.values[i] = fn(grid.x[i], grid.dim == 2 ? grid.y[i] : 0.0);
  } else {
    const auto& nodes = grid.region_nodes(r);
    for (size_t k = 0; k < nodes.size(); ++k)
      f.values[k] = fn(grid.x[nodes[k]], grid.dim == 2 ? grid.y[nodes[k]] : 0.0);
  }
  return f;
}

Field indicator_omega1(const Grid& grid) {
  Field f = constant_field(grid, Region::Omega, 0.0);
  for (int i : grid.omega1_nodes) f.values[i] = 1.0;
  return f;
}

Field restrict_to(const Grid& grid, const Field& f, Region r) {
  check_field(grid, f, Region::Omega);
  if (r == Region::Omega) return f;
  Field out;
  out.region = r;
  const auto& nodes = grid.region_nodes(r);
  out.values.resize(nodes.size());
  for (size_t k = 0; k < nodes.size(); ++k) out.values[k] = f.values[nodes[k]];
  return out;
}

Field extend_by_zero(const Grid& grid, const Field& f) {
  if (f.region == Region::Omega) return f;
  if (f.values.size() != grid.region_size(f.region))
    fail(Errc::region_mismatch, "field size does not match region node count");
  Field out = constant_field(grid, Region::Omega, 0.0);
  const auto& nodes = grid.region_nodes(f.region);
  for (size_t k = 0; k < nodes.size(); ++k) out.values[nodes[k]] = f.values[k];
  return out;
}

void dump_grid_json(const Grid& grid, const std::string& path) {
  nlohmann::json j;
  j["dim"] = grid.dim;
  j["x"] = grid.x;
  if (grid.dim == 2) j["y"] = grid.y;
  std::vector<int> labels(grid.num_nodes());
  for (int i = 0; i < grid.num_nodes(); ++i)
    labels[i] = grid.label[i] == Region::Omega0 ? 0 : 1;
  j["label"] = labels;
  j["weight"] = std::vector<double>(grid.weight.data(), grid.weight.data() + grid.num_nodes());
  const Measures m = measures(grid);
  j["measures"] = {{"omega", m.omega}, {"omega0", m.omega0}, {"omega1", m.omega1}};
  std::ofstream out(path);
  if (!out) fail(Errc::validation_error, "cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace refugia
