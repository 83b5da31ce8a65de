#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "refugia/errors.hpp"

namespace refugia {

// Region tags. Omega is the whole habitat, Omega0 the refuge (prey only),
// Omega1 = Omega \ closure(Omega0) where the predator lives.
enum class Region { Omega, Omega0, Omega1 };

const char* region_name(Region r);

/// 1-D circle of given circumference with the refuge on an arc.
/// The circle has empty outer boundary, so the Neumann condition on
/// the outer boundary is vacuous and Omega1 stays connected.
struct RingSpec {
  double circumference = 2.0 * 3.14159265358979323846;
  double refuge_start = 0.0;   // arc-length coordinate of the refuge start
  double refuge_length = 3.14159265358979323846;
  int resolution = 256;        // target cell count around the circle
  // geometric halving levels of the cells abutting the refuge faces; used
  // when a computation must resolve an interface boundary layer (the huge-mu
  // saturation of the eigenvalue curve), 0 keeps segments uniform
  int interface_grading = 0;
};

/// 2-D rectangle with a rectangular hole strictly inside acting as refuge.
struct RectSpec {
  std::array<double, 2> outer_min{0.0, 0.0};
  std::array<double, 2> outer_max{2.0, 1.0};
  std::array<double, 2> hole_min{0.8, 0.4};
  std::array<double, 2> hole_max{1.2, 0.6};
  std::array<int, 2> resolution{128, 64};  // target cell counts per axis
  int interface_grading = 0;               // see RingSpec
};

using DomainSpec = std::variant<RingSpec, RectSpec>;

/// A scalar unknown sampled on the nodes of one region.
struct Field {
  Region region = Region::Omega;
  Eigen::VectorXd values;
};

// Cell-centered finite-volume grid. Each node owns one cell; the refuge
// boundary always coincides with cell faces, so the indicator of Omega1 is
// unambiguous per node and region measures are exact sums of cell measures.
// Spacing is uniform within each segment between refuge faces; it may differ
// slightly across a segment junction when the requested resolution does not
// divide the segment lengths evenly.
struct Grid {
  DomainSpec spec;
  int dim = 1;

  // per-node data, node count n = label.size()
  std::vector<double> x, y;          // cell-center coordinates (y unused in 1-D)
  std::vector<Region> label;         // Omega0 or Omega1
  Eigen::VectorXd weight;            // cell measure

  // Interior faces of Omega between adjacent cells a < b wrap-around included.
  // area: face measure (1 in 1-D). dist = da + db: center-to-center distance,
  // split into the per-side center-to-face distances used for harmonic
  // averaging and refuge Dirichlet closures.
  struct Face {
    int a, b;
    double area, dist, da, db;
  };
  std::vector<Face> faces;
  std::vector<int> interface_faces;  // indices into faces with one end in each region

  std::vector<int> omega0_nodes, omega1_nodes;   // node ids per region
  std::vector<int> to_omega0, to_omega1;         // node id -> region-local index or -1

  double hx = 0.0, hy = 0.0;  // largest cell extents per axis

  int num_nodes() const { return static_cast<int>(label.size()); }
  int region_size(Region r) const;
  bool in_region(int node, Region r) const {
    return r == Region::Omega || label[node] == r;
  }
  // node ids making up a region, in region-local order
  const std::vector<int>& region_nodes(Region r) const;
};

/// Builds the discrete domain. Throws RefugeTouchesBoundary if the refuge
/// closure is not strictly inside the domain, DisconnectedComplement if
/// Omega1 splits, ValidationError on malformed resolutions.
Grid build_grid(const DomainSpec& spec);

struct Measures {
  double omega, omega0, omega1;
};

/// Region measures (|Omega|, |Omega0|, |Omega1|), exact sums of cell weights.
Measures measures(const Grid& grid);

/// Quadrature of a field over its own region (midpoint rule per cell).
double integrate(const Grid& grid, const Field& f);

Field constant_field(const Grid& grid, Region r, double value);
Field field_from_function(const Grid& grid, Region r,
                          const std::function<double(double, double)>& fn);

/// Indicator of Omega1 as a field on Omega (the well-type coefficient shape).
Field indicator_omega1(const Grid& grid);

/// Values of an Omega-field at the nodes of Omega1 (or Omega0).
Field restrict_to(const Grid& grid, const Field& f, Region r);

/// Omega-field equal to f on its region and 0 elsewhere.
Field extend_by_zero(const Grid& grid, const Field& f);

void check_field(const Grid& grid, const Field& f, Region expected);

/// JSON debug dump of nodes, labels and weights.
void dump_grid_json(const Grid& grid, const std::string& path);

}  // namespace refugia
