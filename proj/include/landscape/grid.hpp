#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace landscape {

enum class Boundary { dirichlet, periodic };

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& name);

using Index3 = std::array<int, 3>;

// Integer box [0, extent_0) x ... x [0, extent_{d-1}) of lattice sites.
// Axis 0 varies fastest in the linear index.
struct Box {
  int dim = 1;
  Index3 extent{1, 1, 1};

  static Box cube(int dim, int side);

  std::size_t size() const noexcept;
  bool contains(const Index3& site) const noexcept;
  std::size_t linear(const Index3& site) const;
  Index3 site(std::size_t linear_index) const noexcept;

  friend bool operator==(const Box&, const Box&) = default;
};

// Finite-difference mesh over L^d unit cells. Cell z covers z + [-1/2, 1/2)^d,
// and node i along an axis sits at -1/2 + i*h, so cell z owns nodes
// z*m .. z*m + m - 1 and the lattice point z itself is a node when m is even.
class Grid {
 public:
  Grid(int dim, int cells, int mesh, Boundary bc);

  int dim() const noexcept { return dim_; }
  int cells() const noexcept { return cells_; }
  int mesh() const noexcept { return mesh_; }
  Boundary bc() const noexcept { return bc_; }
  double spacing() const noexcept { return 1.0 / mesh_; }
  int side() const noexcept { return cells_ * mesh_; }
  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t cell_count() const noexcept;
  Box cell_box() const { return Box::cube(dim_, cells_); }

  Index3 node_coords(std::size_t node) const noexcept;
  std::size_t node_index(const Index3& coords) const;
  double position(int node_coord) const noexcept { return -0.5 + node_coord * spacing(); }
  Index3 cell_of(std::size_t node) const noexcept;
  // Node nearest to the lattice point z (the cell center).
  std::size_t cell_center_node(const Index3& cell) const;
  Index3 center_cell() const noexcept;
  std::size_t center_node() const { return cell_center_node(center_cell()); }
  // Node volume h^d.
  double node_volume() const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  int cells_;
  int mesh_;
  Boundary bc_;
  std::size_t node_count_;
};

// One real per grid node.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  explicit ScalarField(Grid g, double fill = 0.0)
      : grid(g), values(g.node_count(), fill) {}
  ScalarField(Grid g, std::vector<double> v);

  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
  std::span<double> view() noexcept { return values; }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  double min() const noexcept;
  double max() const noexcept;
};

// -Delta_h + lambda V + eta on a grid.
struct HamiltonianSpec {
  Grid grid;
  ScalarField potential;
  double lambda;
  double eta;

  HamiltonianSpec(ScalarField v, double lambda, double eta);

  // lambda V(x) + eta at every node.
  std::vector<double> shift() const;
  HamiltonianSpec with_lambda(double new_lambda) const;
  HamiltonianSpec with_eta(double new_eta) const;
  HamiltonianSpec with_potential(ScalarField v) const;
};

// Discrete delta at `node` normalized so its cell integral is one.
ScalarField discrete_delta(const Grid& grid, std::size_t node);

// Cells whose every coordinate lies in [margin, L - margin).
std::vector<Index3> interior_cells(const Grid& grid, int margin);

// |a - b|_inf in cell units.
int linf_distance(const Index3& a, const Index3& b, int dim) noexcept;

}  // namespace landscape
