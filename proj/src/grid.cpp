#include "landscape/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "landscape/errors.hpp"

namespace landscape {

std::string to_string(Boundary bc) {
  return bc == Boundary::dirichlet ? "dirichlet" : "periodic";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "dirichlet") return Boundary::dirichlet;
  if (name == "periodic") return Boundary::periodic;
  throw ValidationError("unknown boundary condition '" + name + "'");
}

Box Box::cube(int dim, int side) {
  if (dim < 1 || dim > 3) throw ValidationError("box dimension must be 1, 2 or 3");
  if (side < 1) throw ValidationError("box side must be positive");
  Box b;
  b.dim = dim;
  for (int a = 0; a < dim; ++a) b.extent[a] = side;
  return b;
}

std::size_t Box::size() const noexcept {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(extent[a]);
  return n;
}

bool Box::contains(const Index3& s) const noexcept {
  for (int a = 0; a < dim; ++a)
    if (s[a] < 0 || s[a] >= extent[a]) return false;
  return true;
}

std::size_t Box::linear(const Index3& s) const {
  if (!contains(s)) throw IndexError("site outside box");
  std::size_t idx = 0;
  for (int a = dim - 1; a >= 0; --a) idx = idx * static_cast<std::size_t>(extent[a]) + s[a];
  return idx;
}

Index3 Box::site(std::size_t i) const noexcept {
  Index3 s{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    s[a] = static_cast<int>(i % static_cast<std::size_t>(extent[a]));
    i /= static_cast<std::size_t>(extent[a]);
  }
  return s;
}

Grid::Grid(int dim, int cells, int mesh, Boundary bc)
    : dim_(dim), cells_(cells), mesh_(mesh), bc_(bc), node_count_(1) {
  if (dim < 1 || dim > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
  if (cells < 1) throw ValidationError("grid needs at least one cell per side");
  if (mesh < 1) throw ValidationError("grid needs at least one node per unit length");
  for (int a = 0; a < dim; ++a) node_count_ *= static_cast<std::size_t>(cells) * mesh;
  constexpr std::size_t kNodeBudget = 64u << 20;
  if (node_count_ > kNodeBudget) throw ValidationError("grid exceeds the node budget");
}

std::size_t Grid::cell_count() const noexcept { return cell_box().size(); }

Index3 Grid::node_coords(std::size_t node) const noexcept {
  Index3 c{0, 0, 0};
  const auto n = static_cast<std::size_t>(side());
  for (int a = 0; a < dim_; ++a) {
    c[a] = static_cast<int>(node % n);
    node /= n;
  }
  return c;
}

std::size_t Grid::node_index(const Index3& c) const {
  const int n = side();
  std::size_t idx = 0;
  for (int a = dim_ - 1; a >= 0; --a) {
    if (c[a] < 0 || c[a] >= n) throw IndexError("node outside grid");
    idx = idx * static_cast<std::size_t>(n) + c[a];
  }
  return idx;
}

Index3 Grid::cell_of(std::size_t node) const noexcept {
  Index3 c = node_coords(node);
  for (int a = 0; a < dim_; ++a) c[a] /= mesh_;
  return c;
}

std::size_t Grid::cell_center_node(const Index3& cell) const {
  Index3 c{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    if (cell[a] < 0 || cell[a] >= cells_) throw IndexError("cell outside grid");
    c[a] = cell[a] * mesh_ + mesh_ / 2;
  }
  return node_index(c);
}

Index3 Grid::center_cell() const noexcept {
  Index3 c{0, 0, 0};
  for (int a = 0; a < dim_; ++a) c[a] = cells_ / 2;
  return c;
}

double Grid::node_volume() const noexcept { return std::pow(spacing(), dim_); }

ScalarField::ScalarField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.node_count())
    throw ValidationError("field length does not match the grid node count");
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double ScalarField::min() const noexcept {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double ScalarField::max() const noexcept {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

HamiltonianSpec::HamiltonianSpec(ScalarField v, double lam, double et)
    : grid(v.grid), potential(std::move(v)), lambda(lam), eta(et) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be >= 0");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be >= 0");
  if (grid.bc() == Boundary::periodic && eta <= 0.0)
    throw ValidationError("periodic operator is singular without a positive mass eta");
  for (double x : potential.values)
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("potential must be finite and >= 0");
}

std::vector<double> HamiltonianSpec::shift() const {
  std::vector<double> s(potential.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = lambda * potential[i] + eta;
  return s;
}

HamiltonianSpec HamiltonianSpec::with_lambda(double l) const { return {potential, l, eta}; }
HamiltonianSpec HamiltonianSpec::with_eta(double e) const { return {potential, lambda, e}; }
HamiltonianSpec HamiltonianSpec::with_potential(ScalarField v) const {
  if (!(v.grid == grid)) throw ValidationError("potential lives on a different grid");
  return {std::move(v), lambda, eta};
}

ScalarField discrete_delta(const Grid& grid, std::size_t node) {
  if (node >= grid.node_count()) throw IndexError("delta source outside grid");
  ScalarField f(grid);
  f[node] = 1.0 / grid.node_volume();
  return f;
}

std::vector<Index3> interior_cells(const Grid& grid, int margin) {
  std::vector<Index3> out;
  const Box box = grid.cell_box();
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Index3 z = box.site(i);
    bool inside = true;
    for (int a = 0; a < grid.dim(); ++a)
      inside = inside && z[a] >= margin && z[a] < grid.cells() - margin;
    if (inside) out.push_back(z);
  }
  return out;
}

int linf_distance(const Index3& a, const Index3& b, int dim) noexcept {
  int d = 0;
  for (int k = 0; k < dim; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace landscape
