#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "landscape/disorder.hpp"
#include "landscape/grid.hpp"
#include "landscape/solver.hpp"

namespace landscape {

// y -> G_eta(x0, y), the solve of the operator against the discrete delta at x0.
struct GreenColumn {
  std::size_t source;
  ScalarField field;
  HamiltonianSpec spec;
};

GreenColumn green_column(const HamiltonianSpec& H, std::size_t source,
                         const SolverOptions& opts = {});

// Same solve with V = 0: the massive Laplacian reference.
GreenColumn massive_green_column(const HamiltonianSpec& H, std::size_t source,
                                 const SolverOptions& opts = {});

struct DominationReport {
  double max_violation;  // max over nodes of G - G_massive
  double threshold;      // 2 tol * max G_massive
  bool pass;
};

DominationReport massive_domination_check(const GreenColumn& G, const SolverOptions& opts = {});

// h^d * sum of field values over the nodes of cell z (midpoint rule on Q(z)).
double cube_mass(const ScalarField& f, const Index3& cell);
inline double cube_mass(const GreenColumn& G, const Index3& cell) { return cube_mass(G.field, cell); }
// cube_mass for every cell, indexed by the grid's cell box.
std::vector<double> cell_masses(const ScalarField& f);

struct RankOneReport {
  double lhs;  // (G - G^{z,-})(x, origin)
  double rhs;  // lambda h^d sum_{Q(z)} G(x, .) (1 - omega_z) phi(. - z) G^{z,-}(., origin)
  double relative_error;
};

// Relative-error denominator floor, as a fraction of G(x, origin).
inline constexpr double kRankOneFloor = 1e-4;

// Exact discrete resolvent identity between the potential of `omega` and the
// one with omega_z raised to 1. `origin` defaults to the grid center node.
RankOneReport rank_one_identity_check(const OmegaField& omega, const Index3& z, const Grid& grid,
                                      double lambda, double eta, std::size_t x,
                                      std::size_t origin, const SolverOptions& opts = {});

struct AgmonParams {
  double mu = 0.0;         // slope of h(x) = mu min(|x|_inf, cap)
  double cap = 1e300;      // the m in h_m
  double cutoff_inner = 1.0;
  double cutoff_outer = 2.0;
};

struct AgmonReport {
  double lhs;
  double rhs;
  bool pass;
};

// Weighted Caccioppoli inequality
//   1/2 sum chi^2 e^{2h} |grad G|^2 + sum chi^2 e^{2h} G^2 (lambda V - 4 |grad h|^2)
//     <= 4 sum |grad chi|^2 e^{2h} G^2
// with forward differences and midpoint quadrature; distances in |.|_inf
// from the source node.
AgmonReport agmon_inequality_check(const GreenColumn& G, const AgmonParams& params);

// Rows of (|x - source|_inf, value) for plotting.
void write_green_csv(const GreenColumn& G, const std::string& path);

}  // namespace landscape
