#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "landscape/disorder.hpp"
#include "landscape/grid.hpp"
#include "landscape/solver.hpp"

namespace landscape {

struct LandscapeSolution {
  ScalarField u;
  HamiltonianSpec spec;
  std::vector<double> sup_per_cell;  // indexed by the grid's cell box
  // Lower barrier: 1/(lambda + eta) on periodic grids (the V = 1 solution),
  // 0 under Dirichlet conditions where u vanishes at the boundary.
  double floor;
};

// Solves -Delta u + (lambda V + eta) u = 1 and checks positivity.
LandscapeSolution solve_landscape(const HamiltonianSpec& H, const SolverOptions& opts = {});

std::vector<double> per_cell_max(const ScalarField& f);

struct MomentEstimate {
  double moment;     // E[sup_Q u^p]^{1/p}
  double ci;         // bootstrap 95% half-width
  std::size_t n_samples;
  std::size_t n_cells;
};

// Monte Carlo estimate over samples x window cells; bootstrap over samples.
MomentEstimate landscape_moments(std::span<const LandscapeSolution> samples, double p,
                                 const std::vector<Index3>& window, std::uint64_t bootstrap_seed = 0,
                                 int bootstrap_resamples = 200);

struct EtaRow {
  double eta;
  double sup_diff;       // max over window nodes |u_eta - u_ref|
  double sup_grad_diff;  // max over window links |grad u_eta - grad u_ref|
};

// Differences to the smallest-eta solve on the same omega. The last row is the
// reference itself (zeros).
std::vector<EtaRow> eta_convergence_study(const OmegaField& omega, const Grid& grid, double lambda,
                                          const std::vector<double>& etas, int margin,
                                          const SolverOptions& opts = {});
// Same, with V given directly (e.g. V = 0 closed-form checks).
std::vector<EtaRow> eta_convergence_study(const ScalarField& potential, double lambda,
                                          const std::vector<double>& etas, int margin,
                                          const SolverOptions& opts = {});

struct EnergyReport {
  double lhs;           // sample-averaged per-cell Dirichlet energy
  double rhs;           // sample-averaged per-cell integral of u
  double diff_stderr;   // standard error of the per-sample (rhs - lhs)
  double margin_sigma;  // (rhs - lhs) / diff_stderr; +inf for one sample
  bool pass;            // lhs <= rhs + 3 diff_stderr
};

EnergyReport energy_estimate_check(std::span<const LandscapeSolution> samples);

// Per-cell integrals used by the energy check.
double dirichlet_energy(const ScalarField& u);
double field_integral(const ScalarField& u);

struct DerivedFields {
  ScalarField inv_u;
  std::vector<ScalarField> grad_log_u;  // one per axis, forward differences
};

DerivedFields derived_fields(const LandscapeSolution& sol);

}  // namespace landscape
