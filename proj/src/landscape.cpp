#include "landscape/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "landscape/errors.hpp"
#include "landscape/sampling.hpp"

namespace landscape {

std::vector<double> per_cell_max(const ScalarField& f) {
  const Grid& g = f.grid;
  const Box box = g.cell_box();
  std::vector<double> out(box.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto& slot = out[box.linear(g.cell_of(i))];
    slot = std::max(slot, f[i]);
  }
  return out;
}

LandscapeSolution solve_landscape(const HamiltonianSpec& H, const SolverOptions& opts) {
  ScalarField u = cg_solve(H, ScalarField(H.grid, 1.0), opts);
  const double scale = u.max_abs();
  const double slack = 10.0 * opts.tol * scale;
  if (u.min() <= 0.0 && u.min() < -slack)
    throw ConsistencyError(fmt::format("landscape solution not positive (min {:g})", u.min()));
  double floor = 0.0;
  if (H.grid.bc() == Boundary::periodic) {
    // V <= max phi = 1, so the V = 1 constant solution is a sub-solution.
    floor = 1.0 / (H.lambda + H.eta);
    if (u.min() < floor - slack)
      throw ConsistencyError(fmt::format("landscape below its barrier {:g} (min {:g})", floor, u.min()));
  }
  auto sup = per_cell_max(u);
  return {std::move(u), H, std::move(sup), floor};
}

MomentEstimate landscape_moments(std::span<const LandscapeSolution> samples, double p,
                                 const std::vector<Index3>& window, std::uint64_t seed,
                                 int resamples) {
  if (window.empty()) throw ValidationError("moment window is empty");
  if (samples.empty()) throw ValidationError("no samples");
  if (!(p >= 1.0)) throw ValidationError("moment order must be >= 1");
  std::vector<double> per_sample(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Box box = samples[s].u.grid.cell_box();
    double acc = 0.0;
    for (const auto& z : window) acc += std::pow(samples[s].sup_per_cell[box.linear(z)], p);
    per_sample[s] = acc / static_cast<double>(window.size());
  }
  auto stat = [&](std::span<const std::size_t> rows) {
    double m = 0.0;
    for (auto r : rows) m += per_sample[r];
    return std::pow(m / static_cast<double>(rows.size()), 1.0 / p);
  };
  const auto b = bootstrap(per_sample.size(), stat, seed, resamples);
  return {b.estimate, b.ci, samples.size(), window.size()};
}

std::vector<EtaRow> eta_convergence_study(const ScalarField& potential, double lambda,
                                          const std::vector<double>& etas, int margin,
                                          const SolverOptions& opts) {
  if (etas.size() < 3) throw ValidationError("eta study needs at least three eta values");
  for (std::size_t i = 1; i < etas.size(); ++i)
    if (!(etas[i] < etas[i - 1])) throw ValidationError("eta values must be strictly decreasing");
  const Grid& g = potential.grid;
  std::vector<ScalarField> sols;
  sols.reserve(etas.size());
  for (double eta : etas) sols.push_back(solve_landscape(HamiltonianSpec(potential, lambda, eta), opts).u);

  const auto cells = interior_cells(g, margin);
  if (cells.empty()) throw ValidationError("eta study window is empty");
  std::vector<char> in_window(g.node_count(), 0);
  const Box box = g.cell_box();
  std::vector<char> cell_in(box.size(), 0);
  for (const auto& z : cells) cell_in[box.linear(z)] = 1;
  for (std::size_t i = 0; i < g.node_count(); ++i) in_window[i] = cell_in[box.linear(g.cell_of(i))];

  const ScalarField& ref = sols.back();
  const double inv_h = 1.0 / g.spacing();
  std::vector<EtaRow> rows;
  for (std::size_t k = 0; k < etas.size(); ++k) {
    double sup = 0.0, sup_grad = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      if (!in_window[i]) continue;
      const double d = sols[k][i] - ref[i];
      sup = std::max(sup, std::abs(d));
      const Index3 c = g.node_coords(i);
      for (int a = 0; a < g.dim(); ++a) {
        Index3 nb = c;
        nb[a] += 1;
        if (nb[a] >= g.side()) continue;
        const std::size_t j = g.node_index(nb);
        if (!in_window[j]) continue;
        const double dj = sols[k][j] - ref[j];
        sup_grad = std::max(sup_grad, std::abs(dj - d) * inv_h);
      }
    }
    rows.push_back({etas[k], sup, sup_grad});
  }
  return rows;
}

std::vector<EtaRow> eta_convergence_study(const OmegaField& omega, const Grid& grid, double lambda,
                                          const std::vector<double>& etas, int margin,
                                          const SolverOptions& opts) {
  return eta_convergence_study(assemble_potential(omega, BumpProfile{}, grid), lambda, etas, margin, opts);
}

double dirichlet_energy(const ScalarField& u) {
  const Grid& g = u.grid;
  const int n = g.side();
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Index3 c = g.node_coords(i);
    for (int a = 0; a < g.dim(); ++a) {
      Index3 nb = c;
      nb[a] += 1;
      double u_nb = 0.0;
      if (nb[a] < n) {
        u_nb = u[g.node_index(nb)];
      } else if (g.bc() == Boundary::periodic) {
        nb[a] = 0;
        u_nb = u[g.node_index(nb)];
      }
      e += (u_nb - u[i]) * (u_nb - u[i]);
    }
  }
  // sum over links of (du/h)^2 h^d
  return e * std::pow(g.spacing(), g.dim() - 2);
}

double field_integral(const ScalarField& u) {
  double s = 0.0;
  for (double x : u.values) s += x;
  return s * u.grid.node_volume();
}

EnergyReport energy_estimate_check(std::span<const LandscapeSolution> samples) {
  if (samples.empty()) throw ValidationError("no samples");
  std::vector<double> lhs(samples.size()), rhs(samples.size()), diff(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& u = samples[s].u;
    if (u.grid.bc() != Boundary::periodic)
      throw ValidationError("energy estimate requires periodic boundary conditions");
    const double cells = static_cast<double>(u.grid.cell_count());
    lhs[s] = dirichlet_energy(u) / cells;
    rhs[s] = field_integral(u) / cells;
    diff[s] = rhs[s] - lhs[s];
  }
  const double l = mean(lhs), r = mean(rhs);
  const double se = standard_error(diff);
  const double margin = se > 0.0 ? (r - l) / se : std::numeric_limits<double>::infinity();
  return {l, r, se, margin, l <= r + 3.0 * se};
}

DerivedFields derived_fields(const LandscapeSolution& sol) {
  const ScalarField& u = sol.u;
  const Grid& g = u.grid;
  const double umin = u.min();
  if (!(umin > 0.0) || umin < sol.floor * (1.0 - 1e-6))
    throw ConsistencyError(fmt::format("landscape below its positivity floor (min {:g}, floor {:g})",
                                       umin, sol.floor));
  DerivedFields out{ScalarField(g), {}};
  std::vector<double> logu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.inv_u[i] = 1.0 / u[i];
    logu[i] = std::log(u[i]);
  }
  const double inv_h = 1.0 / g.spacing();
  const int n = g.side();
  for (int a = 0; a < g.dim(); ++a) {
    ScalarField grad(g);
    for (std::size_t i = 0; i < u.size(); ++i) {
      Index3 c = g.node_coords(i);
      Index3 nb = c;
      nb[a] += 1;
      if (nb[a] < n) {
        grad[i] = (logu[g.node_index(nb)] - logu[i]) * inv_h;
      } else if (g.bc() == Boundary::periodic) {
        nb[a] = 0;
        grad[i] = (logu[g.node_index(nb)] - logu[i]) * inv_h;
      } else if (n > 1) {
        // last Dirichlet node: backward difference
        c[a] -= 1;
        grad[i] = (logu[i] - logu[g.node_index(c)]) * inv_h;
      }
    }
    out.grad_log_u.push_back(std::move(grad));
  }
  return out;
}

}  // namespace landscape
