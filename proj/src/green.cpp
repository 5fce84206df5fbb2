#include "landscape/green.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "landscape/errors.hpp"

namespace landscape {

GreenColumn green_column(const HamiltonianSpec& H, std::size_t source, const SolverOptions& opts) {
  if (source >= H.grid.node_count()) throw IndexError("Green source outside grid");
  auto field = cg_solve(H, discrete_delta(H.grid, source), opts);
  return {source, std::move(field), H};
}

GreenColumn massive_green_column(const HamiltonianSpec& H, std::size_t source,
                                 const SolverOptions& opts) {
  return green_column(H.with_potential(ScalarField(H.grid)), source, opts);
}

DominationReport massive_domination_check(const GreenColumn& G, const SolverOptions& opts) {
  const GreenColumn reference = massive_green_column(G.spec, G.source, opts);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < G.field.size(); ++i)
    worst = std::max(worst, G.field[i] - reference.field[i]);
  const double threshold = 2.0 * opts.tol * reference.field.max_abs();
  return {worst, threshold, worst <= threshold};
}

double cube_mass(const ScalarField& f, const Index3& cell) {
  const Grid& g = f.grid;
  if (!g.cell_box().contains(cell)) throw IndexError("cell outside grid");
  const int m = g.mesh();
  Index3 lo{0, 0, 0}, ext{1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) {
    lo[a] = cell[a] * m;
    ext[a] = m;
  }
  double sum = 0.0;
  for (int k2 = 0; k2 < ext[2]; ++k2)
    for (int k1 = 0; k1 < ext[1]; ++k1)
      for (int k0 = 0; k0 < ext[0]; ++k0)
        sum += f[g.node_index({lo[0] + k0, lo[1] + k1, lo[2] + k2})];
  return sum * g.node_volume();
}

std::vector<double> cell_masses(const ScalarField& f) {
  const Grid& g = f.grid;
  const Box box = g.cell_box();
  std::vector<double> out(box.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) out[box.linear(g.cell_of(i))] += f[i];
  const double vol = g.node_volume();
  for (double& x : out) x *= vol;
  return out;
}

RankOneReport rank_one_identity_check(const OmegaField& omega, const Index3& z, const Grid& grid,
                                      double lambda, double eta, std::size_t x, std::size_t origin,
                                      const SolverOptions& opts) {
  if (!omega.box.contains(z)) throw IndexError("perturbed site outside box");
  const BumpProfile bump;
  const OmegaField raised = omega.with_site(z, 1.0);
  const HamiltonianSpec H(assemble_potential(omega, bump, grid), lambda, eta);
  const HamiltonianSpec H_raised(assemble_potential(raised, bump, grid), lambda, eta);

  // G(x, .) by one solve; G^{z,-}(., origin) by another; both by symmetry.
  const GreenColumn from_x = green_column(H, x, opts);
  const GreenColumn from_origin = green_column(H_raised, origin, opts);

  const double lhs = from_x.field[origin] - from_origin.field[x];

  const double weight = 1.0 - omega.at(z);
  const int m = grid.mesh();
  double rhs = 0.0;
  if (weight != 0.0) {
    Index3 lo{0, 0, 0}, ext{1, 1, 1};
    for (int a = 0; a < grid.dim(); ++a) {
      lo[a] = z[a] * m;
      ext[a] = m;
    }
    for (int k2 = 0; k2 < ext[2]; ++k2)
      for (int k1 = 0; k1 < ext[1]; ++k1)
        for (int k0 = 0; k0 < ext[0]; ++k0) {
          const Index3 c{lo[0] + k0, lo[1] + k1, lo[2] + k2};
          double r2 = 0.0;
          for (int a = 0; a < grid.dim(); ++a) {
            const double dx = grid.position(c[a]) - z[a];
            r2 += dx * dx;
          }
          const double phi = bump(r2);
          if (phi == 0.0) continue;
          const std::size_t node = grid.node_index(c);
          rhs += from_x.field[node] * weight * phi * from_origin.field[node];
        }
    rhs *= lambda * grid.node_volume();
  }
  // Below this scale the difference is solver noise (both sides vanish when omega_z = 1).
  const double floor = std::max(kRankOneFloor * std::abs(from_x.field[origin]), 1e-300);
  const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), floor);
  return {lhs, rhs, rel};
}

AgmonReport agmon_inequality_check(const GreenColumn& G, const AgmonParams& p) {
  const Grid& g = G.field.grid;
  if (G.source != g.center_node()) throw ValidationError("Agmon check needs the source at the grid center");
  if (p.cutoff_inner < 0.5) throw ValidationError("cutoff_inner must be >= 1/2 so chi vanishes on Q");
  if (p.cutoff_outer < p.cutoff_inner) throw ValidationError("cutoff_outer must be >= cutoff_inner");
  if (p.cutoff_outer >= 0.5 * g.cells()) throw ValidationError("cutoff_outer must be below the box half-width");
  if (p.mu < 0.0 || p.cap < 0.0) throw ValidationError("Agmon weight parameters must be >= 0");

  const double h = g.spacing();
  const Index3 src = g.node_coords(G.source);
  const int n = g.side();
  const bool periodic = g.bc() == Boundary::periodic;

  auto radius = [&](const Index3& c) {
    double r = 0.0;
    for (int a = 0; a < g.dim(); ++a) r = std::max(r, std::abs(c[a] - src[a]) * h);
    return r;
  };
  auto chi = [&](double r) {
    return std::min(std::clamp(r - p.cutoff_inner, 0.0, 1.0), std::clamp(p.cutoff_outer - r, 0.0, 1.0));
  };
  auto weight_h = [&](double r) { return p.mu * std::min(r, p.cap); };

  const double lambda = G.spec.lambda;
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < G.field.size(); ++i) {
    const Index3 c = g.node_coords(i);
    const double r = radius(c);
    const double chi_x = chi(r);
    const double h_x = weight_h(r);
    const double gx = G.field[i];
    double grad_g2 = 0.0, grad_h2 = 0.0, grad_chi2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      Index3 nb = c;
      nb[a] += 1;
      double g_nb = 0.0;
      if (nb[a] < n) {
        g_nb = G.field[g.node_index(nb)];
      } else if (periodic) {
        nb[a] = 0;
        g_nb = G.field[g.node_index(nb)];
        nb[a] = n;  // geometry keeps the unwrapped position
      }
      const double r_nb = radius(nb);
      grad_g2 += (g_nb - gx) * (g_nb - gx);
      grad_h2 += std::pow(weight_h(r_nb) - h_x, 2);
      grad_chi2 += std::pow(chi(r_nb) - chi_x, 2);
    }
    grad_g2 /= h * h;
    grad_h2 /= h * h;
    grad_chi2 /= h * h;
    const double e2h = std::exp(2.0 * h_x);
    lhs += 0.5 * chi_x * chi_x * e2h * grad_g2 +
           chi_x * chi_x * e2h * gx * gx * (lambda * G.spec.potential[i] - 4.0 * grad_h2);
    rhs += 4.0 * grad_chi2 * e2h * gx * gx;
  }
  const double vol = g.node_volume();
  lhs *= vol;
  rhs *= vol;
  return {lhs, rhs, lhs <= rhs * (1.0 + 1e-6) + 1e-12};
}

void write_green_csv(const GreenColumn& G, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path);
  const Grid& g = G.field.grid;
  const Index3 src = g.node_coords(G.source);
  out << "node,distance_inf,value\n";
  for (std::size_t i = 0; i < G.field.size(); ++i) {
    const Index3 c = g.node_coords(i);
    double r = 0.0;
    for (int a = 0; a < g.dim(); ++a) r = std::max(r, std::abs(c[a] - src[a]) * g.spacing());
    out << fmt::format("{},{:.17g},{:.17g}\n", i, r, G.field[i]);
  }
}

}  // namespace landscape
