#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "landscape/cli/runner.hpp"
#include "landscape/errors.hpp"
#include "landscape/green.hpp"
#include "landscape/landscape.hpp"
#include "landscape/percolation.hpp"
#include "landscape/rng.hpp"

namespace landscape::cli {

namespace {

double rel_diff(const ScalarField& a, const ScalarField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

HamiltonianSpec random_hamiltonian(int dim, int cells, Boundary bc, double lambda, double eta, std::uint64_t s) {
  const Grid g(dim, cells, kMinBumpMesh, bc);
  const OmegaField omega = sample_omega(DisorderLaw::bernoulli(0.5), g.cell_box(), 7, s);
  return HamiltonianSpec(assemble_potential(omega, BumpProfile{}, g), lambda, eta);
}

}  // namespace

// Quick structural checks plus dense-oracle comparisons on small grids.
void run_selftest(RunContext& ctx) {
  const auto& c = ctx.config();
  auto out = ctx.csv("selftest.csv", {"check", "pass", "value"});
  auto record = [&](const std::string& name, bool pass, double value, double threshold) {
    out.row(name, pass, value);
    ctx.predicate(name, pass, value, threshold);
  };
  auto expect_throw = [&](const std::string& name, const std::function<void()>& f) {
    bool threw = false;
    try {
      f();
    } catch (const ValidationError&) {
      threw = true;
    }
    record(name, threw, threw ? 1.0 : 0.0, 1.0);
  };

  {
    const auto r = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
    const bool ok = r == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
    record("philox_known_answer", ok, ok ? 0.0 : 1.0, 0.0);
  }

  const SolverOptions opts{1e-12, 0, Preconditioner::automatic, Execution::parallel};
  struct Case {
    int dim, cells;
    Boundary bc;
    double lambda, eta;
  };
  const Case cases[] = {{1, 8, Boundary::dirichlet, 1.0, 0.0},
                        {1, 8, Boundary::periodic, 1.0, 1e-3},
                        {2, 2, Boundary::dirichlet, 1.0, 1e-6},
                        {2, 2, Boundary::periodic, 0.5, 1e-2}};
  double worst = 0.0;
  for (std::size_t i = 0; i < std::size(cases); ++i) {
    const auto& k = cases[i];
    const HamiltonianSpec H = random_hamiltonian(k.dim, k.cells, k.bc, k.lambda, k.eta, i);
    const ScalarField ones(H.grid, 1.0);
    worst = std::max(worst, rel_diff(cg_solve(H, ones, opts), dense_solve_oracle(H, ones)));
    const ScalarField delta = discrete_delta(H.grid, H.grid.center_node());
    worst = std::max(worst, rel_diff(cg_solve(H, delta, opts), dense_solve_oracle(H, delta)));
  }
  const double oracle_rel = c.tolerance("oracle_rel");
  record("cg_matches_dense_oracle", worst <= oracle_rel, worst, oracle_rel);

  {
    const Grid g(1, 8, kMinBumpMesh, Boundary::periodic);
    const double eta = 1e-2;
    const auto sol = solve_landscape(HamiltonianSpec(ScalarField(g), 1.0, eta), opts);
    double err = 0.0;
    for (double v : sol.u.values) err = std::max(err, std::abs(v * eta - 1.0));
    record("free_periodic_landscape_is_inverse_mass", err <= 1e-9, err, 1e-9);
  }

  {
    const HamiltonianSpec H = random_hamiltonian(1, 8, Boundary::dirichlet, 1.0, 0.0, 11);
    const std::size_t a = H.grid.cell_center_node({2, 0, 0}), b = H.grid.cell_center_node({5, 0, 0});
    const auto Ga = green_column(H, a, opts), Gb = green_column(H, b, opts);
    const double asym = std::abs(Ga.field[b] - Gb.field[a]) / std::abs(Ga.field[b]);
    const double symmetry_rel = c.tolerance("symmetry_rel");
    record("green_symmetry", asym <= symmetry_rel, asym, symmetry_rel);
    // dom.threshold is 2 tol max G_massive; rescale to the configured factor.
    const auto dom = massive_domination_check(Ga, opts);
    const double dom_threshold = dom.threshold * c.tolerance("domination_factor") / 2.0;
    record("green_dominated_by_massive_laplacian", dom.max_violation <= dom_threshold, dom.max_violation,
           dom_threshold);
    const double u_a = solve_landscape(H, opts).u[a];
    double total = 0.0;
    for (double m : cell_masses(Ga.field)) total += m;
    const double rep = std::abs(total - u_a) / u_a;
    const double representation_rel = c.tolerance("representation_rel");
    record("landscape_is_total_green_mass", rep <= representation_rel, rep, representation_rel);
  }

  expect_throw("choose_k_rejects_unreachable_threshold",
               [] { (void)choose_k(DisorderLaw::bernoulli(0.5), 1.5, 2); });
  expect_throw("bernoulli_point_mass_rejected", [] { DisorderLaw::bernoulli(1.0).validate(); });
  expect_throw("coarse_mesh_rejected", [] {
    const Grid g(1, 4, 10, Boundary::dirichlet);
    (void)assemble_potential(sample_omega(DisorderLaw::uniform01(), g.cell_box(), 1, 0), BumpProfile{}, g);
  });

  {
    const int side = 6;
    CoarseGraph g = CoarseGraph::from_xi(2, side, 1, 0.5, std::vector<std::uint8_t>(side * side * 2, 1));
    const auto d = chemical_distance(g, {2, 3, 0});
    bool ok = true;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      const Index3 c = g.vertex_box().site(v);
      ok = ok && d.dist[v] == std::abs(c[0] - 2) + std::abs(c[1] - 3);
    }
    record("chemical_distance_all_open_is_hop_distance", ok, ok ? 0.0 : 1.0, 0.0);
    const auto rep = cluster_analysis(g);
    record("all_open_single_cluster", rep.largest_fraction == 1.0 && rep.closed_component_diameters.empty(),
           rep.largest_fraction, 1.0);
  }

  {
    OmegaField omega{Box::cube(1, 20), std::vector<double>(20, 1.0), DisorderLaw::bernoulli(0.5), 0, 0};
    const auto gap = gap_statistic_1d(omega, 0.5, 10);
    record("gap_all_strong_sites_is_two", gap.gap == 2 && !gap.censored, gap.gap, 2.0);
  }
}

}  // namespace landscape::cli
