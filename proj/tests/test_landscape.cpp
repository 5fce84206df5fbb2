#include <doctest.h>

#include <cmath>

#include "landscape/errors.hpp"
#include "landscape/landscape.hpp"

using namespace landscape;

namespace {

const SolverOptions kOpts{1e-12};

HamiltonianSpec random_spec(int dim, int cells, Boundary bc, double lambda, double eta, std::uint64_t s) {
  const Grid g(dim, cells, kMinBumpMesh, bc);
  return HamiltonianSpec(
      assemble_potential(sample_omega(DisorderLaw::bernoulli(0.5), g.cell_box(), 4, s), BumpProfile{}, g), lambda, eta);
}

}  // namespace

TEST_SUITE("landscape") {
  TEST_CASE("closed-form landscapes") {
    const Grid g(2, 4, 20, Boundary::periodic);
    const auto sol = solve_landscape(HamiltonianSpec(ScalarField(g), 1.0, 0.25), kOpts);
    for (double x : sol.u.values) CHECK(x == doctest::Approx(4.0).epsilon(1e-9));
    const auto spec = random_spec(1, 8, Boundary::periodic, 0.0, 0.5, 0);
    for (double x : solve_landscape(spec, kOpts).u.values) CHECK(x == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("1D landscape matches the dense oracle") {
    const auto H = random_spec(1, 16, Boundary::dirichlet, 1.0, 1e-3, 1);
    const auto sol = solve_landscape(H, kOpts);
    const auto dense = dense_solve_oracle(H, ScalarField(H.grid, 1.0));
    double err = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) err = std::max(err, std::abs(sol.u[i] - dense[i]));
    CHECK(err / dense.max_abs() <= 1e-8);
    CHECK(sol.u.min() > 0.0);
    CHECK(sol.floor == 0.0);
  }

  TEST_CASE("periodic floor, positivity and per-cell sup") {
    const auto H = random_spec(2, 4, Boundary::periodic, 2.0, 1e-2, 2);
    const auto sol = solve_landscape(H, kOpts);
    CHECK(sol.floor == doctest::Approx(1.0 / 2.01));
    CHECK(sol.u.min() >= sol.floor * (1.0 - 1e-9));
    const auto sup = per_cell_max(sol.u);
    CHECK(sup == sol.sup_per_cell);
    for (std::size_t i = 0; i < sol.u.size(); ++i)
      REQUIRE(sol.u[i] <= sup[H.grid.cell_box().linear(H.grid.cell_of(i))]);
  }

  TEST_CASE("landscape is monotone in lambda and eta") {
    const auto H = random_spec(1, 16, Boundary::dirichlet, 1.0, 1e-3, 3);
    const auto u = solve_landscape(H, kOpts).u;
    const auto ul = solve_landscape(H.with_lambda(2.0), kOpts).u;
    const auto ue = solve_landscape(H.with_eta(1e-1), kOpts).u;
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(ul[i] <= u[i] * (1.0 + 1e-10));
      CHECK(ue[i] <= u[i] * (1.0 + 1e-10));
    }
  }

  TEST_CASE("moments") {
    std::vector<LandscapeSolution> zero_lambda, random;
    for (std::uint64_t s = 0; s < 30; ++s) {
      zero_lambda.push_back(solve_landscape(random_spec(1, 12, Boundary::periodic, 0.0, 0.1, s), kOpts));
      random.push_back(solve_landscape(random_spec(1, 12, Boundary::periodic, 1.0, 1e-2, s), kOpts));
    }
    const auto window = interior_cells(zero_lambda[0].u.grid, 2);
    const auto m0 = landscape_moments(zero_lambda, 1.0, window, 1, 100);
    CHECK(m0.moment == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(m0.ci == doctest::Approx(0.0).scale(1.0));
    const auto m1 = landscape_moments(random, 1.0, window, 1, 100);
    const auto m4 = landscape_moments(random, 4.0, window, 1, 100);
    CHECK(m1.moment <= m4.moment);
    CHECK(m1.n_samples == 30);
    CHECK(m1.n_cells == window.size());
    CHECK_THROWS_AS(landscape_moments(random, 1.0, {}, 1, 100), ValidationError);
    CHECK_THROWS_AS(landscape_moments(random, 0.5, window, 1, 100), ValidationError);
  }

  TEST_CASE("eta convergence") {
    SUBCASE("V = 0 closed form") {
      const Grid g(1, 12, 20, Boundary::periodic);
      const std::vector<double> etas{1e-1, 1e-2, 1e-3};
      const auto rows = eta_convergence_study(ScalarField(g), 1.0, etas, 2, kOpts);
      REQUIRE(rows.size() == 3);
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(rows[k].sup_diff == doctest::Approx(std::abs(1.0 / etas[k] - 1.0 / etas[2])).epsilon(1e-7));
        CHECK(rows[k].sup_grad_diff <= 1e-5);
      }
    }
    SUBCASE("random sample keeps the linear corridor") {
      const Grid g(1, 64, 20, Boundary::dirichlet);
      const auto omega = sample_omega(DisorderLaw::bernoulli(0.5), g.cell_box(), 1, 0);
      const auto rows = eta_convergence_study(omega, g, 1.0, {1e-2, 1e-3, 1e-5}, 5, kOpts);
      const double ratio = rows[0].sup_diff / rows[1].sup_diff;
      CHECK(ratio >= 5.0);
      CHECK(ratio <= 20.0);
      CHECK(rows[2].sup_diff == 0.0);
    }
    SUBCASE("preconditions") {
      const Grid g(1, 12, 20, Boundary::periodic);
      CHECK_THROWS_AS(eta_convergence_study(ScalarField(g), 1.0, {1e-2}, 2, kOpts), ValidationError);
      CHECK_THROWS_AS(eta_convergence_study(ScalarField(g), 1.0, {1e-2, 1e-1, 1e-3}, 2, kOpts), ValidationError);
    }
  }

  TEST_CASE("energy estimate") {
    const Grid g(1, 16, 20, Boundary::periodic);
    std::vector<LandscapeSolution> flat{solve_landscape(HamiltonianSpec(ScalarField(g), 1.0, 0.5), kOpts)};
    const auto rep = energy_estimate_check(flat);
    CHECK(rep.lhs == doctest::Approx(0.0).scale(1.0));
    CHECK(rep.rhs == doctest::Approx(2.0));
    CHECK(rep.pass);
    const Grid one(1, 1, 20, Boundary::periodic);
    std::vector<LandscapeSolution> single{solve_landscape(HamiltonianSpec(ScalarField(one), 1.0, 1.0), kOpts)};
    CHECK(energy_estimate_check(single).pass);
    std::vector<LandscapeSolution> samples;
    for (std::uint64_t s = 0; s < 20; ++s)
      samples.push_back(solve_landscape(random_spec(1, 32, Boundary::periodic, 1.0, 1e-3, s), kOpts));
    const auto r = energy_estimate_check(samples);
    CHECK(r.pass);
    CHECK(r.lhs < r.rhs);
    std::vector<LandscapeSolution> dirichlet{solve_landscape(random_spec(1, 8, Boundary::dirichlet, 1.0, 0.0, 0), kOpts)};
    CHECK_THROWS_AS(energy_estimate_check(dirichlet), ValidationError);
  }

  TEST_CASE("derived fields") {
    const Grid g(2, 2, 20, Boundary::periodic);
    const auto flat = solve_landscape(HamiltonianSpec(ScalarField(g), 1.0, 0.25), kOpts);
    const auto d = derived_fields(flat);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      CHECK(d.inv_u[i] == doctest::Approx(0.25).epsilon(1e-9));
      CHECK(std::abs(d.grad_log_u[0][i]) <= 1e-6);
      CHECK(std::abs(d.grad_log_u[1][i]) <= 1e-6);
    }
    SUBCASE("path integration reproduces u") {
      const auto H = random_spec(1, 16, Boundary::periodic, 1.0, 1e-2, 5);
      const auto sol = solve_landscape(H, kOpts);
      const auto grad = derived_fields(sol).grad_log_u[0];
      double logu = std::log(sol.u[0]);
      for (std::size_t i = 1; i < sol.u.size(); ++i) {
        logu += grad[i - 1] * H.grid.spacing();
        REQUIRE(std::exp(logu) == doctest::Approx(sol.u[i]).epsilon(1e-6));
      }
    }
    SUBCASE("grad log u is invariant under scaling of u") {
      const auto H = random_spec(1, 8, Boundary::dirichlet, 1.0, 1e-2, 6);
      auto sol = solve_landscape(H, kOpts);
      const auto before = derived_fields(sol).grad_log_u[0];
      for (auto& x : sol.u.values) x *= 3.0;
      const auto after = derived_fields(sol).grad_log_u[0];
      for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-9).scale(1.0));
    }
    SUBCASE("breakdown below the floor is reported") {
      auto sol = solve_landscape(HamiltonianSpec(ScalarField(g), 1.0, 0.25), kOpts);
      sol.u[3] = -1.0;
      CHECK_THROWS_AS(derived_fields(sol), ConsistencyError);
    }
  }
}
