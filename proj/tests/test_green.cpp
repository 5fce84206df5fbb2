#include <doctest.h>

#include <cmath>

#include "frozen_values.hpp"
#include "landscape/errors.hpp"
#include "landscape/green.hpp"
#include "landscape/landscape.hpp"

using namespace landscape;

namespace {

const SolverOptions kOpts{1e-12};

HamiltonianSpec spec_for(const OmegaField& omega, Boundary bc, double lambda, double eta) {
  const Grid g(omega.box.dim, omega.box.extent[0], kMinBumpMesh, bc);
  return HamiltonianSpec(assemble_potential(omega, BumpProfile{}, g), lambda, eta);
}

OmegaField fixed_omega16() {
  std::vector<double> w(16);
  for (int j = 0; j < 16; ++j) w[j] = ((7 * j) % 5) / 4.0;
  return {Box::cube(1, 16), w, DisorderLaw::uniform01(), 0, 0};
}

}  // namespace

TEST_SUITE("green") {
  TEST_CASE("free Dirichlet column matches frozen values") {
    const Grid g(1, 4, 16, Boundary::dirichlet);
    const HamiltonianSpec H(ScalarField(g), 1.0, 1.0);
    const auto G = green_column(H, 32, kOpts);
    const auto dense = dense_solve_oracle(H, discrete_delta(g, 32));
    for (std::size_t i = 0; i < std::size(frozen::kGreenFreeNodes); ++i) {
      CHECK(G.field[frozen::kGreenFreeNodes[i]] == doctest::Approx(frozen::kGreenFreeValues[i]).epsilon(1e-9));
      CHECK(dense[frozen::kGreenFreeNodes[i]] == doctest::Approx(frozen::kGreenFreeValues[i]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(green_column(H, 64, kOpts), IndexError);
  }

  TEST_CASE("symmetry, positivity and the domination chain") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto omega = sample_omega(DisorderLaw::bernoulli(0.5), Box::cube(2, 4), 3, s);
      const auto H = spec_for(omega, Boundary::dirichlet, 1.0, 1e-3);
      const std::size_t a = H.grid.cell_center_node({1, 1, 0}), b = H.grid.cell_center_node({2, 3, 0});
      const auto Ga = green_column(H, a, kOpts), Gb = green_column(H, b, kOpts);
      CHECK(Ga.field[b] == doctest::Approx(Gb.field[a]).epsilon(1e-8));
      CHECK(Ga.field.min() >= -10.0 * kOpts.tol * Ga.field.max_abs());
      const auto stronger = green_column(H.with_lambda(3.0), a, kOpts);
      const auto free = massive_green_column(H, a, kOpts);
      const double slack = 2.0 * kOpts.tol * free.field.max_abs();
      for (std::size_t i = 0; i < Ga.field.size(); ++i) {
        REQUIRE(stronger.field[i] <= Ga.field[i] + slack);
        REQUIRE(Ga.field[i] <= free.field[i] + slack);
      }
      CHECK(massive_domination_check(Ga, kOpts).pass);
    }
  }

  TEST_CASE("domination with V = 0 or lambda = 0 is exact") {
    const Grid g(1, 8, 20, Boundary::dirichlet);
    const auto free = green_column(HamiltonianSpec(ScalarField(g), 1.0, 1e-2), g.center_node(), kOpts);
    CHECK(massive_domination_check(free, kOpts).max_violation == doctest::Approx(0.0));
    const auto omega = sample_omega(DisorderLaw::uniform01(), g.cell_box(), 1, 0);
    const auto zero_lambda = green_column(spec_for(omega, Boundary::dirichlet, 0.0, 1e-2), g.center_node(), kOpts);
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(zero_lambda.field[i] == doctest::Approx(free.field[i]));
  }

  TEST_CASE("cube mass") {
    const Grid g(2, 3, 20, Boundary::periodic);
    ScalarField c(g, 2.5);
    CHECK(cube_mass(c, {1, 2, 0}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(cube_mass(c, {3, 0, 0}), IndexError);
    ScalarField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.01 * static_cast<double>(i)) + 1.0;
    const auto masses = cell_masses(f);
    double total = 0.0;
    for (std::size_t z = 0; z < masses.size(); ++z) {
      total += masses[z];
      CHECK(masses[z] == doctest::Approx(cube_mass(f, g.cell_box().site(z))));
    }
    CHECK(total == doctest::Approx(field_integral(f)));
  }

  TEST_CASE("representation: total Green mass equals the landscape value") {
    for (auto bc : {Boundary::dirichlet, Boundary::periodic}) {
      const auto omega = sample_omega(DisorderLaw::bernoulli(0.5), Box::cube(1, 12), 5, 0);
      const auto H = spec_for(omega, bc, 1.0, 1e-2);
      const auto u = solve_landscape(H, kOpts).u;
      for (std::size_t x : {std::size_t{7}, H.grid.center_node(), std::size_t{200}}) {
        const auto G = green_column(H, x, kOpts);
        double total = 0.0;
        for (double m : cell_masses(G.field)) total += m;
        CHECK(total == doctest::Approx(u[x]).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("rank-one identity") {
    const Grid g(1, 32, 20, Boundary::dirichlet);
    const auto omega = sample_omega(DisorderLaw::uniform01(), g.cell_box(), 8, 0);
    const Index3 z{17, 0, 0};
    const std::size_t x = g.cell_center_node({14, 0, 0});
    const auto rep = rank_one_identity_check(omega, z, g, 1.0, 1e-4, x, g.center_node(), kOpts);
    CHECK(rep.relative_error <= 1e-6);
    CHECK(rep.lhs > 0.0);
    const auto saturated = rank_one_identity_check(omega.with_site(z, 1.0), z, g, 1.0, 1e-4, x, g.center_node(), kOpts);
    CHECK(saturated.lhs == doctest::Approx(0.0).scale(1.0));
    CHECK(saturated.rhs == 0.0);
    const auto omega2 = sample_omega(DisorderLaw::bernoulli(0.5), Box::cube(2, 4), 8, 1);
    const Grid g2(2, 4, 20, Boundary::periodic);
    const auto rep2 =
        rank_one_identity_check(omega2.with_site({1, 2, 0}, 0.0), {1, 2, 0}, g2, 2.0, 0.1, 10, g2.center_node(), kOpts);
    CHECK(rep2.relative_error <= 1e-6);
    CHECK_THROWS_AS(rank_one_identity_check(omega, {32, 0, 0}, g, 1.0, 1e-4, x, g.center_node(), kOpts), IndexError);
  }

  TEST_CASE("Agmon inequality") {
    const auto omega = fixed_omega16();
    const auto H = spec_for(omega, Boundary::dirichlet, 1.0, 1e-6);
    const auto G = green_column(H, H.grid.center_node(), kOpts);
    SUBCASE("matches the frozen quadrature") {
      const auto rep = agmon_inequality_check(G, {0.1, 1e300, 1.0, 7.0});
      CHECK(rep.lhs == doctest::Approx(frozen::kAgmon1dLhsRhs[0]).epsilon(1e-8));
      CHECK(rep.rhs == doctest::Approx(frozen::kAgmon1dLhsRhs[1]).epsilon(1e-8));
      CHECK(rep.pass);
    }
    SUBCASE("empty cutoff gives 0 <= 0") {
      const auto rep = agmon_inequality_check(G, {0.1, 1e300, 3.0, 3.0});
      CHECK(rep.lhs == 0.0);
      CHECK(rep.rhs == 0.0);
      CHECK(rep.pass);
    }
    SUBCASE("flat weight on random samples") {
      for (std::uint64_t s = 0; s < 10; ++s) {
        const auto om = sample_omega(DisorderLaw::bernoulli(0.5), Box::cube(1, 32), 2, s);
        const auto Hs = spec_for(om, Boundary::dirichlet, 1.0, 1e-6);
        const auto Gs = green_column(Hs, Hs.grid.center_node(), kOpts);
        CHECK(agmon_inequality_check(Gs, {0.0, 1e300, 1.0, 12.0}).pass);
        CHECK(agmon_inequality_check(Gs, {0.1, 4.0, 1.0, 12.0}).pass);
      }
    }
    SUBCASE("geometry guards") {
      CHECK_THROWS_AS(agmon_inequality_check(G, {0.1, 1e300, 0.25, 7.0}), ValidationError);
      CHECK_THROWS_AS(agmon_inequality_check(G, {0.1, 1e300, 1.0, 8.0}), ValidationError);
      const auto off = green_column(H, 10, kOpts);
      CHECK_THROWS_AS(agmon_inequality_check(off, {0.1, 1e300, 1.0, 7.0}), ValidationError);
    }
  }
}
