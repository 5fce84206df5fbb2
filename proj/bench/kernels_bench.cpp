// Serial reference kernels against their OpenMP counterparts, plus full solves.
#include <benchmark/benchmark.h>

#include <vector>

#include "landscape/disorder.hpp"
#include "landscape/kernels.hpp"
#include "landscape/multigrid.hpp"
#include "landscape/rng.hpp"
#include "landscape/solver.hpp"

using namespace landscape;

namespace {

struct Problem {
  HamiltonianSpec H;
  kernels::Stencil stencil;
  std::vector<double> shift, x, y;
};

Problem make_problem(int dim, int cells) {
  const Grid g(dim, cells, kMinBumpMesh, Boundary::periodic);
  const auto omega = sample_omega(DisorderLaw::uniform01(), g.cell_box(), 5, 0);
  HamiltonianSpec H(assemble_potential(omega, BumpProfile{}, g), 1.0, 1e-6);
  Problem p{H, kernels::Stencil::of(g), H.shift(), {}, {}};
  p.x.resize(p.shift.size());
  p.y.resize(p.shift.size());
  RandomStream rng(9, StreamDomain::synthetic, 0);
  for (double& v : p.x) v = rng.uniform();
  return p;
}

// Benchmark args: {dim, cells, parallel}
void set_args(benchmark::internal::Benchmark* b) {
  for (int parallel : {0, 1}) {
    b->Args({1, 4096, parallel});
    b->Args({2, 32, parallel});
    b->Args({3, 4, parallel});
  }
  b->ArgNames({"dim", "cells", "omp"});
}

void BM_apply(benchmark::State& state) {
  auto p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto f = state.range(2) ? kernels::omp::apply : kernels::serial::apply;
  for (auto _ : state) {
    f(p.stencil, p.shift, p.x, p.y);
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.x.size()));
}

void BM_dot(benchmark::State& state) {
  auto p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto f = state.range(2) ? kernels::omp::dot : kernels::serial::dot;
  for (auto _ : state) benchmark::DoNotOptimize(f(p.x, p.x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.x.size()));
}

void BM_line_solve(benchmark::State& state) {
  auto p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const bool par = state.range(2) != 0;
  const auto factor = par ? kernels::omp::factor_lines(p.stencil, p.shift) : kernels::serial::factor_lines(p.stencil, p.shift);
  const auto f = par ? kernels::omp::line_solve : kernels::serial::line_solve;
  for (auto _ : state) {
    f(p.stencil, factor, p.x, p.y);
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.x.size()));
}

void BM_multigrid_vcycle(benchmark::State& state) {
  auto p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  kernels::Multigrid mg(p.stencil, p.shift, state.range(2) != 0);
  for (auto _ : state) {
    mg.apply(p.x, p.y);
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.x.size()));
}

void BM_cg_solve(benchmark::State& state) {
  auto p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SolverOptions opts{1e-12, 0, Preconditioner::automatic,
                           state.range(2) ? Execution::parallel : Execution::serial};
  const ScalarField ones(p.H.grid, 1.0);
  int iterations = 0;
  for (auto _ : state) {
    const auto r = cg_solve_detailed(p.H, ones, opts);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.solution.values.data());
  }
  state.counters["cg_iterations"] = iterations;
}

}  // namespace

BENCHMARK(BM_apply)->Apply(set_args);
BENCHMARK(BM_dot)->Apply(set_args);
BENCHMARK(BM_line_solve)->Apply(set_args);
BENCHMARK(BM_multigrid_vcycle)->Args({2, 32, 0})->Args({2, 32, 1})->Args({3, 4, 0})->Args({3, 4, 1})->ArgNames({"dim", "cells", "omp"});
BENCHMARK(BM_cg_solve)->Args({1, 4096, 0})->Args({1, 4096, 1})->Args({2, 32, 0})->Args({2, 32, 1})->ArgNames({"dim", "cells", "omp"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
