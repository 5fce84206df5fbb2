// Acceptance suite: one PASS/FAIL line per criterion id given on the command line.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "landscape/cli/config.hpp"
#include "landscape/cli/runner.hpp"
#include "landscape/disorder.hpp"
#include "landscape/green.hpp"
#include "landscape/landscape.hpp"
#include "landscape/percolation.hpp"
#include "landscape/rng.hpp"
#include "landscape/solver.hpp"

#ifndef LANDSCAPE_CONFIG_DIR
#define LANDSCAPE_CONFIG_DIR "configs"
#endif

using namespace landscape;
namespace fs = std::filesystem;

namespace {

const SolverOptions kTight{1e-12, 0, Preconditioner::automatic, Execution::parallel};

struct Verdict {
  bool pass;
  std::string detail;
};

fs::path scratch_root() {
  const fs::path p = fs::temp_directory_path() / "landscape_acceptance";
  fs::create_directories(p);
  return p;
}

cli::ExperimentConfig config_for(const std::string& name, const std::string& tag, int workers = 0) {
  auto c = cli::load_config(std::string(LANDSCAPE_CONFIG_DIR) + "/" + name + ".yaml");
  c.output_dir = (scratch_root() / tag).string();
  c.workers = workers > 0 ? workers : std::max(1, omp_get_max_threads());
  fs::remove_all(c.output_dir);
  return c;
}

std::string describe(const cli::RunOutcome& out, const std::vector<std::string>& names) {
  std::string s;
  for (const auto& p : out.manifest.predicates) {
    if (!names.empty() && std::find(names.begin(), names.end(), p.name) == names.end()) continue;
    s += fmt::format("{}{}={:.4g}{}", s.empty() ? "" : "; ", p.name, p.value, p.pass ? "" : " (fail)");
  }
  return s;
}

// Verdict from a subset of a run's predicates; empty `names` takes all of them.
Verdict from_run(const cli::RunOutcome& out, const std::vector<std::string>& names = {}) {
  if (out.exit_code != cli::kExitOk && out.exit_code != cli::kExitStatFail)
    return {false, fmt::format("run ended {} ({})", out.status, out.message)};
  bool pass = true;
  std::size_t seen = 0;
  for (const auto& p : out.manifest.predicates) {
    if (!names.empty() && std::find(names.begin(), names.end(), p.name) == names.end()) continue;
    ++seen;
    pass = pass && p.pass;
  }
  const std::size_t want = names.empty() ? std::max<std::size_t>(seen, 1) : names.size();
  if (seen != want) return {false, "missing predicates"};
  return {pass, describe(out, names)};
}

double rel_diff(const ScalarField& a, const ScalarField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

HamiltonianSpec bump_spec(int dim, int cells, Boundary bc, const DisorderLaw& law, std::uint64_t seed,
                          std::uint64_t sample, double lambda, double eta) {
  const Grid g(dim, cells, kMinBumpMesh, bc);
  const auto omega = sample_omega(law, g.cell_box(), seed, sample);
  return HamiltonianSpec(assemble_potential(omega, BumpProfile{}, g), lambda, eta);
}

HamiltonianSpec synthetic_spec(int dim, int cells, int mesh, Boundary bc, double lambda, double eta) {
  const Grid g(dim, cells, mesh, bc);
  ScalarField v(g);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (1.0 + std::sin(0.7 * static_cast<double>(i)));
  return HamiltonianSpec(v, lambda, eta);
}

Verdict criterion_1() {
  std::vector<HamiltonianSpec> specs;
  for (auto bc : {Boundary::dirichlet, Boundary::periodic})
    for (std::uint64_t s = 0; s < 3; ++s) specs.push_back(bump_spec(1, 32, bc, DisorderLaw::bernoulli(0.5), 1, s, 1.0, 1e-4));
  specs.push_back(bump_spec(1, 16, Boundary::dirichlet, DisorderLaw::uniform01(), 2, 0, 1.0, 0.0));
  specs.push_back(HamiltonianSpec(ScalarField(Grid(1, 4, 16, Boundary::dirichlet)), 1.0, 0.0));
  specs.push_back(synthetic_spec(1, 4, 8, Boundary::dirichlet, 1.0, 1e-3));
  specs.push_back(bump_spec(2, 2, Boundary::dirichlet, DisorderLaw::bernoulli(0.5), 3, 0, 1.0, 1e-6));
  specs.push_back(bump_spec(2, 3, Boundary::periodic, DisorderLaw::uniform01(), 3, 1, 1.0, 1e-3));
  specs.push_back(synthetic_spec(3, 2, 6, Boundary::dirichlet, 2.0, 1e-2));
  specs.push_back(synthetic_spec(3, 2, 6, Boundary::periodic, 2.0, 1e-2));
  double worst = 0.0;
  std::size_t largest = 0;
  for (const auto& H : specs) {
    largest = std::max(largest, H.grid.node_count());
    const ScalarField ones(H.grid, 1.0);
    worst = std::max(worst, rel_diff(cg_solve(H, ones, kTight), dense_solve_oracle(H, ones)));
    for (std::size_t x : {H.grid.center_node(), std::size_t{0}, H.grid.node_count() - 1}) {
      const ScalarField delta = discrete_delta(H.grid, x);
      worst = std::max(worst, rel_diff(cg_solve(H, delta, kTight), dense_solve_oracle(H, delta)));
    }
  }
  return {worst <= 1e-8,
          fmt::format("max relative difference {:.3g} over {} grids (largest {} nodes), tolerance 1e-8", worst,
                      specs.size(), largest)};
}

// Positivity, symmetry, domination chain and representation on 50 samples per geometry.
Verdict criterion_2_structure() {
  struct Geometry {
    int dim, cells;
    Boundary bc;
  };
  const Geometry geos[] = {{1, 32, Boundary::dirichlet}, {2, 4, Boundary::dirichlet}, {1, 16, Boundary::periodic}};
  const double lambda = 1.0, eta = 1e-4, stronger = 2.0;
  std::size_t samples = 0, failures = 0;
  double worst_sym = 0.0, worst_rep = 0.0, worst_dom = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& geo : geos) {
    for (std::uint64_t s = 0; s < 50; ++s, ++samples) {
      const auto H = bump_spec(geo.dim, geo.cells, geo.bc, DisorderLaw::bernoulli(0.5), 17, s, lambda, eta);
      const auto u = solve_landscape(H, kTight).u;
      const std::size_t a = H.grid.center_node();
      const std::size_t b = H.grid.cell_center_node(H.grid.cell_box().site((s * 7 + 3) % H.grid.cell_box().size()));
      const auto Ga = green_column(H, a, kTight), Gb = green_column(H, b, kTight);
      bool ok = u.min() > 0.0 && Ga.field.min() > 0.0 && Gb.field.min() > 0.0;
      min_ratio = std::min({min_ratio, u.min() / u.max_abs(), Ga.field.min() / Ga.field.max_abs()});

      const double sym = std::abs(Ga.field[b] - Gb.field[a]) / std::max(std::abs(Ga.field[b]), 1e-300);
      worst_sym = std::max(worst_sym, sym);
      ok = ok && sym <= 1e-8;

      const auto Gs = green_column(H.with_lambda(stronger * lambda), a, kTight);
      const auto free = massive_green_column(H, a, kTight);
      const double slack = 2.0 * kTight.tol * free.field.max_abs();
      for (std::size_t i = 0; i < Ga.field.size(); ++i) {
        const double v = std::max({-Gs.field[i], Gs.field[i] - Ga.field[i], Ga.field[i] - free.field[i]});
        worst_dom = std::max(worst_dom, v / slack);
        ok = ok && v <= slack;
      }
      ok = ok && massive_domination_check(Ga, kTight).pass;

      for (const auto& G : {std::cref(Ga), std::cref(Gb)}) {
        double total = 0.0;
        for (double m : cell_masses(G.get().field)) total += m;
        const double rep = std::abs(total - u[G.get().source]) / u[G.get().source];
        worst_rep = std::max(worst_rep, rep);
        ok = ok && rep <= 1e-8;
      }
      failures += ok ? 0 : 1;
    }
  }
  return {failures == 0,
          fmt::format("{} samples, {} failing; min u/max u or G/max G {:.3g}; symmetry {:.3g} (tol 1e-8); "
                      "domination worst {:.3g} of 2 tol slack; representation {:.3g} (tol 1e-8)",
                      samples, failures, min_ratio, worst_sym, worst_dom, worst_rep)};
}

Verdict criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const Verdict structure = criterion_2_structure();
  const Verdict rank_one = from_run(cli::run("rank-one-check", config_for("rank-one-check", "c2_rank_one")));
  const Verdict agmon = from_run(cli::run("agmon-check", config_for("agmon-check", "c2_agmon")));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {structure.pass && rank_one.pass && agmon.pass && secs < 600.0,
          fmt::format("(a,b,c,f) {} [{}]; (d) {} [{}]; (e) {} [{}]; {:.0f} s of 600", structure.pass ? "ok" : "FAIL",
                      structure.detail, rank_one.pass ? "ok" : "FAIL", rank_one.detail,
                      agmon.pass ? "ok" : "FAIL", agmon.detail, secs)};
}

Verdict criterion_cli(const std::string& sub, const std::vector<std::string>& names = {}) {
  return from_run(cli::run(sub, config_for(sub, "c_" + sub)), names);
}

std::map<std::string, std::string> read_csv_row(const fs::path& path, const std::string& key_col,
                                                const std::string& key) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  for (std::stringstream ss(line); std::getline(ss, line, ',');) header.push_back(line);
  const auto col = std::find(header.begin(), header.end(), key_col) - header.begin();
  std::string row;
  while (std::getline(in, row)) {
    std::vector<std::string> cells;
    for (std::stringstream ss(row); std::getline(ss, line, ',');) cells.push_back(line);
    if (static_cast<std::size_t>(col) < cells.size() && cells[col] == key) {
      std::map<std::string, std::string> out;
      for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) out[header[i]] = cells[i];
      return out;
    }
  }
  return {};
}

Verdict criterion_8() {
  const auto gd = config_for("green-decay", "c8_reference");
  const auto ref_run = cli::run("green-decay", gd);
  if (ref_run.exit_code != cli::kExitOk) return {false, "reference green-decay run failed: " + ref_run.status};
  const auto row = read_csv_row(fs::path(gd.output_dir) / "fits.csv", "p", "1");
  if (row.empty()) return {false, "reference fits.csv has no p = 1 row"};
  auto vd = config_for("vertical-derivative", "c8_vertical");
  vd.tolerances["reference_rate"] = std::stod(row.at("rate"));
  const Verdict v = from_run(cli::run("vertical-derivative", vd));
  return {v.pass, fmt::format("reference rate {} from green decay; {}", row.at("rate"), v.detail)};
}

std::vector<int> bellman_ford(const CoarseGraph& g, std::size_t origin) {
  const Box box = g.vertex_box();
  std::vector<int> d(box.size(), std::numeric_limits<int>::max() / 2);
  d[origin] = 0;
  for (std::size_t round = 0; round < box.size(); ++round) {
    bool changed = false;
    for (std::size_t v = 0; v < box.size(); ++v)
      for (int a = 0; a < g.dim; ++a) {
        if (!g.has_edge(v, a)) continue;
        Index3 w = box.site(v);
        w[static_cast<std::size_t>(a)] += 1;
        const std::size_t j = box.linear(w);
        const int wt = g.edge(v, a);
        if (d[v] + wt < d[j]) d[j] = d[v] + wt, changed = true;
        if (d[j] + wt < d[v]) d[v] = d[j] + wt, changed = true;
      }
    if (!changed) break;
  }
  return d;
}

Verdict criterion_9a() {
  std::size_t mismatches = 0, pairs = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    RandomStream rng(97, StreamDomain::synthetic, s);
    const double p_open = 0.2 + 0.6 * rng.uniform();
    std::vector<std::uint8_t> xi(5 * 5 * 2);
    for (auto& x : xi) x = rng.uniform() < p_open ? 1 : 0;
    const auto g = CoarseGraph::from_xi(2, 5, 1, 0.5, xi);
    for (std::size_t o = 0; o < g.vertex_count(); ++o, ++pairs)
      if (chemical_distance(g, g.vertex_box().site(o)).dist != bellman_ford(g, o)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("{} origin maps over 200 graphs, {} mismatches", pairs, mismatches)};
}

std::map<std::string, std::string> csv_checksums(const cli::RunOutcome& out) {
  std::map<std::string, std::string> m;
  for (const auto& f : out.manifest.files)
    if (f.name.ends_with(".csv")) m[f.name] = f.sha256;
  return m;
}

Verdict criterion_10() {
  struct Probe {
    std::string sub;
    std::function<void(cli::ExperimentConfig&)> shrink;
  };
  const std::vector<Probe> probes{
      {"selftest", [](cli::ExperimentConfig&) {}},
      {"green-decay", [](cli::ExperimentConfig& c) { c.N_samples = 60; }},
      {"fpp-kesten", [](cli::ExperimentConfig& c) { c.N_samples = 100; }},
      {"anchor-1d", [](cli::ExperimentConfig& c) { c.N_samples = 500; }},
      {"solve-landscape", [](cli::ExperimentConfig&) {}},
  };
  std::string detail;
  bool pass = true;
  for (const auto& p : probes) {
    std::vector<std::map<std::string, std::string>> sums;
    for (int run = 0; run < 3; ++run) {
      auto c = config_for(p.sub, fmt::format("c10_{}_{}", p.sub, run), run == 2 ? 4 : 1);
      p.shrink(c);
      sums.push_back(csv_checksums(cli::run(p.sub, c)));
    }
    const bool same = !sums[0].empty() && sums[0] == sums[1] && sums[0] == sums[2];
    pass = pass && same;
    detail += fmt::format("{}{} {} ({} csv)", detail.empty() ? "" : "; ", p.sub, same ? "identical" : "DIFFERENT",
                          sums[0].size());
  }
  return {pass, "rerun and 1 vs 4 workers: " + detail};
}

const std::map<std::string, std::function<Verdict()>>& criteria() {
  static const std::map<std::string, std::function<Verdict()>> c{
      {"1", criterion_1},
      {"2", criterion_2},
      {"3", [] { return criterion_cli("energy-check"); }},
      {"4", [] { return criterion_cli("eta-convergence"); }},
      {"5", [] { return criterion_cli("green-decay"); }},
      {"6a", [] { return criterion_cli("lambda-scaling", {"rate_ratio_0.04_0.01", "rate_ratio_0.16_0.04"}); }},
      {"6b", [] { return criterion_cli("lambda-scaling", {"rate_ratio_100_10"}); }},
      {"7", [] { return criterion_cli("covariance"); }},
      {"8", criterion_8},
      {"9a", criterion_9a},
      {"9b", [] { return criterion_cli("fpp-kesten"); }},
      {"9c", [] { return criterion_cli("cluster-tail"); }},
      {"9d", [] { return criterion_cli("anchor-1d"); }},
      {"10", criterion_10},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> ids(argv + 1, argv + argc);
  if (ids.empty())
    for (const auto& [id, f] : criteria()) ids.push_back(id);
  int failed = 0;
  for (const auto& id : ids) {
    const auto it = criteria().find(id);
    if (it == criteria().end()) {
      fmt::print("FAIL criterion {}: unknown id\n", id);
      ++failed;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = it->second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("{} criterion {}: {} [{:.1f} s]\n", v.pass ? "PASS" : "FAIL", id, v.detail, secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
