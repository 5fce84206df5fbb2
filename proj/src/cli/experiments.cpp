#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "landscape/cli/runner.hpp"
#include "landscape/errors.hpp"
#include "landscape/green.hpp"
#include "landscape/landscape.hpp"
#include "landscape/percolation.hpp"
#include "landscape/rng.hpp"
#include "landscape/sampling.hpp"
#include "landscape/statistics.hpp"

namespace landscape::cli {

namespace {

SolverOptions per_sample_solver(const ExperimentConfig& c) {
  SolverOptions o = c.solver();
  if (c.workers > 1) o.execution = Execution::serial;
  return o;
}

HamiltonianSpec sample_hamiltonian(const ExperimentConfig& c, const Grid& grid, const DisorderLaw& law,
                                   double lambda, double eta, std::uint64_t s) {
  const OmegaField omega = sample_omega(law, grid.cell_box(), c.master_seed, s);
  return HamiltonianSpec(assemble_potential(omega, BumpProfile{}, grid), lambda, eta);
}

double percolation_gamma(const ExperimentConfig& c, const DisorderLaw& law) {
  return c.gamma > 0.0 ? c.gamma : law.upper_quartile();
}

std::string ptag(double p) { return fmt::format("{:g}", p); }

void write_curve(const RunContext& ctx, const std::string& name, const MomentCurve& curve) {
  auto out = ctx.csv(name, {"r", "value", "ci"});
  for (std::size_t i = 0; i < curve.distances.size(); ++i) out.row(curve.distances[i], curve.values[i], curve.ci[i]);
}

void note_skips(RunContext& ctx, const SampleLog& log) {
  if (!log.skipped.empty()) ctx.note(fmt::format("{} samples skipped after solver failures", log.skipped.size()));
}

}  // namespace

void run_solve_landscape(RunContext& ctx) {
  const auto& c = ctx.config();
  const Grid grid(c.d, c.L, c.m, c.boundary());
  const DisorderLaw law = c.law.build();
  const SolverOptions opts = per_sample_solver(c);
  const auto window = interior_cells(grid, c.margin);
  if (window.empty()) throw ValidationError("field 'margin': leaves no interior cells");
  const Box cells = grid.cell_box();

  struct Row {
    double umin, umax;
    int iterations;
    std::vector<double> window_means;  // per p: mean over window cells of (sup_Q u)^p
  };
  std::function<Row(std::uint64_t)> task = [&](std::uint64_t s) {
    const HamiltonianSpec H = sample_hamiltonian(c, grid, law, c.lambda.front(), c.eta.front(), s);
    const LandscapeSolution sol = solve_landscape(H, opts);
    if (s == 0) {
      auto out = ctx.csv("landscape_sample0.csv", {"node", "x0", "x1", "x2", "V", "u"});
      for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const Index3 n = grid.node_coords(i);
        out.row(i, grid.position(n[0]), c.d > 1 ? grid.position(n[1]) : 0.0, c.d > 2 ? grid.position(n[2]) : 0.0,
                H.potential[i], sol.u[i]);
      }
    }
    Row row{sol.u.min(), sol.u.max(), 0, {}};
    for (double p : c.p) {
      double acc = 0.0;
      for (const auto& z : window) acc += std::pow(sol.sup_per_cell[cells.linear(z)], p);
      row.window_means.push_back(acc / static_cast<double>(window.size()));
    }
    return row;
  };
  SampleLog log;
  auto rows = run_samples(c.N_samples, c.workers, task, log);
  note_skips(ctx, log);

  std::vector<Row> used;
  auto per = ctx.csv("per_sample.csv", {"sample", "u_min", "u_max"});
  for (std::size_t s = 0; s < rows.size(); ++s)
    if (rows[s]) {
      per.row(s, rows[s]->umin, rows[s]->umax);
      used.push_back(*rows[s]);
    }
  auto mom = ctx.csv("moments.csv", {"p", "moment", "ci", "n_samples", "n_cells"});
  bool positive = true;
  for (const auto& r : used) positive = positive && r.umin > 0.0;
  for (std::size_t k = 0; k < c.p.size(); ++k) {
    const double p = c.p[k];
    auto stat = [&](std::span<const std::size_t> idx) {
      double m = 0.0;
      for (auto i : idx) m += used[i].window_means[k];
      return std::pow(m / static_cast<double>(idx.size()), 1.0 / p);
    };
    const auto bs = bootstrap(used.size(), stat, splitmix64(c.master_seed ^ 0xb007ULL), c.bootstrap_resamples);
    mom.row(p, bs.estimate, bs.ci, used.size(), window.size());
  }
  double umin = std::numeric_limits<double>::infinity();
  for (const auto& r : used) umin = std::min(umin, r.umin);
  ctx.predicate("landscape_positive", positive, umin, 0.0, "min over samples and nodes of u");
}

void run_green_decay(RunContext& ctx) {
  const auto& c = ctx.config();
  ExperimentParams params = c.experiment_params();
  auto fits = ctx.csv("fits.csv", {"p", "rate", "rate_stderr", "log_prefactor", "r_squared", "n_points", "r_min", "r_max"});
  std::vector<std::pair<double, DecayFit>> done;
  for (double p : c.p) {
    params.p = p;
    const auto result = green_decay_experiment(params);
    note_skips(ctx, result.log);
    write_curve(ctx, "curve_p" + ptag(p) + ".csv", result.curve);
    const double vmax = *std::max_element(result.curve.values.begin(), result.curve.values.end());
    const DecayFit fit = fit_exponential_decay(result.curve, c.fit_r_min, c.fit_r_max, 1e-10 * vmax);
    fits.row(p, fit.rate, fit.rate_stderr, fit.log_prefactor, fit.r_squared, fit.n_points, fit.r_min, fit.r_max);
    ctx.predicate("rate_positive_p" + ptag(p), fit.rate > 0.0, fit.rate, 0.0);
    const double r2min = c.tolerance("r_squared_min");
    ctx.predicate("r_squared_p" + ptag(p), fit.r_squared >= r2min, fit.r_squared, r2min);
    done.emplace_back(p, fit);
  }
  const auto find = [&](double p) -> const DecayFit* {
    for (const auto& [q, f] : done)
      if (q == p) return &f;
    return nullptr;
  };
  if (const DecayFit *f1 = find(1.0), *f2 = find(2.0); f1 && f2) {
    const double ci = 1.96 * std::sqrt(0.25 * f1->rate_stderr * f1->rate_stderr + f2->rate_stderr * f2->rate_stderr);
    const double bound = f1->rate / 2.0 - ci;
    ctx.predicate("rate_p2_vs_p1", f2->rate >= bound, f2->rate, bound, "rate(p=2) >= rate(p=1)/2 - ci");
  }
}

void run_lambda_scaling(RunContext& ctx) {
  const auto& c = ctx.config();
  const ExperimentParams params = c.experiment_params();
  const auto rows = lambda_scaling_curve(params, c.lambda, FitWindow{c.fit_r_min, c.fit_r_max, 1e-10});
  auto table = ctx.csv("rates.csv", {"lambda", "eta", "rate", "rate_stderr", "r_squared", "n_points", "scaled_rate"});
  auto curves = ctx.csv("curves.csv", {"lambda", "r", "value", "ci"});
  for (const auto& row : rows) {
    note_skips(ctx, row.result.log);
    table.row(row.lambda, row.eta, row.fit.rate, row.fit.rate_stderr, row.fit.r_squared, row.fit.n_points,
              row.scaled_rate);
    const auto& cv = row.result.curve;
    for (std::size_t i = 0; i < cv.distances.size(); ++i) curves.row(row.lambda, cv.distances[i], cv.values[i], cv.ci[i]);
  }
  const double slo = c.tolerance("small_lambda_ratio_lo"), shi = c.tolerance("small_lambda_ratio_hi");
  const double llo = c.tolerance("large_lambda_ratio_lo"), lhi = c.tolerance("large_lambda_ratio_hi");
  const LambdaRow* first_large = nullptr;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& a = rows[i];
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& b = rows[j];
      if (b.lambda <= 1.0 && std::abs(b.lambda - 4.0 * a.lambda) <= 1e-12 * b.lambda) {
        const double ratio = b.fit.rate / a.fit.rate;
        ctx.predicate(fmt::format("rate_ratio_{:g}_{:g}", b.lambda, a.lambda), ratio >= slo && ratio <= shi, ratio,
                      slo, fmt::format("corridor [{:g}, {:g}]", slo, shi));
      }
    }
    if (a.lambda >= 10.0) {
      if (!first_large) {
        first_large = &a;
      } else {
        const double ratio = a.fit.rate / first_large->fit.rate;
        ctx.predicate(fmt::format("rate_ratio_{:g}_{:g}", a.lambda, first_large->lambda),
                      ratio >= llo && ratio <= lhi, ratio, llo, fmt::format("corridor [{:g}, {:g}]", llo, lhi));
      }
    }
  }
}

void run_covariance(RunContext& ctx) {
  const auto& c = ctx.config();
  std::vector<Observable> obs;
  for (const auto& o : c.observables) obs.push_back(observable_from_string(o));
  const auto result = covariance_experiment(c.experiment_params(), obs, c.separations,
                                            separation_sampling_from_string(c.separation_sampling));
  note_skips(ctx, result.log);
  auto pts = ctx.csv("covariance.csv", {"observable", "separation", "cov", "ci", "stderr"});
  for (const auto& p : result.points) pts.row(to_string(p.observable), p.separation, p.cov, p.ci, p.stderr_);
  {
    std::vector<std::string> header{"sample"};
    header.insert(header.end(), result.columns.begin(), result.columns.end());
    auto raw = ctx.csv("samples.csv", header);
    for (std::size_t s = 0; s < result.per_sample.size(); ++s) {
      std::string line = fmt::format("{}", s);
      for (double v : result.per_sample[s]) line += fmt::format(",{:.17g}", v);
      raw.row(std::string_view(line));
    }
  }
  // Smallest against largest separation per observable.
  const auto [near_it, far_it] = std::minmax_element(c.separations.begin(), c.separations.end());
  const double ratio = c.tolerance("cov_ratio"), nsig = c.tolerance("cov_sigma");
  if (*near_it == *far_it) return;
  for (Observable o : obs) {
    const CovariancePoint *near = nullptr, *far = nullptr;
    for (const auto& p : result.points) {
      if (p.observable != o) continue;
      if (p.separation == *near_it) near = &p;
      if (p.separation == *far_it) far = &p;
    }
    const double a = std::abs(far->cov), b = std::abs(near->cov);
    const bool pass = a <= ratio * b || a <= nsig * far->stderr_;
    ctx.predicate(fmt::format("cov_decay_{}", to_string(o)), pass, a, std::max(ratio * b, nsig * far->stderr_),
                  fmt::format("|cov({})| vs {:g} |cov({})| or {:g} stderr", *far_it, ratio, *near_it, nsig));
  }
}

void run_vertical_derivative(RunContext& ctx) {
  const auto& c = ctx.config();
  const auto result = vertical_derivative_decay(c.experiment_params(), c.z_offsets);
  note_skips(ctx, result.log);
  write_curve(ctx, "curve.csv", result.curve);
  {
    std::vector<std::string> header{"sample"};
    for (int r : c.z_offsets) header.push_back(fmt::format("delta_r{}", r));
    auto raw = ctx.csv("samples.csv", header);
    for (std::size_t s = 0; s < result.per_sample.size(); ++s) {
      std::string line = fmt::format("{}", s);
      for (double v : result.per_sample[s]) line += fmt::format(",{:.17g}", v);
      raw.row(std::string_view(line));
    }
  }
  const double vmax = *std::max_element(result.curve.values.begin(), result.curve.values.end());
  const DecayFit fit = fit_exponential_decay(result.curve, c.fit_r_min, c.fit_r_max, 1e-10 * vmax);
  auto fits = ctx.csv("fit.csv", {"rate", "rate_stderr", "log_prefactor", "r_squared", "n_points"});
  fits.row(fit.rate, fit.rate_stderr, fit.log_prefactor, fit.r_squared, fit.n_points);
  ctx.predicate("rate_positive", fit.rate > 0.0, fit.rate, 0.0);
  const double ref = c.tolerance("reference_rate");
  if (ref > 0.0) {
    const double f = c.tolerance("reference_factor");
    const double ratio = fit.rate / ref;
    ctx.predicate("rate_vs_reference", ratio >= 1.0 / f && ratio <= f, ratio, f,
                  fmt::format("rate / {:g} within factor {:g}", ref, f));
  }
}

void run_eta_convergence(RunContext& ctx) {
  const auto& c = ctx.config();
  const Grid grid(c.d, c.L, c.m, c.boundary());
  const DisorderLaw law = c.law.build();
  const SolverOptions opts = per_sample_solver(c);
  std::function<std::vector<EtaRow>(std::uint64_t)> task = [&](std::uint64_t s) {
    const OmegaField omega = sample_omega(law, grid.cell_box(), c.master_seed, s);
    return eta_convergence_study(omega, grid, c.lambda.front(), c.eta, c.margin, opts);
  };
  SampleLog log;
  auto rows = run_samples(c.N_samples, c.workers, task, log);
  note_skips(ctx, log);
  auto out = ctx.csv("eta_rows.csv", {"sample", "eta", "sup_diff", "sup_grad_diff"});
  std::vector<double> mean_diff(c.eta.size(), 0.0), mean_grad(c.eta.size(), 0.0);
  std::size_t used = 0;
  std::vector<double> ratios;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (!rows[s]) continue;
    ++used;
    for (std::size_t k = 0; k < rows[s]->size(); ++k) {
      const auto& r = (*rows[s])[k];
      out.row(s, r.eta, r.sup_diff, r.sup_grad_diff);
      mean_diff[k] += r.sup_diff;
      mean_grad[k] += r.sup_grad_diff;
    }
    ratios.push_back((*rows[s])[0].sup_diff / (*rows[s])[1].sup_diff);
  }
  auto means = ctx.csv("eta_means.csv", {"eta", "mean_sup_diff", "mean_sup_grad_diff"});
  for (std::size_t k = 0; k < c.eta.size(); ++k) {
    mean_diff[k] /= static_cast<double>(used);
    mean_grad[k] /= static_cast<double>(used);
    means.row(c.eta[k], mean_diff[k], mean_grad[k]);
  }
  const double lo = c.tolerance("eta_ratio_lo"), hi = c.tolerance("eta_ratio_hi");
  const double ratio = mean_diff[0] / mean_diff[1];
  ctx.predicate("eta_ratio", ratio >= lo && ratio <= hi, ratio, lo,
                fmt::format("mean diff({:g}) / mean diff({:g}) in [{:g}, {:g}]; per-sample ratios {:.4g}..{:.4g}",
                            c.eta[0], c.eta[1], lo, hi, *std::min_element(ratios.begin(), ratios.end()),
                            *std::max_element(ratios.begin(), ratios.end())));
}

void run_energy_check(RunContext& ctx) {
  const auto& c = ctx.config();
  const Grid grid(c.d, c.L, c.m, c.boundary());
  const DisorderLaw law = c.law.build();
  const SolverOptions opts = per_sample_solver(c);
  std::function<LandscapeSolution(std::uint64_t)> task = [&](std::uint64_t s) {
    return solve_landscape(sample_hamiltonian(c, grid, law, c.lambda.front(), c.eta.front(), s), opts);
  };
  SampleLog log;
  auto rows = run_samples(c.N_samples, c.workers, task, log);
  note_skips(ctx, log);
  std::vector<LandscapeSolution> sols;
  for (auto& r : rows)
    if (r) sols.push_back(std::move(*r));
  auto out = ctx.csv("energy.csv", {"sample", "energy_per_cell", "integral_per_cell"});
  const double cells = static_cast<double>(grid.cell_count());
  for (std::size_t s = 0; s < sols.size(); ++s)
    out.row(s, dirichlet_energy(sols[s].u) / cells, field_integral(sols[s].u) / cells);
  const EnergyReport rep = energy_estimate_check(sols);
  ctx.predicate("energy_inequality", rep.pass, rep.lhs, rep.rhs, "avg energy <= avg integral + 3 stderr");
  const double nsig = c.tolerance("energy_sigma");
  ctx.predicate("energy_margin_sigma", rep.margin_sigma >= nsig, rep.margin_sigma, nsig,
                fmt::format("(rhs - lhs) / stderr, stderr {:.3g}", rep.diff_stderr));
}

void run_agmon_check(RunContext& ctx) {
  const auto& c = ctx.config();
  const Grid grid(c.d, c.L, c.m, c.boundary());
  const DisorderLaw law = c.law.build();
  const SolverOptions opts = per_sample_solver(c);
  const double lambda = c.lambda.front();
  std::function<std::vector<AgmonReport>(std::uint64_t)> task = [&](std::uint64_t s) {
    const HamiltonianSpec H = sample_hamiltonian(c, grid, law, lambda, c.eta.front(), s);
    const GreenColumn G = green_column(H, grid.center_node(), opts);
    std::vector<AgmonReport> reps;
    for (double f : c.agmon_mu_factors)
      reps.push_back(agmon_inequality_check(
          G, AgmonParams{f * std::sqrt(lambda), 1e300, c.agmon_cutoff_inner, c.agmon_cutoff_outer}));
    return reps;
  };
  SampleLog log;
  auto rows = run_samples(c.N_samples, c.workers, task, log);
  note_skips(ctx, log);
  auto out = ctx.csv("agmon.csv", {"sample", "mu", "lhs", "rhs", "pass"});
  std::vector<std::size_t> failures(c.agmon_mu_factors.size(), 0);
  std::size_t used = 0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (!rows[s]) continue;
    ++used;
    for (std::size_t k = 0; k < rows[s]->size(); ++k) {
      const auto& r = (*rows[s])[k];
      out.row(s, c.agmon_mu_factors[k] * std::sqrt(lambda), r.lhs, r.rhs, r.pass);
      if (!r.pass) ++failures[k];
    }
  }
  for (std::size_t k = 0; k < failures.size(); ++k)
    ctx.predicate(fmt::format("agmon_mu_{:g}sqrt_lambda", c.agmon_mu_factors[k]), failures[k] == 0,
                  static_cast<double>(failures[k]), 0.0, fmt::format("failing samples out of {}", used));
}

void run_rank_one_check(RunContext& ctx) {
  const auto& c = ctx.config();
  const Grid grid(c.d, c.L, c.m, c.boundary());
  const DisorderLaw law = c.law.build();
  const SolverOptions opts = per_sample_solver(c);
  Index3 z = grid.center_cell();
  z[0] += 1;
  Index3 xc = grid.center_cell();
  xc[0] -= 1;
  const std::size_t x = grid.cell_center_node(xc);
  struct Row {
    double omega_z;
    RankOneReport rep;
  };
  std::function<Row(std::uint64_t)> task = [&](std::uint64_t s) {
    const OmegaField omega = sample_omega(law, grid.cell_box(), c.master_seed, s);
    return Row{omega.at(z), rank_one_identity_check(omega, z, grid, c.lambda.front(), c.eta.front(), x,
                                                    grid.center_node(), opts)};
  };
  SampleLog log;
  auto rows = run_samples(c.N_samples, c.workers, task, log);
  note_skips(ctx, log);
  auto out = ctx.csv("rank_one.csv", {"sample", "omega_z", "lhs", "rhs", "relative_error"});
  double worst = 0.0;
  for (std::size_t s = 0; s < rows.size(); ++s)
    if (rows[s]) {
      out.row(s, rows[s]->omega_z, rows[s]->rep.lhs, rows[s]->rep.rhs, rows[s]->rep.relative_error);
      worst = std::max(worst, rows[s]->rep.relative_error);
    }
  const double tol = c.tolerance("rank_one_rel");
  ctx.predicate("rank_one_identity", worst <= tol, worst, tol, "max relative error over samples");
}

void run_fpp_kesten(RunContext& ctx) {
  const auto& c = ctx.config();
  KestenParams p;
  p.dim = c.d;
  p.coarse_cells = c.coarse_cells;
  p.law = c.law.build();
  p.gamma = percolation_gamma(c, p.law);
  p.k = c.k;
  p.radii = c.radii;
  p.c_probe = c.c_probe;
  p.samples = c.N_samples;
  p.seed = c.master_seed;
  p.workers = c.workers;
  const auto result = kesten_tail_experiment(p);
  note_skips(ctx, result.log);
  auto tail = ctx.csv("kesten_tail.csv",
                      {"R", "shell_hops", "threshold", "hits", "samples", "frequency", "ci_lo", "ci_hi"});
  for (const auto& r : result.rows)
    tail.row(r.radius, r.shell_hops, r.threshold, r.hits, r.samples, r.frequency, r.ci.lo, r.ci.hi);
  auto per = ctx.csv("kesten_samples.csv", {"sample", "R", "min_chemical_distance"});
  for (std::size_t s = 0; s < result.per_sample_min.size(); ++s)
    for (std::size_t i = 0; i < c.radii.size(); ++i) per.row(s, c.radii[i], result.per_sample_min[s][i]);
  ctx.note(fmt::format("k = {}, gamma = {:g}, c_probe = {:g}", result.k, p.gamma, result.c_probe));
  ctx.predicate("kesten_non_increasing", result.non_increasing, result.rows.back().frequency,
                result.rows.front().frequency, "tail frequencies non-increasing in R within Wilson intervals");
}

void run_cluster_tail(RunContext& ctx) {
  const auto& c = ctx.config();
  ClusterTailParams p;
  p.dim = c.d;
  p.coarse_cells = c.coarse_cells;
  p.law = c.law.build();
  p.gamma = percolation_gamma(c, p.law);
  p.k = c.k;
  p.samples = c.N_samples;
  p.seed = c.master_seed;
  p.workers = c.workers;
  p.n_min = c.n_min;
  p.n_max = c.n_max;
  p.bootstrap_resamples = c.bootstrap_resamples;
  const auto result = cluster_tail_experiment(p);
  note_skips(ctx, result.log);
  write_curve(ctx, "diameter_tail.csv", result.tail);
  auto per = ctx.csv("cluster_samples.csv", {"sample", "largest_fraction"});
  for (std::size_t s = 0; s < result.largest_fraction.size(); ++s) per.row(s, result.largest_fraction[s]);
  ctx.note(fmt::format("k = {}, gamma = {:g}", result.k, p.gamma));
  ctx.predicate("diameter_tail_decreasing", result.pass, result.fit.rate, 0.0,
                fmt::format("log-linear slope -{:.4g}, r_squared {:.3g}", result.fit.rate, result.fit.r_squared));
}

void run_anchor_1d(RunContext& ctx) {
  const auto& c = ctx.config();
  AnchorParams p;
  p.cells = c.L;
  p.law = c.law.build();
  if (c.gamma > 0.0) p.gamma = c.gamma;
  p.samples = c.N_samples;
  p.seed = c.master_seed;
  p.workers = c.workers;
  p.bootstrap_resamples = c.bootstrap_resamples;
  p.ps = c.p;
  const AnchorReport rep = anchoring_experiment_1d(p);
  auto mom = ctx.csv("gap_moments.csv", {"p", "estimate", "ci", "stderr", "exact", "z"});
  for (const auto& m : rep.moments) mom.row(m.p, m.estimate, m.ci, m.stderr_, m.exact, m.z);
  auto gaps = ctx.csv("gaps.csv", {"sample", "gap", "censored"});
  for (std::size_t s = 0; s < rep.gaps.size(); ++s) gaps.row(s, rep.gaps[s].gap, rep.gaps[s].censored);
  ctx.note(fmt::format("gamma = {:g}, q = {:g}, censored fraction {:.4g}", rep.gamma, rep.q, rep.censored_fraction));
  if (rep.status == RunStatus::inconclusive) {
    ctx.mark_inconclusive(rep.reason);
    return;
  }
  const double m1 = rep.moments.front().estimate / rep.moments.front().p;
  ctx.predicate("gap_linear_growth", rep.linear_growth, rep.moments.back().estimate, 2.0 * m1 * rep.moments.back().p,
                "M(p) <= 2 p M(1)");
  double worst = 0.0;
  for (const auto& m : rep.moments) worst = std::max(worst, std::abs(m.z));
  ctx.predicate("gap_matches_geometric_law", rep.matches_exact, worst, 3.0, "max |z| against the closed form");
}

}  // namespace landscape::cli
