#include "landscape/cli/runner.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "landscape/errors.hpp"

#ifndef LANDSCAPE_VERSION
#define LANDSCAPE_VERSION "unknown"
#endif

namespace landscape::cli {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path) {
  if (!out_) throw ValidationError("cannot write " + path.string());
  std::string line;
  for (const auto& h : header) line += h + ",";
  line.back() = '\n';
  out_ << line;
}

RunContext::RunContext(ExperimentConfig config, std::filesystem::path dir)
    : config_(std::move(config)), dir_(std::move(dir)) {}

CsvWriter RunContext::csv(const std::string& name, const std::vector<std::string>& header) const {
  return CsvWriter(dir_ / name, header);
}

void RunContext::predicate(const std::string& name, bool pass, double value, double threshold,
                           const std::string& detail) {
  predicates_.push_back({name, pass, value, threshold, detail});
}

void RunContext::mark_inconclusive(const std::string& why) {
  inconclusive_ = true;
  notes_.push_back("inconclusive: " + why);
}

namespace {

using Body = std::function<void(RunContext&)>;

const std::map<std::string, Body>& bodies() {
  static const std::map<std::string, Body> b{
      {"solve-landscape", run_solve_landscape},
      {"green-decay", run_green_decay},
      {"lambda-scaling", run_lambda_scaling},
      {"covariance", run_covariance},
      {"vertical-derivative", run_vertical_derivative},
      {"eta-convergence", run_eta_convergence},
      {"energy-check", run_energy_check},
      {"agmon-check", run_agmon_check},
      {"rank-one-check", run_rank_one_check},
      {"fpp-kesten", run_fpp_kesten},
      {"cluster-tail", run_cluster_tail},
      {"anchor-1d", run_anchor_1d},
      {"selftest", run_selftest},
  };
  return b;
}

void write_summary(const std::filesystem::path& path, const std::string& subcommand, const RunOutcome& out,
                   const RunContext* ctx) {
  std::ofstream s(path);
  s << "subcommand: " << subcommand << "\n";
  s << "status: " << out.status << "\n";
  s << "exit_code: " << out.exit_code << "\n";
  if (!out.message.empty()) s << "message: " << out.message << "\n";
  if (!ctx) return;
  for (const auto& p : ctx->predicates())
    s << fmt::format("{} {}: value {:.6g} threshold {:.6g}{}\n", p.pass ? "PASS" : "FAIL", p.name, p.value,
                     p.threshold, p.detail.empty() ? "" : " (" + p.detail + ")");
  for (const auto& n : ctx->notes()) s << "note: " << n << "\n";
}

}  // namespace

RunOutcome run(const std::string& subcommand, const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  out.manifest.subcommand = subcommand;
  out.manifest.config_yaml = to_yaml(config);
  out.manifest.code_version = LANDSCAPE_VERSION;
  out.manifest.master_seed = config.master_seed;
  out.manifest.sample_count = config.N_samples > 0 ? static_cast<std::uint64_t>(config.N_samples) : 0;
  out.manifest.started_utc = utc_timestamp();

  const std::filesystem::path dir = config.output_dir.empty() ? "out" : config.output_dir;
  std::optional<RunContext> ctx;
  try {
    if (!is_subcommand(subcommand)) throw ValidationError("unknown subcommand '" + subcommand + "'");
    config.validate(subcommand);
    std::filesystem::create_directories(dir);
    ctx.emplace(config, dir);
    bodies().at(subcommand)(*ctx);
    bool all_pass = true;
    for (const auto& p : ctx->predicates()) all_pass = all_pass && p.pass;
    if (!all_pass) {
      out.exit_code = kExitStatFail;
      out.status = "FAIL";
    } else if (ctx->inconclusive()) {
      out.exit_code = kExitInconclusive;
      out.status = "INCONCLUSIVE";
    } else {
      out.exit_code = kExitOk;
      out.status = ctx->predicates().empty() ? "COMPLETE" : "PASS";
    }
  } catch (const ValidationError& e) {
    out = {kExitValidation, "VALIDATION_ERROR", e.what(), out.manifest};
  } catch (const IndexError& e) {
    out = {kExitValidation, "VALIDATION_ERROR", e.what(), out.manifest};
  } catch (const SolverError& e) {
    out = {kExitSolver, "SOLVER_ERROR", e.what(), out.manifest};
  } catch (const ConsistencyError& e) {
    out = {kExitSolver, "SOLVER_ERROR", e.what(), out.manifest};
  } catch (const std::exception& e) {
    out = {kExitInternal, "INTERNAL_ERROR", e.what(), out.manifest};
  }

  out.manifest.status = out.status;
  out.manifest.exit_code = out.exit_code;
  if (ctx) out.manifest.predicates = ctx->predicates();
  // Nothing is written for runs rejected before the output directory exists.
  std::error_code ec;
  if (std::filesystem::is_directory(dir, ec) && ctx) {
    try {
      write_summary(dir / "summary.txt", subcommand, out, &*ctx);
      out.manifest.files = inventory(dir, "manifest.json");
      out.manifest.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.manifest.write(dir / "manifest.json");
    } catch (const std::exception& e) {
      out.exit_code = kExitInternal;
      out.status = "INTERNAL_ERROR";
      out.message = std::string("writing outputs failed: ") + e.what();
    }
  }
  return out;
}

}  // namespace landscape::cli
