#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "landscape/cli/config.hpp"
#include "landscape/cli/csv.hpp"
#include "landscape/cli/manifest.hpp"

namespace landscape::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitSolver = 3,
  kExitStatFail = 4,
  kExitInconclusive = 5,
};

// State shared by a subcommand while it writes into the output directory.
class RunContext {
 public:
  RunContext(ExperimentConfig config, std::filesystem::path dir);

  const ExperimentConfig& config() const noexcept { return config_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) const;
  void predicate(const std::string& name, bool pass, double value, double threshold,
                 const std::string& detail = "");
  void note(const std::string& line) { notes_.push_back(line); }
  void mark_inconclusive(const std::string& why);

  const std::vector<Predicate>& predicates() const noexcept { return predicates_; }
  const std::vector<std::string>& notes() const noexcept { return notes_; }
  bool inconclusive() const noexcept { return inconclusive_; }

 private:
  ExperimentConfig config_;
  std::filesystem::path dir_;
  std::vector<Predicate> predicates_;
  std::vector<std::string> notes_;
  bool inconclusive_ = false;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status;   // COMPLETE, PASS, FAIL, INCONCLUSIVE, or an error class
  std::string message;
  RunManifest manifest;
};

// Validates `config` for `subcommand`, runs it, and writes CSVs, summary.txt
// and manifest.json under config.output_dir. Never throws for run errors;
// they are mapped onto the exit-code taxonomy.
RunOutcome run(const std::string& subcommand, const ExperimentConfig& config);

// Subcommand bodies; each writes its data files and predicates into ctx.
void run_solve_landscape(RunContext& ctx);
void run_green_decay(RunContext& ctx);
void run_lambda_scaling(RunContext& ctx);
void run_covariance(RunContext& ctx);
void run_vertical_derivative(RunContext& ctx);
void run_eta_convergence(RunContext& ctx);
void run_energy_check(RunContext& ctx);
void run_agmon_check(RunContext& ctx);
void run_rank_one_check(RunContext& ctx);
void run_fpp_kesten(RunContext& ctx);
void run_cluster_tail(RunContext& ctx);
void run_anchor_1d(RunContext& ctx);
void run_selftest(RunContext& ctx);

}  // namespace landscape::cli
