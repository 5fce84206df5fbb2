#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace landscape::cli {

struct Predicate {
  std::string name;
  bool pass;
  double value;
  double threshold;
  std::string detail;
};

struct FileEntry {
  std::string name;  // relative to the output directory
  std::uintmax_t bytes;
  std::string sha256;
};

// Record of one run: enough to reproduce it and to audit its outputs.
struct RunManifest {
  std::string subcommand;
  std::string config_yaml;
  std::string code_version;
  std::uint64_t master_seed = 0;
  std::uint64_t sample_count = 0;
  std::string started_utc;
  double wall_seconds = 0.0;
  std::vector<Predicate> predicates;
  std::vector<FileEntry> files;
  std::string status;
  int exit_code = 0;

  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& path);

// Inventory of every regular file under `dir` except `exclude`, sorted by name.
std::vector<FileEntry> inventory(const std::filesystem::path& dir, const std::string& exclude);

std::string utc_timestamp();

}  // namespace landscape::cli
