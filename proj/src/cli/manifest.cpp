#include "landscape/cli/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "landscape/errors.hpp"
#include "landscape/rng.hpp"

namespace landscape::cli {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("cannot initialise SHA-256");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::vector<FileEntry> inventory(const std::filesystem::path& dir, const std::string& exclude) {
  std::vector<FileEntry> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = std::filesystem::relative(e.path(), dir).generic_string();
    if (rel == exclude) continue;
    out.push_back({rel, e.file_size(), sha256_file(e.path())});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["subcommand"] = subcommand;
  j["code_version"] = code_version;
  j["config"] = config_yaml;
  const std::uint64_t omega_key =
      splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(StreamDomain::omega)));
  j["seeds"] = {{"master_seed", master_seed},
                {"omega_key", fmt::format("{:016x}", omega_key)},
                {"sample_streams", fmt::format("0..{}", sample_count == 0 ? 0 : sample_count - 1)},
                {"note", "sample s draws omega_j from Philox4x32-10 at counter (j, s) under omega_key"}};
  j["started_utc"] = started_utc;
  j["wall_seconds"] = wall_seconds;
  ordered_json preds = ordered_json::array();
  for (const auto& p : predicates)
    preds.push_back({{"name", p.name},
                     {"pass", p.pass},
                     {"value", p.value},
                     {"threshold", p.threshold},
                     {"detail", p.detail}});
  j["predicates"] = preds;
  ordered_json files_json = ordered_json::array();
  for (const auto& f : files) files_json.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  j["files"] = files_json;
  j["status"] = status;
  j["exit_code"] = exit_code;
  return j.dump(2);
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << to_json() << "\n";
}

}  // namespace landscape::cli
