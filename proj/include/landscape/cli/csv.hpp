#pragma once

#include <concepts>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace landscape::cli {

// Fixed-column CSV with 17 significant digits for floating-point cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  template <class... Ts>
  void row(const Ts&... cells) {
    std::string line;
    (append(line, cells), ...);
    line.back() = '\n';
    out_ << line;
  }

 private:
  static void append(std::string& line, double x) { line += fmt::format("{:.17g},", x); }
  static void append(std::string& line, bool b) { line += b ? "1," : "0,"; }
  static void append(std::string& line, std::string_view s) { line += fmt::format("{},", s); }
  static void append(std::string& line, const std::string& s) { line += s + ","; }
  static void append(std::string& line, const char* s) { line += fmt::format("{},", s); }
  template <std::integral T>
  static void append(std::string& line, T v) {
    line += fmt::format("{},", v);
  }

  std::ofstream out_;
};

}  // namespace landscape::cli
