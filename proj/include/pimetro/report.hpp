#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pimetro/histogram.hpp"

namespace pimetro {

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Writes bytes verbatim (binary mode, no newline translation).
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Comma-separated table with a mandatory header; '.' decimals, '\n' rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Row length must match the header.
  void add_row(std::vector<std::string> row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Fixed-point text with `digits` decimals.
std::string format_fixed(double value, int digits = 6);

/// Standalone SVG bar chart of the in-window bins, one labelled slot per
/// bin and one <rect class="bar"> per non-zero bin. Output bytes depend only
/// on the histogram. Throws std::invalid_argument for an empty histogram.
std::string histogram_svg(const Histogram& hist, std::string_view title = "second iteration");

void render_histogram_svg(const Histogram& hist, const std::filesystem::path& path,
                          std::string_view title = "second iteration");

}  // namespace pimetro
