#include "pimetro/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace pimetro {

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(path, "write failed");
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CSV header is empty");
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CSV row width mismatch");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    line += '\n';
    return line;
  };
  std::string out = join(header_);
  for (const auto& r : rows_) out += join(r);
  return out;
}

std::string format_fixed(double value, int digits) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{:.{}f}", value, digits);
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 360.0;
constexpr double kLeft = 56.0;
constexpr double kRight = 16.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 44.0;

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string histogram_svg(const Histogram& hist, std::string_view title) {
  if (hist.total() == 0) throw std::invalid_argument("cannot render an empty histogram");
  const auto counts = hist.counts();
  const std::int64_t max_count = std::max<std::int64_t>(
      1, *std::max_element(counts.begin(), counts.end()));
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double slot = plot_w / static_cast<double>(counts.size());
  const double bar_w = slot * 0.8;
  const double base_y = kTop + plot_h;

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
      kWidth, kHeight);
  svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" "
      "text-anchor=\"middle\">{} (n={})</text>\n",
      kWidth / 2.0, escape_xml(title), hist.total());
  // Axes.
  svg += fmt::format(
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#000000\"/>\n",
      kLeft, kTop, base_y);
  svg += fmt::format(
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#000000\"/>\n",
      kLeft, base_y, kLeft + plot_w);
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
      "text-anchor=\"end\">{}</text>\n",
      kLeft - 6.0, kTop + 4.0, max_count);
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
      "text-anchor=\"end\">0</text>\n",
      kLeft - 6.0, base_y + 4.0);

  for (std::size_t i = 0; i < counts.size(); ++i) {
    const int bin = hist.lo() + static_cast<int>(i);
    const double x = kLeft + slot * static_cast<double>(i) + (slot - bar_w) / 2.0;
    if (counts[i] > 0) {
      const double h = plot_h * static_cast<double>(counts[i]) / static_cast<double>(max_count);
      svg += fmt::format(
          "<rect class=\"bar\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
          "fill=\"#4c72b0\"><title>{}: {}</title></rect>\n",
          x, base_y - h, bar_w, h, bin, counts[i]);
    }
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"middle\">{}</text>\n",
        x + bar_w / 2.0, base_y + 16.0, bin);
  }
  if (hist.underflow() > 0 || hist.overflow() > 0) {
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"end\">outside window: {} below, {} above</text>\n",
        kWidth - kRight, kHeight - 8.0, hist.underflow(), hist.overflow());
  }
  svg += "</svg>\n";
  return svg;
}

void render_histogram_svg(const Histogram& hist, const std::filesystem::path& path,
                          std::string_view title) {
  write_text_file(path, histogram_svg(hist, title));
}

}  // namespace pimetro
