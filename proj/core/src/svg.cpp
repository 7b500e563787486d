#include "smoothsgd/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "smoothsgd/point.hpp"

namespace smoothsgd {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 360.0;
constexpr double kLeft = 48.0;
constexpr double kRight = 16.0;
constexpr double kTop = 28.0;
constexpr double kBottom = 36.0;

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  // Avoid "-0.000".
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
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

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  require(bins >= 1, "make_histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  if (h.hi == h.lo) {
    h.lo -= 0.5;
    h.hi += 0.5;
  }
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    auto k = static_cast<std::size_t>((v - h.lo) / width);
    h.counts[std::min(k, bins - 1)]++;
  }
  return h;
}

std::string render_svg_histogram(std::span<const double> values, std::size_t bins,
                                 const std::string& title) {
  const Histogram h = make_histogram(values, bins);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double base = kTop + plot_h;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\" "
         "viewBox=\"0 0 640 360\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"360\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += "<text x=\"320.000\" y=\"18.000\" text-anchor=\"middle\" font-size=\"13\">" +
           escape(title) + "</text>\n";
  }
  svg += "<line x1=\"" + fixed3(kLeft) + "\" y1=\"" + fixed3(base) + "\" x2=\"" +
         fixed3(kLeft + plot_w) + "\" y2=\"" + fixed3(base) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed3(kLeft) + "\" y1=\"" + fixed3(kTop) + "\" x2=\"" + fixed3(kLeft) +
         "\" y2=\"" + fixed3(base) + "\" stroke=\"black\"/>\n";

  const std::size_t peak = values.empty() ? 0 : *std::max_element(h.counts.begin(), h.counts.end());
  const double bar_w = plot_w / static_cast<double>(bins);
  for (std::size_t k = 0; k < bins && peak > 0; ++k) {
    if (h.counts[k] == 0) continue;
    const double bar_h = plot_h * static_cast<double>(h.counts[k]) / static_cast<double>(peak);
    svg += "<rect x=\"" + fixed3(kLeft + bar_w * static_cast<double>(k)) + "\" y=\"" +
           fixed3(base - bar_h) + "\" width=\"" + fixed3(bar_w) + "\" height=\"" +
           fixed3(bar_h) + "\" fill=\"steelblue\"/>\n";
  }
  if (!values.empty()) {
    svg += "<text x=\"" + fixed3(kLeft) + "\" y=\"" + fixed3(base + 16.0) +
           "\" font-size=\"11\">" + fixed3(h.lo) + "</text>\n";
    svg += "<text x=\"" + fixed3(kLeft + plot_w) + "\" y=\"" + fixed3(base + 16.0) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fixed3(h.hi) + "</text>\n";
    svg += "<text x=\"" + fixed3(kLeft - 4.0) + "\" y=\"" + fixed3(kTop + 4.0) +
           "\" text-anchor=\"end\" font-size=\"11\">" + std::to_string(peak) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_svg_histogram(std::span<const double> values, std::size_t bins,
                        const std::filesystem::path& path, const std::string& title) {
  const std::string svg = render_svg_histogram(values, bins, title);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << svg;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace smoothsgd
