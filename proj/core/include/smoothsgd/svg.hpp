#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace smoothsgd {

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max] of the data; the last bin is closed. A degenerate range is
/// widened to [v - 0.5, v + 0.5].
Histogram make_histogram(std::span<const double> values, std::size_t bins);

/// Deterministic 640x360 SVG bar chart of `make_histogram(values, bins)`. Coordinates are
/// printed with three decimals so identical inputs give identical bytes.
std::string render_svg_histogram(std::span<const double> values, std::size_t bins,
                                 const std::string& title = {});

void emit_svg_histogram(std::span<const double> values, std::size_t bins,
                        const std::filesystem::path& path, const std::string& title = {});

}  // namespace smoothsgd
