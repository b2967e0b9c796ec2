#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace cuesum {

// Equal-width histogram normalized to unit integral over its range.
struct Histogram {
  std::vector<double> edges;    // bins + 1 ascending values
  std::vector<double> heights;  // one per bin
  std::size_t counted = 0;      // samples inside [edges.front(), edges.back()]
  std::size_t dropped = 0;      // samples outside

  std::size_t bins() const noexcept { return heights.size(); }
  double lo() const { return edges.front(); }
  double hi() const { return edges.back(); }
  double width() const { return (edges.back() - edges.front()) / static_cast<double>(bins()); }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  std::vector<double> centers() const;
  double integral() const;
};

Histogram make_histogram(std::span<const double> samples, double lo, double hi, int bins);

// Range of equal-width bins: the sample range intersected with [a, b]
// padded by 5% of b on both sides (never below zero).
std::pair<double, double> histogram_range(std::span<const double> samples, double a, double b);

// Sum over bins whose centers lie in [lo, hi] of |height - mean density| * width,
// where bin_mean(a, b) is the mean of the reference density over [a, b].
double l1_distance(const Histogram& h, const std::function<double(double, double)>& bin_mean,
                   double lo, double hi);

// Mean over [a, b] of the piecewise-linear curve through (grid, values),
// taken as zero outside the grid.
double curve_bin_mean(std::span<const double> grid, std::span<const double> values, double a, double b);

// Sum over all bins of (height - model(center))^2.
double squared_residual(const Histogram& h, const std::function<double(double)>& model);

}  // namespace cuesum
