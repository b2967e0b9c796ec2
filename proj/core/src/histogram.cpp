#include "cuesum/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "cuesum/errors.hpp"

namespace cuesum {

std::vector<double> Histogram::centers() const {
  std::vector<double> c(bins());
  for (std::size_t i = 0; i < bins(); ++i) c[i] = center(i);
  return c;
}

double Histogram::integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < bins(); ++i) total += heights[i] * (edges[i + 1] - edges[i]);
  return total;
}

Histogram make_histogram(std::span<const double> samples, double lo, double hi, int bins) {
  if (bins < 2) throw InvalidConfig("a histogram needs at least two bins");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidConfig("histogram range must be a finite nonempty interval");
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
  h.edges.back() = hi;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  const double scale = bins / (hi - lo);
  for (double x : samples) {
    if (!(x >= lo && x <= hi)) {
      ++h.dropped;
      continue;
    }
    auto k = static_cast<std::size_t>((x - lo) * scale);
    if (k >= counts.size()) k = counts.size() - 1;
    ++counts[k];
    ++h.counted;
  }
  h.heights.assign(counts.size(), 0.0);
  if (h.counted == 0) return h;
  const double w = (hi - lo) / bins;
  for (std::size_t i = 0; i < counts.size(); ++i)
    h.heights[i] = static_cast<double>(counts[i]) / (static_cast<double>(h.counted) * w);
  return h;
}

std::pair<double, double> histogram_range(std::span<const double> samples, double a, double b) {
  if (samples.empty()) throw InvalidConfig("no samples to histogram");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double pad = 0.05 * b;
  const double lo = std::max({*mn, a - pad, 0.0});
  const double hi = std::min(*mx, b + pad);
  if (hi > lo) return {lo, hi};
  if (*mx > *mn) return {*mn, *mx};
  throw InvalidConfig("samples do not span a nonempty range");
}

double l1_distance(const Histogram& h, const std::function<double(double, double)>& bin_mean,
                   double lo, double hi) {
  double total = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double c = h.center(i);
    if (c < lo || c > hi) continue;
    total += std::abs(h.heights[i] - bin_mean(h.edges[i], h.edges[i + 1])) *
             (h.edges[i + 1] - h.edges[i]);
  }
  return total;
}

double curve_bin_mean(std::span<const double> grid, std::span<const double> values, double a, double b) {
  if (grid.size() != values.size() || grid.size() < 2) throw InvalidConfig("curve needs matching grid and values");
  if (!(b > a)) throw DomainError("bin must have positive width");
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x0 = grid[i - 1], x1 = grid[i];
    const double lo = std::max(a, x0), hi = std::min(b, x1);
    if (!(hi > lo) || !(x1 > x0)) continue;
    const double slope = (values[i] - values[i - 1]) / (x1 - x0);
    const double y_lo = values[i - 1] + slope * (lo - x0), y_hi = values[i - 1] + slope * (hi - x0);
    total += 0.5 * (y_lo + y_hi) * (hi - lo);
  }
  return total / (b - a);
}

double squared_residual(const Histogram& h, const std::function<double(double)>& model) {
  double total = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double d = h.heights[i] - model(h.center(i));
    total += d * d;
  }
  return total;
}

}  // namespace cuesum
