#include "cuesum/clt.hpp"

#include <cmath>
#include <numbers>

#include "cuesum/errors.hpp"

namespace cuesum {

namespace {

void require_nondegenerate(complex m2) {
  if (!(std::abs(m2) < 1.0)) throw InvalidEnsemble("|m2| must be below 1 for a nondegenerate ellipse");
}

}  // namespace

EllipseLaw EllipseLaw::of(complex m2) {
  require_nondegenerate(m2);
  EllipseLaw e;
  const double r = std::abs(m2);
  e.m2 = m2;
  e.semi_major = 1.0 + r;
  e.semi_minor = 1.0 - r;
  e.tilt = 0.5 * std::arg(m2);
  if (e.tilt >= 0.5 * std::numbers::pi) e.tilt -= std::numbers::pi;
  e.area = std::numbers::pi * (1.0 - r * r);
  e.density = 1.0 / e.area;
  return e;
}

bool EllipseLaw::contains(complex z, double scale) const {
  return clt_leading(z / scale, m2).b0_sq > 0.0;
}

CltLeading clt_leading(complex z, complex m2) {
  require_nondegenerate(m2);
  const double d = 1.0 - std::norm(m2);
  const complex zc = std::conj(z);
  CltLeading out;
  out.a0 = (zc - std::conj(m2) * z) / d;
  const complex t = -std::norm(z) * (1.0 + std::norm(m2)) + m2 * zc * zc + std::conj(m2) * z * z;
  out.b0_sq = 1.0 + t.real() / (d * d);
  return out;
}

CltCorrection clt_correction(complex z, complex m2, complex m3) {
  require_nondegenerate(m2);
  const double d = 1.0 - std::norm(m2);
  const complex zc = std::conj(z), m2c = std::conj(m2);
  const complex p = zc - m2c * z;
  const complex q = z - m2 * zc;
  CltCorrection out;
  out.a1 = (m3 * m2c * p * p - std::conj(m3) * q * q) / (d * d * d);
  out.b1b0 = (m3 * p * p * ((1.0 + std::norm(m2)) * zc - 2.0 * m2c * z)).real() / (d * d * d * d);
  return out;
}

SmallWeightsDensity clt_small_weights_density(const WeightVector& weights, int grid_points) {
  if (grid_points < 2) throw InvalidConfig("grid needs at least two points");
  SmallWeightsDensity out;
  out.sigma_sq = weights.sum_moduli_squared();
  const double sigma = std::sqrt(out.sigma_sq);
  auto& d = out.density;
  d.support = SupportAnnulus(0.0, sigma);
  d.method = DensityMethod::closed_form;
  for (int i = 0; i < grid_points; ++i) {
    const double R = sigma * i / (grid_points - 1);
    d.grid.push_back(R);
    d.values.push_back(2.0 * R / out.sigma_sq);
    d.continued.push_back(2.0 * R / out.sigma_sq);
    d.edge.push_back(false);
  }
  return out;
}

EllipseCheck ellipse_check(std::span<const complex> eigenvalues, complex m2, double scale,
                           int grid, double inner) {
  if (eigenvalues.empty()) throw InvalidConfig("no eigenvalues to check");
  if (grid < 2) throw InvalidConfig("grid needs at least two cells per side");
  const EllipseLaw law = EllipseLaw::of(m2);
  const complex rot = std::polar(1.0, -law.tilt);
  const double a = law.semi_major, b = law.semi_minor;
  std::vector<double> counts(static_cast<std::size_t>(grid * grid), 0.0);
  std::size_t inside = 0;
  for (const auto& z : eigenvalues) {
    if (law.contains(z, scale)) ++inside;
    const complex w = z * rot;
    const int i = static_cast<int>(std::floor((w.real() + a) / (2.0 * a) * grid));
    const int j = static_cast<int>(std::floor((w.imag() + b) / (2.0 * b) * grid));
    if (i >= 0 && i < grid && j >= 0 && j < grid) counts[static_cast<std::size_t>(i * grid + j)] += 1.0;
  }
  EllipseCheck out;
  out.coverage = static_cast<double>(inside) / static_cast<double>(eigenvalues.size());

  auto in_inner = [&](double x, double y) {
    const double u = x / (inner * a), v = y / (inner * b);
    return u * u + v * v < 1.0;
  };
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double x0 = -a + 2.0 * a * i / grid, x1 = -a + 2.0 * a * (i + 1) / grid;
      const double y0 = -b + 2.0 * b * j / grid, y1 = -b + 2.0 * b * (j + 1) / grid;
      if (!(in_inner(x0, y0) && in_inner(x0, y1) && in_inner(x1, y0) && in_inner(x1, y1))) continue;
      const double c = counts[static_cast<std::size_t>(i * grid + j)];
      sum += c;
      sum2 += c * c;
      ++out.interior_cells;
    }
  }
  if (out.interior_cells > 1 && sum > 0.0) {
    const double k = out.interior_cells;
    const double mean = sum / k;
    const double var = std::max(0.0, (sum2 - k * mean * mean) / (k - 1.0));
    out.flatness = std::sqrt(var) / mean;
  } else {
    out.flatness = std::numeric_limits<double>::infinity();
  }
  return out;
}

double deviation_statistic(std::span<const complex> eigenvalues, complex m3) {
  if (eigenvalues.empty()) throw InvalidConfig("no eigenvalues");
  if (std::abs(m3) == 0.0) throw DomainError("the statistic needs m3 != 0");
  double acc = 0.0;
  for (const auto& z : eigenvalues) acc += (std::conj(m3) * z * z * z).real();
  return acc / (static_cast<double>(eigenvalues.size()) * std::abs(m3));
}

double predicted_deviation(complex m3, int L) {
  if (L < 1) throw TooFewWeights(0);
  return std::abs(m3) / std::sqrt(static_cast<double>(L));
}

double log_log_slope(std::span<const double> L, std::span<const double> values) {
  if (L.size() != values.size() || L.size() < 2) throw InvalidConfig("need matching series of length >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (!(L[i] > 0.0) || !(values[i] > 0.0)) throw DomainError("log-log slope needs positive values");
    const double x = std::log(L[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cuesum
