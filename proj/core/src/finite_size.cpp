#include "cuesum/finite_size.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/tools/minima.hpp>

#include "cuesum/errors.hpp"

namespace cuesum {

double erfc(double x) { return std::erfc(x); }

ErfcProfile::ErfcProfile(int n_, double q_, double r_b_, int s_b_) : n(n_), q(q_), r_b(r_b_), s_b(s_b_) {
  if (n < 1) throw InvalidConfig("matrix dimension must be positive");
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidConfig("q must be positive");
  if (s_b != 1 && s_b != -1) throw InvalidConfig("edge orientation must be +1 or -1");
}

double ErfcProfile::operator()(double R) const {
  return 0.5 * cuesum::erfc(q * s_b * (R - r_b) * std::sqrt(static_cast<double>(n)));
}

double ErfcProfile::width() const { return 1.0 / (q * std::sqrt(static_cast<double>(n))); }

namespace {

void require_q_int(const SupportAnnulus& support, const std::optional<double>& q_int) {
  if (!support.is_disk() && !q_int) throw InvalidConfig("an annulus needs q_int");
}

std::vector<double> extended_grid(const SupportAnnulus& s, int n, double q_ext,
                                  std::optional<double> q_int, int points) {
  if (points < 2) throw InvalidConfig("grid needs at least two points");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double hi = s.r_ext + 5.0 / (q_ext * root_n);
  const double lo = s.is_disk() ? 0.0 : std::max(0.0, s.r_int - 5.0 / (*q_int * root_n));
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  for (double edge : {s.r_int, s.r_ext})
    if (edge > lo && edge < hi) grid.push_back(edge);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double finite_or_zero(double v) { return std::isfinite(v) ? std::max(v, 0.0) : 0.0; }

}  // namespace

double form_factor(double R, int n, const SupportAnnulus& support, double q_ext,
                   std::optional<double> q_int) {
  require_q_int(support, q_int);
  double f = ErfcProfile(n, q_ext, support.r_ext, 1)(R);
  if (!support.is_disk()) f *= ErfcProfile(n, *q_int, support.r_int, -1)(R);
  return f;
}

RadialDensity apply_form_factor(const EigDensityModel& model, int n, double q_ext,
                                std::optional<double> q_int, int grid_points) {
  const auto& s = model.support();
  require_q_int(s, q_int);
  RadialDensity out;
  out.support = s;
  out.method = model.method();
  out.grid = extended_grid(s, n, q_ext, q_int, grid_points);
  for (double R : out.grid) {
    const double bare = finite_or_zero(model.continued_density(R));
    out.continued.push_back(bare);
    out.values.push_back(bare * form_factor(R, n, s, q_ext, q_int));
  }
  out.edge.assign(out.grid.size(), false);
  return out;
}

std::function<double(double)> continued_interpolant(const RadialDensity& density) {
  const auto& g = density.grid;
  if (g.size() < 2) throw InvalidConfig("a sampled curve needs at least two points");
  auto grid = std::make_shared<std::vector<double>>(g);
  auto vals = std::make_shared<std::vector<double>>();
  const auto& src = density.continued.size() == g.size() ? density.continued : density.values;
  for (std::size_t i = 0; i < g.size(); ++i) vals->push_back(std::isfinite(src[i]) ? src[i] : density.values[i]);
  return [grid, vals](double R) {
    const auto& x = *grid;
    const auto& y = *vals;
    std::size_t k;
    if (R <= x.front()) {
      k = 1;
    } else if (R >= x.back()) {
      k = x.size() - 1;
    } else {
      k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), R) - x.begin());
    }
    const double t = (R - x[k - 1]) / (x[k] - x[k - 1]);
    return std::max(0.0, y[k - 1] + t * (y[k] - y[k - 1]));
  };
}

RadialDensity apply_form_factor(const RadialDensity& density, int n, double q_ext,
                                std::optional<double> q_int, int grid_points) {
  const auto& s = density.support;
  require_q_int(s, q_int);
  const auto bare = continued_interpolant(density);
  RadialDensity out;
  out.support = s;
  out.method = density.method;
  out.grid = extended_grid(s, n, q_ext, q_int, grid_points);
  for (double R : out.grid) {
    const double b = (R == 0.0) ? 0.0 : bare(R);
    out.continued.push_back(b);
    out.values.push_back(b * form_factor(R, n, s, q_ext, q_int));
  }
  out.edge.assign(out.grid.size(), false);
  return out;
}

ErfcFitResult fit_q(const Histogram& histogram, const std::function<double(double)>& continued,
                    const SupportAnnulus& support, int n, const FitOptions& opts) {
  if (histogram.bins() == 0) throw InvalidConfig("empty histogram");
  if (n < 1) throw InvalidConfig("matrix dimension must be positive");
  if (!(opts.q_max > opts.q_min && opts.q_min > 0.0)) throw InvalidConfig("bad q bounds");

  const auto centers = histogram.centers();
  std::vector<double> bare(centers.size()), inside(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    bare[i] = finite_or_zero(continued(centers[i]));
    inside[i] = support.contains(centers[i]) ? bare[i] : 0.0;
  }
  const bool annulus = !support.is_disk();

  auto loss = [&](double qe, double qi) {
    double total = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double f = form_factor(centers[i], n, support, qe,
                                   annulus ? std::optional<double>(qi) : std::nullopt);
      const double d = histogram.heights[i] - bare[i] * f;
      total += d * d;
    }
    return total;
  };

  const int bits = static_cast<int>(-std::log2(opts.tol));
  auto minimize = [&](auto&& g) {
    return boost::math::tools::brent_find_minima(g, opts.q_min, opts.q_max, bits).first;
  };

  ErfcFitResult out;
  out.bins = static_cast<int>(centers.size());
  double qe = 0.5 * (opts.q_min + opts.q_max), qi = qe;
  if (!annulus) {
    qe = minimize([&](double q) { return loss(q, 0.0); });
  } else {
    qe = minimize([&](double q) { return loss(q, qi); });
    for (int round = 0; round < opts.max_rounds; ++round) {
      const double qi_new = minimize([&](double q) { return loss(qe, q); });
      const double qe_new = minimize([&](double q) { return loss(q, qi_new); });
      const double change = std::max(std::abs(qi_new - qi), std::abs(qe_new - qe));
      qi = qi_new;
      qe = qe_new;
      if (change < opts.tol * 10.0) break;
    }
    out.q_int = qi;
  }
  out.q_ext = qe;
  out.residual = loss(qe, qi);

  double unfitted = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = histogram.heights[i] - inside[i];
    unfitted += d * d;
  }
  out.unfitted_residual = unfitted;

  auto curvature = [&](auto&& g, double q) {
    const double h = 1e-3 * q;
    return (g(q + h) - 2.0 * g(q) + g(q - h)) / (h * h);
  };
  out.curvature_ext = curvature([&](double q) { return loss(q, qi); }, qe);
  if (annulus) out.curvature_int = curvature([&](double q) { return loss(qe, q); }, qi);

  auto near_bound = [&](double q) {
    const double slack = 1e-4 * (opts.q_max - opts.q_min);
    return q - opts.q_min < slack || opts.q_max - q < slack;
  };
  out.at_bound = near_bound(qe) || (annulus && near_bound(qi));
  return out;
}

ErfcFitResult fit_q(const Histogram& histogram, const EigDensityModel& model, int n,
                    const FitOptions& opts) {
  return fit_q(histogram, [&model](double R) { return model.continued_density(R); }, model.support(), n,
               opts);
}

ErfcFitResult fit_q(const Histogram& histogram, const RadialDensity& analytic, int n,
                    const FitOptions& opts) {
  return fit_q(histogram, continued_interpolant(analytic), analytic.support, n, opts);
}

}  // namespace cuesum
