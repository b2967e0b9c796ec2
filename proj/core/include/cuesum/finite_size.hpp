#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cuesum/eig_density.hpp"
#include "cuesum/histogram.hpp"
#include "cuesum/types.hpp"

namespace cuesum {

// Complementary error function, 2/sqrt(pi) times the integral of exp(-t^2) from x to infinity.
double erfc(double x);

// f(R) = erfc(q s (R - r_b) sqrt(n)) / 2 with s = +1 at an outer edge, -1 at an inner edge.
struct ErfcProfile {
  int n = 0;
  double q = 1.0;
  double r_b = 1.0;
  int s_b = 1;

  ErfcProfile(int n, double q, double r_b, int s_b);
  double operator()(double R) const;
  double width() const;  // 1 / (q sqrt n)
};

// Product of the profiles for every edge of the support.
double form_factor(double R, int n, const SupportAnnulus& support, double q_ext,
                   std::optional<double> q_int = std::nullopt);

// rho(R) f_ext(R) f_int(R) on a grid reaching 5/(q sqrt n) beyond each edge,
// using the analytic continuation of rho outside the support. Not renormalized.
RadialDensity apply_form_factor(const EigDensityModel& model, int n, double q_ext,
                                std::optional<double> q_int = std::nullopt, int grid_points = 400);

// Same for a sampled curve; the continuation column is interpolated, and
// extrapolated linearly past the sampled range.
RadialDensity apply_form_factor(const RadialDensity& density, int n, double q_ext,
                                std::optional<double> q_int = std::nullopt, int grid_points = 400);

struct ErfcFitResult {
  double q_ext = 0.0;
  std::optional<double> q_int;
  double residual = 0.0;            // sum over bins of (h - rho f)^2
  double unfitted_residual = 0.0;   // same with f = 1
  double curvature_ext = 0.0;       // d^2 residual / d q_ext^2 at the optimum
  std::optional<double> curvature_int;
  bool at_bound = false;            // an optimum sits on [q_min, q_max]
  int bins = 0;
};

struct FitOptions {
  double q_min = 0.1;
  double q_max = 20.0;
  int max_rounds = 100;  // coordinate descent rounds for annuli
  double tol = 1e-7;
};

// Least-squares q (q_ext and q_int for an annulus) with equal bin weights,
// over every histogram bin; `continued` is rho extended past the edges.
ErfcFitResult fit_q(const Histogram& histogram, const std::function<double(double)>& continued,
                    const SupportAnnulus& support, int n, const FitOptions& opts = {});

ErfcFitResult fit_q(const Histogram& histogram, const EigDensityModel& model, int n,
                    const FitOptions& opts = {});

ErfcFitResult fit_q(const Histogram& histogram, const RadialDensity& analytic, int n,
                    const FitOptions& opts = {});

// Linear interpolation of the continuation column of a sampled curve.
std::function<double(double)> continued_interpolant(const RadialDensity& density);

}  // namespace cuesum
