#pragma once

#include <span>
#include <vector>

#include "cuesum/eig_density.hpp"
#include "cuesum/types.hpp"

namespace cuesum {

// Limiting eigenvalue law of (1/sqrt L) sum_l U_l for i.i.d. zero-drift
// unitaries with second moment m2: uniform density inside an ellipse.
struct EllipseLaw {
  complex m2;
  double semi_major = 1.0;  // 1 + |m2|
  double semi_minor = 1.0;  // 1 - |m2|
  double tilt = 0.0;        // Arg(m2) / 2
  double density = 0.0;     // 1 / (pi (1 - |m2|^2))
  double area = 0.0;        // pi (1 - |m2|^2)

  static EllipseLaw of(complex m2);
  // z inside the ellipse scaled by `scale` about the origin.
  bool contains(complex z, double scale = 1.0) const;
};

struct CltLeading {
  complex a0;
  double b0_sq = 0.0;  // positive exactly inside the ellipse
};

struct CltCorrection {
  complex a1;
  double b1b0 = 0.0;  // Re(b1 b0*)
};

// Leading order of the quaternion Green function coefficients.
CltLeading clt_leading(complex z, complex m2);

// 1/sqrt(L) corrections, proportional to m3.
CltCorrection clt_correction(complex z, complex m2, complex m3);

struct SmallWeightsDensity {
  double sigma_sq = 0.0;
  RadialDensity density;  // 2R / sigma^2 on [0, sigma]
};

SmallWeightsDensity clt_small_weights_density(const WeightVector& weights, int grid_points = 200);

struct EllipseCheck {
  double coverage = 0.0;  // fraction inside the `scale`-scaled ellipse
  double flatness = 0.0;  // coefficient of variation of interior cell counts
  int interior_cells = 0;
};

// Coverage of the scaled ellipse, and the coefficient of variation of counts
// on a grid x grid histogram over the ellipse's bounding box (in the frame of
// its axes), restricted to cells lying inside the `inner`-scaled ellipse.
EllipseCheck ellipse_check(std::span<const complex> eigenvalues, complex m2, double scale = 1.05,
                           int grid = 10, double inner = 0.9);

// Mean of Re(conj(m3) lambda^3) / |m3| over the eigenvalues.
double deviation_statistic(std::span<const complex> eigenvalues, complex m3);

// Its large-N expectation for L equal weights 1/sqrt(L): the third moment
// of the sum, |m3| / sqrt(L).
double predicted_deviation(complex m3, int L);

// Least-squares slope of log(value) against log(L).
double log_log_slope(std::span<const double> L, std::span<const double> values);

}  // namespace cuesum
