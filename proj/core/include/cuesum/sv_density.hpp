#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "cuesum/eig_density.hpp"
#include "cuesum/types.hpp"

namespace cuesum {

// Green function G(z) of S^dagger S: the root of
//   L - 2 + 2 z G = sum_l s_l sqrt(1 + 4 |w_l|^2 z G^2)
// continued from G ~ 1/z at infinity. The path runs vertically from
// Re z + i sgn(Im z) 1e6 to z with every square root followed by continuity.
// Im z = 0 gives the limit from above.
complex sv_green(complex z, const WeightVector& weights, const SolverConfig& cfg = {});

// Values at Re z + i y for each y in `heights` (all of one sign, ordered by
// decreasing |y|), computed along a single continuation path.
std::vector<complex> sv_green_path(double x, std::span<const double> heights,
                                   const WeightVector& weights, const SolverConfig& cfg = {});

// Closed forms.
complex sv_green_two_weights(double w1, double w2, complex z);
complex sv_green_equal_weights(int L, double w, complex z);
double sv_rho_two_weights(double w1, double w2, double x);
double sv_rho_equal_weights(int L, double w, double x);
// Limit of the equal-weight density for L -> infinity at fixed r_ext.
double sv_rho_marchenko_pastur(double r_ext, double x);

// Quintic in G for L = 3, coefficients of G^5 .. G^0.
std::array<complex, 6> polynomial_G_L3(const WeightVector& weights, complex z);
// Quartic in G for l1 weights w1 and l2 weights w2, coefficients of G^4 .. G^0.
std::array<complex, 5> polynomial_G_L1L2(int l1, double w1, int l2, double w2, complex z);

struct SvEndpoints {
  std::vector<double> values;  // ascending
  bool from_scan = false;      // some end point could not be refined by Newton
};

// End points of the support: the master equation together with the
// branch-point condition 1/2 = G sum_l s_l |w_l|^2 / sqrt(1 + 4 |w_l|^2 x G^2),
// solved by Newton from seeds located on a density scan.
SvEndpoints sv_endpoints(const WeightVector& weights, const SolverConfig& cfg = {});

// rho(x) = -(1/pi) Im G(x + i eps), Richardson extrapolated from eps, 2 eps and 4 eps.
double sv_density_at(double x, const WeightVector& weights, const SolverConfig& cfg = {});

struct SVDensity {
  std::vector<double> grid;    // ascending x
  std::vector<double> values;  // rho(x)
  std::vector<double> endpoints;
  bool endpoints_from_scan = false;
  DensityMethod method = DensityMethod::automatic;

  double integral() const;  // trapezoidal rule over the grid
};

// Density on a grid of cfg.grid_points points spanning the support, clustered
// at the end points and log-spaced below 0.01 when the support reaches x = 0.
SVDensity sv_density(const WeightVector& weights, const SolverConfig& cfg = {},
                     DensityMethod method = DensityMethod::automatic);

// Both sides of N_{S^dagger S}(z) = ((z + 1)/z) N_S(z) for z in (-1, 0):
// first the left side from sv_green, second the right side from the
// eigenvalue M-transform.
std::pair<double, double> n_transform_bridge(const WeightVector& weights, double z,
                                             const SolverConfig& cfg = {});

}  // namespace cuesum
