#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cuesum/quaternion.hpp"
#include "cuesum/types.hpp"

namespace cuesum {

enum class DensityMethod {
  automatic,           // closed form or polynomial when one exists, else numeric
  closed_form,
  polynomial,
  quaternion_numeric,  // master equation by sign enumeration
  homotopy,            // singular values: continuation from infinity
};

std::string to_string(DensityMethod method);

// Closed forms for the eigenvalue M-transform and radial density, valid on
// the support; evaluated outside they give the analytic continuation.
double M_two_weights(double w1, double w2, double R);
double rho_two_weights(double w1, double w2, double R);
double M_equal_weights(int L, double w, double R);
double C_equal_weights(int L, double w, double R);
double rho_equal_weights(int L, double w, double R);

// Quartic in M for L = 3, coefficients of M^4 .. M^0.
std::array<double, 5> polynomial_M_L3(const WeightVector& weights, double R);

// Cubic in M for l1 weights w1 and l2 weights w2, coefficients of M^3 .. M^0.
std::array<double, 4> polynomial_M_L1L2(int l1, double w1, int l2, double w2, double R);

// r_ext = sqrt(sum |w|^2), r_int = sqrt(max(max_l(-V_l), 0)).
SupportAnnulus support_formula(const WeightVector& weights);

// Edges located from where the master equation stops having interior roots.
SupportAnnulus numeric_support(const WeightVector& weights, const SolverConfig& cfg = {});

// support_formula cross-checked against numeric_support; a disagreement above
// 1e-6 in R raises HypothesisViolation.
SupportAnnulus support(const WeightVector& weights, const SolverConfig& cfg = {});

// Evaluates M(R) and rho_rad(R) for one weight vector with a fixed method.
class EigDensityModel {
 public:
  explicit EigDensityModel(const WeightVector& weights, const SolverConfig& cfg = {},
                           DensityMethod method = DensityMethod::automatic);

  DensityMethod method() const noexcept { return method_; }
  const SupportAnnulus& support() const noexcept { return support_; }
  const WeightVector& weights() const noexcept { return weights_; }

  // Interior M for R inside the support, holomorphic value outside.
  double M(double R, std::optional<double> hint = std::nullopt) const;
  // Radial density, zero outside the support.
  double density(double R) const;
  // Equals density() inside the support; outside, the analytic continuation
  // of the same branch (NaN if the continuation cannot be followed).
  double continued_density(double R) const;
  // Mean of density() over [a, b].
  double bin_average(double a, double b) const;

 private:
  double interior_M(double R, std::optional<double> hint) const;
  double continued_M(double R) const;
  double derivative(double R) const;

  WeightVector weights_;
  SolverConfig cfg_;
  DensityMethod method_;
  SupportAnnulus support_;
  bool equal_ = false;
  std::vector<WeightGroup> groups_;
};

struct RadialDensity {
  std::vector<double> grid;       // ascending R
  std::vector<double> values;     // rho_rad(R)
  std::vector<double> continued;  // continuation beyond the edges (same as values inside)
  std::vector<bool> edge;         // endpoint values obtained by extrapolation
  SupportAnnulus support;
  DensityMethod method = DensityMethod::automatic;

  double integral() const;  // trapezoidal rule over the grid
};

// Density on an edge-clustered grid of cfg.grid_points points spanning the support.
RadialDensity radial_density(const WeightVector& weights, const SolverConfig& cfg = {},
                             DensityMethod method = DensityMethod::automatic);

// Density and continuation of an existing model on an arbitrary ascending grid.
RadialDensity radial_density_on(const EigDensityModel& model, std::span<const double> grid);

}  // namespace cuesum
