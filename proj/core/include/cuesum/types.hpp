#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cuesum {

using complex = std::complex<double>;

// A block of equal weight moduli: `multiplicity` summands of modulus `modulus`.
struct WeightGroup {
  double modulus = 0.0;
  int multiplicity = 0;
};

// The complex weights w_l of S = sum_l w_l U_l.
//
// Construction enforces L >= 2 and w_l != 0. Only the moduli enter any
// large-N result, so most of the library works on the canonical form
// (real moduli sorted in descending order) produced by canonicalize().
class WeightVector {
 public:
  explicit WeightVector(std::vector<complex> weights);
  explicit WeightVector(std::span<const double> weights);
  WeightVector(std::initializer_list<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const complex> values() const noexcept { return weights_; }
  const complex& operator[](std::size_t i) const { return weights_[i]; }

  std::vector<double> moduli() const;
  std::vector<double> moduli_squared() const;

  // Distinct moduli (descending) with their multiplicities; values within
  // `tol` relative distance are merged.
  std::vector<WeightGroup> compressed(double tol = 1e-12) const;

  // True when every weight is real, positive and sorted descending.
  bool is_canonical() const noexcept;

  double sum_moduli() const;
  double sum_moduli_squared() const;

 private:
  std::vector<complex> weights_;
};

WeightVector canonicalize(const WeightVector& weights);

// Equal-modulus weights: L copies of `w`.
WeightVector equal_weights(int count, double w);

// Two-valued weights: l1 copies of w1 followed by l2 copies of w2.
WeightVector two_value_weights(int l1, double w1, int l2, double w2);

// Coefficients of the 2x2 quaternion [[x, i y*], [i y, x*]]: (c, d) for an
// argument or (a, b) for a Green function value.
struct QuaternionPoint {
  complex first;
  complex second;

  Eigen::Matrix2cd matrix() const;
  static QuaternionPoint from_matrix(const Eigen::Matrix2cd& m);
};

// Non-holomorphic M-transform and order parameter at radius R.
struct SpectralPoint {
  double R = 0.0;
  double M = 0.0;
  double C = 0.0;

  bool inside() const noexcept { return C > 0.0; }

  // C = -M (M + 1) / R^2.
  static SpectralPoint interior(double R, double M);
  static SpectralPoint exterior(double R, double M);
};

struct SupportAnnulus {
  double r_int = 0.0;
  double r_ext = 0.0;

  SupportAnnulus() = default;
  SupportAnnulus(double inner, double outer);

  bool is_disk() const noexcept { return r_int == 0.0; }
  bool contains(double R) const noexcept { return R >= r_int && R <= r_ext; }
  double width() const noexcept { return r_ext - r_int; }
};

struct SolverConfig {
  double epsilon = 1e-6;      // imaginary offset for the singular-value Green function
  double root_tol = 1e-12;
  int max_iter = 200;
  int grid_points = 400;      // density grids and master-equation root scans
  double diff_step = 1e-5;    // dM/dR central-difference step

  void validate() const;
};

}  // namespace cuesum
