#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cuesum/histogram.hpp"
#include "cuesum/quaternion.hpp"
#include "cuesum/types.hpp"

namespace cuesum {

using Rng = std::mt19937_64;

// Generator for iteration `index` (and retry `attempt`) of a run with `seed`:
// mt19937_64 seeded through splitmix64 so that streams are independent of
// scheduling.
Rng iteration_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt = 0);
inline constexpr const char* kGeneratorName = "mt19937_64/splitmix64(seed, iteration, attempt)";

// Haar unitary from the QR factorization of a complex Ginibre matrix, with
// column j of Q multiplied by r_jj / |r_jj|.
Eigen::MatrixXcd sample_haar_unitary(int n, Rng& rng);

// n i.i.d. eigenphases of the ensemble (uniform for the CUE).
std::vector<double> sample_phases(int n, const UnitaryEnsembleSpec& ensemble, Rng& rng);

// V diag(e^{i theta}) V^dagger with V Haar and theta from sample_phases.
Eigen::MatrixXcd sample_phase_unitary(int n, const UnitaryEnsembleSpec& ensemble, Rng& rng);

struct SimConfig {
  int n = 500;
  int iterations = 1000;
  int bins = 100;
  std::uint64_t seed = 0;
  UnitaryEnsembleSpec ensemble = UnitaryEnsembleSpec::cue();
  int threads = 0;      // 0: available parallelism
  int max_retries = 3;  // per iteration, after eigensolver failures
  // Histogram range; by default the sample range intersected with the
  // analytic support (CUE only) padded by 5%.
  std::optional<std::pair<double, double>> range;

  void validate() const;
};

struct MomentEstimate {
  complex m1, m2, m3;  // (1/n) Tr U^k averaged over the first summand of every iteration
  std::size_t matrices = 0;
};

struct SimResult {
  std::vector<complex> eigenvalues;      // eigenvalue runs
  std::vector<double> singular_values;   // eigenvalues of S^dagger S
  Histogram histogram;                   // of |lambda| or of the singular values
  MomentEstimate moments_check;
  int retries = 0;
  std::string generator = kGeneratorName;
  SimConfig config;
  std::vector<complex> weights;

  std::vector<double> moduli() const;
};

// Eigenvalues of S = sum_l w_l U_l pooled over the iterations, radial histogram.
SimResult simulate_sum(const WeightVector& weights, const SimConfig& cfg);

// Eigenvalues of S^dagger S pooled over the iterations.
SimResult simulate_sum_sv(const WeightVector& weights, const SimConfig& cfg);

// Both spectra from the same draws.
std::pair<SimResult, SimResult> simulate_sum_joint(const WeightVector& weights,
                                                   const SimConfig& cfg);

// Complex eigenvalues of a general square matrix; throws EigensolverFailure.
std::vector<complex> general_eigenvalues(const Eigen::MatrixXcd& a);

// Eigenvalues of a Hermitian matrix, ascending; throws EigensolverFailure.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a);

}  // namespace cuesum
