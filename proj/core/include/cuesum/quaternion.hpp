#pragma once

#include <optional>
#include <vector>

#include "cuesum/types.hpp"

namespace cuesum {

enum class EnsembleKind {
  cue,            // all moments zero
  phase_density,  // (1/2pi)(1 + 2 Re(m2 e^{-2i t}) + 2 Re(m3 e^{-3i t}))
  phase_atoms,    // finitely many eigenphases with given probabilities
};

// Spectral law of a unitary summand, described by its moments
// m_n = <e^{i n theta}>, n = 1..n_max.
struct UnitaryEnsembleSpec {
  EnsembleKind kind = EnsembleKind::cue;
  int n_max = 8;
  std::vector<complex> moments;     // m_1..m_{n_max}
  std::vector<double> atom_phases;  // phase_atoms only
  std::vector<double> atom_probs;

  static UnitaryEnsembleSpec cue(int n_max = 8);
  static UnitaryEnsembleSpec phase_density(complex m2, complex m3, int n_max = 8);
  static UnitaryEnsembleSpec phase_atoms(std::vector<double> phases, std::vector<double> probs,
                                         int n_max = 8);

  complex moment(int n) const;
  // M_U(u) = sum_{n >= 1} m_n u^{-n} for |u| > 1 (closed form for atoms,
  // truncated at n_max otherwise).
  complex m_transform(complex u) const;
  // Phase density on [0, 2pi); phase_density kind only.
  double phase_pdf(double theta) const;

  // Throws InvalidEnsemble if some |m_n| > 1, probabilities are not a
  // distribution, or the phase density is negative somewhere.
  void validate() const;
  bool is_cue() const noexcept { return kind == EnsembleKind::cue; }
};

struct HermitizationAux {
  double g = 0.0;
  complex u;
};

HermitizationAux hermitization_aux(const QuaternionPoint& cd, complex w);

// Quaternion Green function coefficients (a, b) of w U at the quaternion (c, d).
QuaternionPoint unitary_quaternion_green(const QuaternionPoint& cd, complex w,
                                         const UnitaryEnsembleSpec& ensemble);

// Quaternion Blue function coefficients (c, d) of w CUE at (a, b). At b = 0
// only sign = -1 has a finite limit (d = 0); sign = +1 throws DomainError.
QuaternionPoint cue_blue(const QuaternionPoint& ab, complex w, int sign);

using SignVector = std::vector<int>;

struct MasterSolution {
  SpectralPoint point;
  SignVector signs;       // per weight of the canonical vector; empty outside
  bool interior = false;  // false: holomorphic solution (M = 0 or M = -1)
};

// L + 2M - sum_l s_l sqrt(1 + 4 |w_l|^2 M (M + 1) / R^2).
double master_residual(const WeightVector& weights, double R, double M, const SignVector& signs);

// Every admissible interior root M in (-1, 0) of the eigenvalue master
// equation at radius R, over all sign vectors (enumerated up to permutations
// of equal weights). Duplicates reached through several sign vectors are merged.
std::vector<MasterSolution> master_equation_roots(const WeightVector& weights, double R,
                                                  const SolverConfig& cfg = {});

// Solves the quaternion addition law for the weighted CUE sum at z. Inside the
// support returns the non-holomorphic M with C = -M(M+1)/R^2 > 0; outside
// returns M = 0 (R >= r_ext) or M = -1 (central hole). When several interior
// roots exist, `hint` selects the closest one; otherwise the root reached
// with the fewest minus signs wins.
MasterSolution solve_addition_detailed(complex z, const WeightVector& weights,
                                       const SolverConfig& cfg = {},
                                       std::optional<double> hint = std::nullopt);

SpectralPoint solve_addition(complex z, const WeightVector& weights, const SolverConfig& cfg = {},
                             std::optional<double> hint = std::nullopt);

// A sign vector under which M solves the master equation at R to `tol`, if any.
std::optional<SignVector> matching_signs(const WeightVector& weights, double R, double M,
                                         double tol = 1e-8);

// Follows the root of the master equation with fixed signs from `guess`,
// without restricting M to [-1, 0]. Used to continue a solution past the
// support edges. Returns nullopt if Newton does not converge.
std::optional<double> continue_master_root(const WeightVector& weights, double R, double guess,
                                           const SignVector& signs, const SolverConfig& cfg = {});

// Residual of the two quaternion addition-law equations for (a, b) built
// from the solution: a = (M + 1)/z, b = sqrt(C), with each summand's Blue
// function evaluated on the sign matching its master-equation sign.
double addition_law_residual(complex z, const MasterSolution& solution,
                             const WeightVector& weights);

}  // namespace cuesum
