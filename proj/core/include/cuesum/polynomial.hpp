#pragma once

#include <span>
#include <vector>

#include "cuesum/types.hpp"

namespace cuesum {

// Roots of sum_k coeffs[k] x^(n-k) (coefficients in descending powers).
//
// Leading coefficients that vanish relative to the largest one are dropped,
// so a nominal quartic whose x^4 term is zero is solved as a cubic. Roots are
// the eigenvalues of the companion matrix, each polished by a few Newton
// steps on the original polynomial.
std::vector<complex> polynomial_roots(std::span<const complex> coeffs);
std::vector<complex> polynomial_roots(std::span<const double> coeffs);

complex polynomial_eval(std::span<const complex> coeffs, complex x);
double polynomial_eval(std::span<const double> coeffs, double x);

// Real roots (|Im| <= imag_tol * max(1, |root|)) in [lo, hi], ascending.
std::vector<double> real_roots_in(std::span<const double> coeffs, double lo, double hi,
                                  double imag_tol = 1e-7);

}  // namespace cuesum
