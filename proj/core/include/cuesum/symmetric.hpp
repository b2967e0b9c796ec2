#pragma once

#include <span>
#include <vector>

#include "cuesum/types.hpp"

namespace cuesum {

using Partition = std::vector<int>;

// Monomial symmetric polynomial of the squared moduli |w_l|^2 over the
// partition p: sum over the distinct orderings of p and over the #p-element
// subsets of the weights. mu of the empty partition is 1.
double monomial_mu(const WeightVector& weights, const Partition& partition);

// v_l = sum_k (1 - 2 delta_kl) |w_k|, with l = 1..L; l = 0 is the all-plus sum.
double v_functional(const WeightVector& weights, std::size_t l);

// V_l = sum_k (1 - 2 delta_kl) |w_k|^2, with the same index convention.
double V_functional(const WeightVector& weights, std::size_t l);

// All of the above that appear in the L = 3 polynomials, evaluated once.
struct SymmetricWeightFunctionals {
  double mu1 = 0, mu2 = 0, mu3 = 0, mu11 = 0, mu21 = 0, mu111 = 0;
  std::vector<double> v;  // v[0..L]
  std::vector<double> V;  // V[0..L]

  static SymmetricWeightFunctionals of(const WeightVector& weights);
};

}  // namespace cuesum
