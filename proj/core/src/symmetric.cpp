#include "cuesum/symmetric.hpp"

#include <algorithm>
#include <cmath>

#include "cuesum/errors.hpp"

namespace cuesum {

namespace {

// Sum over increasing index tuples of length k of prod_s x[idx[s]]^p[s].
double subset_sum(const std::vector<double>& x, const Partition& p) {
  const std::size_t k = p.size();
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(k);
  for (std::size_t s = 0; s < k; ++s) idx[s] = s;
  double total = 0.0;
  while (true) {
    double term = 1.0;
    for (std::size_t s = 0; s < k; ++s) term *= std::pow(x[idx[s]], p[s]);
    total += term;
    // Advance to the next combination in lexicographic order.
    std::size_t s = k;
    while (s > 0 && idx[s - 1] == n - k + (s - 1)) --s;
    if (s == 0) break;
    ++idx[s - 1];
    for (std::size_t t = s; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  return total;
}

}  // namespace

double monomial_mu(const WeightVector& weights, const Partition& partition) {
  if (partition.empty()) return 1.0;
  if (partition.size() > weights.size())
    throw DomainError("partition has more parts than there are weights");
  for (int part : partition)
    if (part <= 0) throw DomainError("partition parts must be positive");

  const auto x = weights.moduli_squared();
  Partition p = partition;
  std::sort(p.begin(), p.end());
  double total = 0.0;
  do {
    total += subset_sum(x, p);
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

double v_functional(const WeightVector& weights, std::size_t l) {
  if (l > weights.size()) throw DomainError("v_l index out of range");
  const auto m = weights.moduli();
  double total = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) total += (k + 1 == l ? -1.0 : 1.0) * m[k];
  return total;
}

double V_functional(const WeightVector& weights, std::size_t l) {
  if (l > weights.size()) throw DomainError("V_l index out of range");
  const auto m = weights.moduli_squared();
  double total = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) total += (k + 1 == l ? -1.0 : 1.0) * m[k];
  return total;
}

SymmetricWeightFunctionals SymmetricWeightFunctionals::of(const WeightVector& weights) {
  SymmetricWeightFunctionals f;
  const std::size_t L = weights.size();
  f.mu1 = monomial_mu(weights, {1});
  f.mu2 = monomial_mu(weights, {2});
  f.mu3 = monomial_mu(weights, {3});
  f.mu11 = monomial_mu(weights, {1, 1});
  f.mu21 = L >= 2 ? monomial_mu(weights, {2, 1}) : 0.0;
  f.mu111 = L >= 3 ? monomial_mu(weights, {1, 1, 1}) : 0.0;
  for (std::size_t l = 0; l <= L; ++l) {
    f.v.push_back(v_functional(weights, l));
    f.V.push_back(V_functional(weights, l));
  }
  return f;
}

}  // namespace cuesum
