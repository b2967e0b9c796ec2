#include "cuesum/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cuesum/errors.hpp"

namespace cuesum {

namespace {

void validate_weights(const std::vector<complex>& w) {
  if (w.size() < 2) throw TooFewWeights(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i].real()) || !std::isfinite(w[i].imag()))
      throw InvalidWeights("weight #" + std::to_string(i) + " is not finite");
    if (std::abs(w[i]) == 0.0) throw ZeroWeight(i);
  }
}

std::vector<complex> to_complex(std::span<const double> w) {
  return {w.begin(), w.end()};
}

}  // namespace

WeightVector::WeightVector(std::vector<complex> weights) : weights_(std::move(weights)) {
  validate_weights(weights_);
}

WeightVector::WeightVector(std::span<const double> weights)
    : WeightVector(to_complex(weights)) {}

WeightVector::WeightVector(std::initializer_list<double> weights)
    : WeightVector(std::span<const double>(weights.begin(), weights.size())) {}

std::vector<double> WeightVector::moduli() const {
  std::vector<double> out(weights_.size());
  std::transform(weights_.begin(), weights_.end(), out.begin(),
                 [](const complex& w) { return std::abs(w); });
  return out;
}

std::vector<double> WeightVector::moduli_squared() const {
  std::vector<double> out(weights_.size());
  std::transform(weights_.begin(), weights_.end(), out.begin(),
                 [](const complex& w) { return std::norm(w); });
  return out;
}

std::vector<WeightGroup> WeightVector::compressed(double tol) const {
  auto m = moduli();
  std::sort(m.begin(), m.end(), std::greater<>());
  std::vector<WeightGroup> groups;
  for (double x : m) {
    if (!groups.empty() && std::abs(groups.back().modulus - x) <= tol * groups.back().modulus) {
      ++groups.back().multiplicity;
    } else {
      groups.push_back({x, 1});
    }
  }
  return groups;
}

bool WeightVector::is_canonical() const noexcept {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i].imag() != 0.0 || weights_[i].real() <= 0.0) return false;
    if (i > 0 && weights_[i].real() > weights_[i - 1].real()) return false;
  }
  return true;
}

double WeightVector::sum_moduli() const {
  auto m = moduli();
  return std::accumulate(m.begin(), m.end(), 0.0);
}

double WeightVector::sum_moduli_squared() const {
  auto m = moduli_squared();
  return std::accumulate(m.begin(), m.end(), 0.0);
}

WeightVector canonicalize(const WeightVector& weights) {
  auto m = weights.moduli();
  std::sort(m.begin(), m.end(), std::greater<>());
  return WeightVector(std::span<const double>(m));
}

WeightVector equal_weights(int count, double w) {
  if (count < 0) throw InvalidWeights("negative weight count");
  return WeightVector(std::vector<complex>(static_cast<std::size_t>(count), complex(w)));
}

WeightVector two_value_weights(int l1, double w1, int l2, double w2) {
  if (l1 < 1 || l2 < 1) throw InvalidWeights("both degenerate blocks need at least one weight");
  std::vector<complex> w(static_cast<std::size_t>(l1), complex(w1));
  w.insert(w.end(), static_cast<std::size_t>(l2), complex(w2));
  return WeightVector(std::move(w));
}

Eigen::Matrix2cd QuaternionPoint::matrix() const {
  const complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << first, i * std::conj(second), i * second, std::conj(first);
  return m;
}

QuaternionPoint QuaternionPoint::from_matrix(const Eigen::Matrix2cd& m) {
  return {m(0, 0), m(1, 0) / complex(0.0, 1.0)};
}

SpectralPoint SpectralPoint::interior(double R, double M) {
  return {R, M, -M * (M + 1.0) / (R * R)};
}

SpectralPoint SpectralPoint::exterior(double R, double M) { return {R, M, 0.0}; }

SupportAnnulus::SupportAnnulus(double inner, double outer) : r_int(inner), r_ext(outer) {
  if (!(inner >= 0.0) || !(outer > inner))
    throw DomainError("support annulus needs 0 <= r_int < r_ext");
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0) || !(root_tol > 0.0) || max_iter <= 0 || grid_points <= 0 ||
      !(diff_step > 0.0))
    throw InvalidConfig("solver configuration values must all be positive");
}

}  // namespace cuesum
