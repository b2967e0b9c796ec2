#include "cuesum/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cuesum/errors.hpp"

namespace cuesum {

complex polynomial_eval(std::span<const complex> coeffs, complex x) {
  complex acc = 0.0;
  for (const auto& c : coeffs) acc = acc * x + c;
  return acc;
}

double polynomial_eval(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (double c : coeffs) acc = acc * x + c;
  return acc;
}

namespace {

complex derivative_eval(std::span<const complex> coeffs, complex x) {
  const std::size_t n = coeffs.size() - 1;
  complex acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc = acc * x + coeffs[k] * static_cast<double>(n - k);
  return acc;
}

}  // namespace

std::vector<complex> polynomial_roots(std::span<const complex> coeffs) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) throw DomainError("zero polynomial has no finite root set");

  std::size_t first = 0;
  while (first < coeffs.size() && std::abs(coeffs[first]) <= 1e-14 * scale) ++first;
  std::size_t last = coeffs.size();
  std::size_t zero_roots = 0;
  while (last > first + 1 && coeffs[last - 1] == complex(0.0)) {
    --last;
    ++zero_roots;
  }
  std::span<const complex> p = coeffs.subspan(first, last - first);
  const std::size_t n = p.size() - 1;

  std::vector<complex> roots;
  if (n >= 1) {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t j = 0; j < n; ++j) companion(0, j) = -p[j + 1] / p[0];
    for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw EigensolverFailure("companion eigensolver failed");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      complex r = solver.eigenvalues()(i);
      for (int it = 0; it < 4; ++it) {
        const complex d = derivative_eval(p, r);
        if (d == complex(0.0)) break;
        const complex step = polynomial_eval(p, r) / d;
        if (!std::isfinite(std::abs(step))) break;
        r -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
      }
      roots.push_back(r);
    }
  }
  roots.insert(roots.end(), zero_roots, complex(0.0));
  return roots;
}

std::vector<complex> polynomial_roots(std::span<const double> coeffs) {
  std::vector<complex> c(coeffs.begin(), coeffs.end());
  return polynomial_roots(std::span<const complex>(c));
}

std::vector<double> real_roots_in(std::span<const double> coeffs, double lo, double hi,
                                  double imag_tol) {
  std::vector<double> out;
  for (const auto& r : polynomial_roots(coeffs)) {
    if (std::abs(r.imag()) > imag_tol * std::max(1.0, std::abs(r))) continue;
    if (r.real() >= lo && r.real() <= hi) out.push_back(r.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cuesum
