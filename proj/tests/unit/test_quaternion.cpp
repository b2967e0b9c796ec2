#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <boost/math/quadrature/trapezoidal.hpp>

#include "cuesum/eig_density.hpp"
#include "cuesum/errors.hpp"
#include "cuesum/monte_carlo.hpp"
#include "cuesum/quaternion.hpp"

using namespace cuesum;

namespace {

const complex I(0.0, 1.0);

// Quaternion Green function of w U for a normal U: the block inverse
// decouples into one 2x2 inverse per eigenvalue lambda.
QuaternionPoint green_of_eigenvalue(complex c, complex d, complex w, complex lambda) {
  const complex x = w * lambda;
  const double det = std::norm(c - x) + std::norm(d);
  return {std::conj(c - x) / det, -d / det};
}

// Averages green_of_eigenvalue over a phase density with the periodic trapezoid rule.
QuaternionPoint green_by_quadrature(complex c, complex d, complex w, complex m2, complex m3) {
  auto pdf = [&](double t) {
    return (1.0 + 2.0 * (m2 * std::exp(-2.0 * I * t)).real() + 2.0 * (m3 * std::exp(-3.0 * I * t)).real()) /
           (2.0 * std::numbers::pi);
  };
  auto re_a = [&](double t) { return pdf(t) * green_of_eigenvalue(c, d, w, std::exp(I * t)).first.real(); };
  auto im_a = [&](double t) { return pdf(t) * green_of_eigenvalue(c, d, w, std::exp(I * t)).first.imag(); };
  auto re_b = [&](double t) { return pdf(t) * green_of_eigenvalue(c, d, w, std::exp(I * t)).second.real(); };
  auto im_b = [&](double t) { return pdf(t) * green_of_eigenvalue(c, d, w, std::exp(I * t)).second.imag(); };
  using boost::math::quadrature::trapezoidal;
  const double two_pi = 2.0 * std::numbers::pi;
  return {{trapezoidal(re_a, 0.0, two_pi, 1e-14), trapezoidal(im_a, 0.0, two_pi, 1e-14)},
          {trapezoidal(re_b, 0.0, two_pi, 1e-14), trapezoidal(im_b, 0.0, two_pi, 1e-14)}};
}

// (1/n) block trace of (Q (x) 1 - diag(X, X^dagger))^{-1}.
QuaternionPoint green_by_block_trace(complex c, complex d, const Eigen::MatrixXcd& X) {
  const auto n = X.rows();
  Eigen::MatrixXcd big(2 * n, 2 * n);
  const auto id = Eigen::MatrixXcd::Identity(n, n);
  big.topLeftCorner(n, n) = c * id - X;
  big.topRightCorner(n, n) = I * std::conj(d) * id;
  big.bottomLeftCorner(n, n) = I * d * id;
  big.bottomRightCorner(n, n) = std::conj(c) * id - X.adjoint();
  const Eigen::MatrixXcd inv = big.inverse();
  const complex a = inv.topLeftCorner(n, n).trace() / static_cast<double>(n);
  const complex ib = inv.bottomLeftCorner(n, n).trace() / static_cast<double>(n);
  return {a, ib / I};
}

}  // namespace

TEST_CASE("CUE quaternion Green function matches its closed form") {
  const auto cue = UnitaryEnsembleSpec::cue();
  const complex w(0.5, 0.2);
  for (const complex c : {complex(0.9, 0.3), complex(0.2, -0.1), complex(1.5, 0.0)}) {
    for (const complex d : {complex(0.3, 0.0), complex(0.1, 0.2)}) {
      const auto ab = unitary_quaternion_green({c, d}, w, cue);
      const double g = std::sqrt((std::pow(std::abs(c) - std::abs(w), 2) + std::norm(d)) *
                                 (std::pow(std::abs(c) + std::abs(w), 2) + std::norm(d)));
      const complex a = ((-std::norm(w) + std::norm(c) - std::norm(d)) / g + 1.0) / (2.0 * c);
      CHECK(std::abs(ab.first - a) < 1e-14);
      CHECK(std::abs(ab.second + d / g) < 1e-14);
      const auto q = green_by_quadrature(c, d, w, 0.0, 0.0);
      CHECK(std::abs(ab.first - q.first) < 1e-10);
      CHECK(std::abs(ab.second - q.second) < 1e-10);
    }
  }
}

TEST_CASE("CUE Green function tends to the holomorphic one as d vanishes") {
  const complex c(1.3, 0.4), w(0.6);
  const auto ab = unitary_quaternion_green({c, 1e-9}, w, UnitaryEnsembleSpec::cue());
  CHECK(std::abs(ab.first - 1.0 / c) < 1e-8);
  CHECK(std::abs(ab.second) < 1e-8);
}

TEST_CASE("phase-density ensemble against quadrature and a sampled matrix") {
  const complex m2(0.4), w(1.0), c(2.0), d(0.5);
  const auto ens = UnitaryEnsembleSpec::phase_density(m2, 0.0);
  const auto ab = unitary_quaternion_green({c, d}, w, ens);
  const auto q = green_by_quadrature(c, d, w, m2, 0.0);
  CHECK(std::abs(ab.first - q.first) < 1e-10);
  CHECK(std::abs(ab.second - q.second) < 1e-10);

  auto rng = iteration_rng(2024, 0);
  const auto U = sample_phase_unitary(512, ens, rng);
  const auto mc = green_by_block_trace(c, d, w * U);
  CHECK(std::abs(ab.first - mc.first) < 0.02);
  CHECK(std::abs(ab.second - mc.second) < 0.02);

  const auto ens3 = UnitaryEnsembleSpec::phase_density(0.2, complex(0.1, 0.2));
  const complex c3(0.3, 1.4), d3(0.2, 0.1);
  const auto ab3 = unitary_quaternion_green({c3, d3}, complex(0.7, 0.1), ens3);
  const auto q3 = green_by_quadrature(c3, d3, complex(0.7, 0.1), 0.2, complex(0.1, 0.2));
  CHECK(std::abs(ab3.first - q3.first) < 1e-9);
  CHECK(std::abs(ab3.second - q3.second) < 1e-9);
}

TEST_CASE("quaternion Green function preconditions") {
  CHECK_THROWS_AS(unitary_quaternion_green({0.0, 0.3}, 0.5, UnitaryEnsembleSpec::cue()), DomainError);
}

TEST_CASE("hermitization auxiliaries") {
  const complex c(0.7, 0.2), d(0.3, -0.1), w(0.4, 0.3);
  const auto aux = hermitization_aux({c, d}, w);
  const double g2 = (std::pow(std::abs(c) - std::abs(w), 2) + std::norm(d)) *
                    (std::pow(std::abs(c) + std::abs(w), 2) + std::norm(d));
  CHECK(aux.g * aux.g == doctest::Approx(g2).epsilon(1e-14));
  const complex u = (std::norm(w) + std::norm(c) + std::norm(d) + aux.g) / (2.0 * w * std::conj(c));
  CHECK(std::abs(aux.u - u) < 1e-14);
}

TEST_CASE("Blue and Green functions invert each other") {
  const auto cue = UnitaryEnsembleSpec::cue();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const complex a(u(rng), u(rng)), b(0.2 * u(rng), 0.2 * u(rng));
    const complex w(0.3 + 0.5 * std::abs(u(rng)), 0.0);
    int matches = 0;
    for (int s : {1, -1}) {
      const auto cd = cue_blue({a, b}, w, s);
      QuaternionPoint back;
      try {
        back = unitary_quaternion_green(cd, w, cue);
      } catch (const DomainError&) {
        continue;
      }
      if (std::abs(back.first - a) < 1e-9 && std::abs(back.second - b) < 1e-9) ++matches;
    }
    CHECK(matches >= 1);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("Blue function at a = 0.3, b = 0.4, w = 0.5") {
  const QuaternionPoint ab{0.3, 0.4};
  const auto plus = cue_blue(ab, 0.5, 1);
  const auto minus = cue_blue(ab, 0.5, -1);
  CHECK(std::abs(plus.second - minus.second) > 1e-3);
  int matches = 0;
  for (const auto& cd : {plus, minus}) {
    const auto back = unitary_quaternion_green(cd, 0.5, UnitaryEnsembleSpec::cue());
    if (std::abs(back.first - ab.first) < 1e-10 && std::abs(back.second - ab.second) < 1e-10) ++matches;
  }
  CHECK(matches >= 1);
}

TEST_CASE("Blue function as b vanishes") {
  const complex a(0.8, -0.3), w(0.5);
  const auto limit = cue_blue({a, 0.0}, w, -1);
  CHECK(std::abs(limit.first - 1.0 / a) < 1e-14);
  CHECK(limit.second == complex(0.0));
  const auto near = cue_blue({a, 1e-8}, w, -1);
  CHECK(std::abs(near.first - 1.0 / a) < 1e-12);
  CHECK(std::abs(near.second) < 1e-7);
  CHECK_THROWS_AS(cue_blue({a, 0.0}, w, 1), DomainError);
}

TEST_CASE("equal weights: printed M and C values") {
  const auto m = solve_addition(complex(0.6), equal_weights(4, 0.5));
  CHECK(m.M == doctest::Approx(-(1.0 - 0.36) / (1.0 - 0.36 / 4.0)).epsilon(1e-10));
  CHECK(m.M == doctest::Approx(-0.70330).epsilon(1e-5));

  const auto p = solve_addition(complex(0.5), equal_weights(3, 1.0 / std::sqrt(3.0)));
  const double C = (1.0 - 1.0 / 3.0) * (1.0 - 0.25) / std::pow(1.0 - 0.25 / 3.0, 2);
  CHECK(p.C == doctest::Approx(C).epsilon(1e-10));
  CHECK(p.C == doctest::Approx(0.59504).epsilon(1e-5));
}

TEST_CASE("outside the support the holomorphic solution is returned") {
  const WeightVector w{0.4, 0.6};
  const auto out = solve_addition(complex(0.8), w);
  CHECK(out.M == 0.0);
  CHECK(out.C == 0.0);
  const auto hole = solve_addition(complex(0.3), w);
  CHECK(hole.M == -1.0);
  CHECK(hole.C == 0.0);
  const auto rotated = solve_addition(std::polar(0.6, 1.1), w);
  const auto real = solve_addition(complex(0.6), w);
  CHECK(rotated.M == doctest::Approx(real.M).epsilon(1e-14));
}

TEST_CASE("solver output satisfies the master equation, C relation and addition law") {
  const std::vector<WeightVector> cases{WeightVector{0.4, 0.6}, WeightVector{0.15, 0.25, 0.6},
                                        WeightVector{0.3, 0.5, 0.81}, two_value_weights(3, 0.2, 7, 0.35),
                                        WeightVector{0.1, 0.2, 0.3, 0.4, 0.5}};
  for (const auto& w : cases) {
    const auto s = support_formula(w);
    double prev = std::nan("");
    const int N = 60;
    for (int i = 1; i < N; ++i) {
      const double R = s.r_int + s.width() * i / N;
      const auto sol = solve_addition_detailed(complex(R), w);
      REQUIRE(sol.interior);
      const auto& p = sol.point;
      CHECK(p.C == doctest::Approx(-p.M * (p.M + 1.0) / (R * R)).epsilon(1e-10));
      CHECK(std::abs(master_residual(canonicalize(w), R, p.M, sol.signs)) < 1e-9);
      CHECK(addition_law_residual(complex(R), sol, w) < 1e-8);
      if (!std::isnan(prev)) CHECK(std::abs(p.M - prev) < 20.0 * s.width() / N);
      prev = p.M;
    }
  }
}

TEST_CASE("equal weights against the linear closed form on a 1000-point grid") {
  for (int L : {2, 3, 5, 10}) {
    const double w = 1.0 / std::sqrt(L);
    const auto wv = equal_weights(L, w);
    double worst = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double R = i / 1000.0;
      const double rext2 = L * w * w;
      const double closed = -(rext2 - R * R) / (rext2 - R * R / L);
      worst = std::max(worst, std::abs(solve_addition(complex(R), wv).M - closed));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("solutions do not depend on the order of the weights") {
  const WeightVector a{0.2, 0.2, 0.5, 0.3};
  const WeightVector b{0.5, 0.2, 0.3, 0.2};
  for (double R : {0.3, 0.45, 0.6}) CHECK(solve_addition(complex(R), a).M == solve_addition(complex(R), b).M);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(UnitaryEnsembleSpec::phase_density(0.6, 0.0).validate(), InvalidEnsemble);
  CHECK_NOTHROW(UnitaryEnsembleSpec::phase_density(0.4, 0.0).validate());
  CHECK(UnitaryEnsembleSpec::cue().moment(2) == complex(0.0));
}
