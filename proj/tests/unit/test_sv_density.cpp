#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cuesum/errors.hpp"
#include "cuesum/polynomial.hpp"
#include "cuesum/sv_density.hpp"

using namespace cuesum;

namespace {

const double kPi = std::numbers::pi;

complex printed_G_two(double w1, double w2, complex z) {
  return 1.0 / (std::sqrt(z - (w1 - w2) * (w1 - w2)) * std::sqrt(z - (w1 + w2) * (w1 + w2)));
}

double arcsine_rho(double a, double b, double x) { return 1.0 / (kPi * std::sqrt((x - a) * (b - x))); }

// Kesten density as printed, without the 1/pi.
double printed_kesten(int L, double rext, double x) {
  const double r2 = rext * rext;
  return std::sqrt((1.0 - 1.0 / L) * r2 / x - 0.25) / (r2 - x / L);
}

double nearest_root_distance(std::span<const complex> coeffs, complex G) {
  double best = 1e300;
  for (const auto& r : polynomial_roots(coeffs)) best = std::min(best, std::abs(r - G));
  return best;
}

std::vector<WeightVector> panel_weights() {
  return {WeightVector{0.4, 0.6},
          WeightVector{0.4, std::sqrt(0.84)},
          WeightVector{0.4, 0.6, std::sqrt(0.48)},
          WeightVector{0.3, 0.5, std::sqrt(0.66)},
          WeightVector{0.25, 0.35, 0.4},
          WeightVector{0.15, 0.25, 0.6},
          two_value_weights(3, 0.2, 7, std::sqrt(0.88 / 7.0)),
          two_value_weights(3, 0.2, 7, 0.4 / 7.0),
          equal_weights(2, std::sqrt(0.5)),
          equal_weights(10, 1.0 / std::sqrt(10.0))};
}

}  // namespace

TEST_CASE("two weights: homotopy branch equals the printed Green function") {
  const WeightVector w{0.4, 0.6};
  for (const complex z : {complex(0.5, 1e-6), complex(0.02, 0.01), complex(1.3, 0.2), complex(-0.4, 0.5),
                          complex(0.7, -0.3), complex(3.0, 0.0), complex(-1.0, 0.0)}) {
    const complex g = sv_green(z, w);
    CHECK(std::abs(g - printed_G_two(0.4, 0.6, z)) < 1e-10 * std::abs(g));
    CHECK(std::abs(sv_green_two_weights(0.4, 0.6, z) - printed_G_two(0.4, 0.6, z)) < 1e-14);
  }
}

TEST_CASE("two weights: homotopy density equals the arcsine-type closed form") {
  const WeightVector w{0.4, 0.6};
  const auto d = sv_density(w, {}, DensityMethod::homotopy);
  REQUIRE(d.endpoints.size() == 2);
  CHECK(d.endpoints[0] == doctest::Approx(0.04).epsilon(1e-10));
  CHECK(d.endpoints[1] == doctest::Approx(1.0).epsilon(1e-10));
  double worst = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double x = 0.04 + 0.96 * i / 200.0;
    worst = std::max(worst, std::abs(sv_density_at(x, w) - arcsine_rho(0.04, 1.0, x)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("equal weights 0.5, L = 2: arcsine law on (0, 1)") {
  for (double x : {0.1, 0.4, 0.77}) {
    CHECK(sv_rho_equal_weights(2, 0.5, x) == doctest::Approx(1.0 / (kPi * std::sqrt(x * (1.0 - x)))).epsilon(1e-12));
    CHECK(sv_density_at(x, equal_weights(2, 0.5)) == doctest::Approx(1.0 / (kPi * std::sqrt(x * (1.0 - x)))).epsilon(1e-8));
  }
}

TEST_CASE("Kesten density: normalization fixes the 1/pi and the homotopy agrees") {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (int L : {2, 3, 5, 10}) {
    const double top = 4.0 * (1.0 - 1.0 / L);
    const double mass = integrator.integrate([&](double x) { return printed_kesten(L, 1.0, x); }, 0.0, top);
    CHECK(mass / kPi == doctest::Approx(1.0).epsilon(1e-7));
    const auto w = equal_weights(L, 1.0 / std::sqrt(L));
    double worst = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double x = top * i / 100.0;
      CHECK(sv_rho_equal_weights(L, 1.0 / std::sqrt(L), x) ==
            doctest::Approx(printed_kesten(L, 1.0, x) / kPi).epsilon(1e-12));
      worst = std::max(worst, std::abs(sv_density_at(x, w) - printed_kesten(L, 1.0, x) / kPi));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("asymptotics and reflection") {
  for (const auto& w : panel_weights()) {
    for (double r : {1e6}) {
      for (double phase : {0.3, 1.5, 2.8, -2.0}) {
        const complex z = std::polar(r, phase);
        CHECK(std::abs(z * sv_green(z, w) - 1.0) <= 1e-5);
      }
    }
    for (const complex z : {complex(0.3, 0.2), complex(0.8, 1e-3), complex(-0.2, 0.4)}) {
      const complex g = sv_green(z, w), gc = sv_green(std::conj(z), w);
      CHECK(std::abs(gc - std::conj(g)) <= 1e-10 * std::max(1.0, std::abs(g)));
    }
  }
}

TEST_CASE("many equal weights approach the Marchenko-Pastur law") {
  const auto w = equal_weights(200, 1.0 / std::sqrt(200.0));
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = 0.1 + 3.7 * i / 100.0;
    worst = std::max(worst, std::abs(sv_density_at(x, w) - sv_rho_marchenko_pastur(1.0, x)));
    CHECK(sv_rho_marchenko_pastur(1.0, x) ==
          doctest::Approx(std::sqrt(1.0 / x - 0.25) / kPi).epsilon(1e-14));
  }
  CHECK(worst < 2e-2);
}

TEST_CASE("end points") {
  const auto two = sv_endpoints(WeightVector{0.4, 0.6});
  REQUIRE(two.values.size() == 2);
  CHECK(two.values[0] == doctest::Approx(0.04).epsilon(1e-10));
  CHECK(two.values[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(two.from_scan);

  for (int L : {3, 5}) {
    const auto e = sv_endpoints(equal_weights(L, 1.0 / std::sqrt(L)));
    REQUIRE(e.values.size() == 2);
    CHECK(std::abs(e.values[0]) < 1e-9);
    CHECK(e.values[1] == doctest::Approx(4.0 * (1.0 - 1.0 / L)).epsilon(1e-9));
  }

  // Three weights: where the density switches off, located by bisection on the density itself.
  const WeightVector w{0.4, 0.6, std::sqrt(0.48)};
  const auto e = sv_endpoints(w);
  REQUIRE(e.values.size() >= 2);
  auto on = [&](double x) { return sv_density_at(x, w) > 1e-6; };
  double lo = 0.5 * (e.values.front() + e.values.back()), hi = 1.05 * std::pow(w.sum_moduli(), 2);
  REQUIRE(on(lo));
  REQUIRE_FALSE(on(hi));
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (on(mid) ? lo : hi) = mid;
  }
  CHECK(std::abs(e.values.back() - lo) < 1e-4);
}

TEST_CASE("quintic and quartic contain the tracked branch") {
  // Equal weights: the Kesten Green function is a root of the quintic.
  const auto eq = equal_weights(3, 0.5);
  for (const complex z : {complex(0.3, 0.1), complex(0.6, 1e-6), complex(-0.5, 0.2)}) {
    const auto coeffs = polynomial_G_L3(eq, z);
    const complex g = sv_green_equal_weights(3, 0.5, z);
    double scale = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) scale += std::abs(coeffs[k]) * std::pow(std::abs(g), 5.0 - k);
    CHECK(std::abs(polynomial_eval(std::span<const complex>(coeffs), g)) < 1e-12 * scale);
  }
  // One weight in each block: the quartic is solved by the two-weight Green function.
  for (const complex z : {complex(0.3, 0.1), complex(0.6, 1e-3)}) {
    const auto coeffs = polynomial_G_L1L2(1, 0.6, 1, 0.4, z);
    CHECK(nearest_root_distance(coeffs, printed_G_two(0.4, 0.6, z)) < 1e-8);
  }
  const double w2 = 0.4 / 7.0;
  const complex z(0.5, 1e-6);
  const complex g = sv_green(z, two_value_weights(3, 0.2, 7, w2));
  CHECK(nearest_root_distance(polynomial_G_L1L2(3, 0.2, 7, w2, z), g) < 1e-8 * std::max(1.0, std::abs(g)));

  const WeightVector three{0.4, 0.6, std::sqrt(0.48)};
  const complex g3 = sv_green(complex(0.7, 1e-6), three);
  CHECK(nearest_root_distance(polynomial_G_L3(three, complex(0.7, 1e-6)), g3) < 1e-8 * std::max(1.0, std::abs(g3)));
}

TEST_CASE("closed form, polynomial and homotopy routes agree") {
  struct Case {
    WeightVector w;
    std::vector<DensityMethod> methods;
  };
  const std::vector<Case> cases{
      {WeightVector{0.4, 0.6}, {DensityMethod::closed_form, DensityMethod::polynomial, DensityMethod::homotopy}},
      {equal_weights(3, 0.5), {DensityMethod::closed_form, DensityMethod::polynomial, DensityMethod::homotopy}},
      {WeightVector{0.3, 0.5, std::sqrt(0.66)}, {DensityMethod::polynomial, DensityMethod::homotopy}}};
  for (const auto& c : cases) {
    std::vector<SVDensity> d;
    for (auto m : c.methods) d.push_back(sv_density(c.w, {}, m));
    const auto& ref = d.front();
    const auto& ends = ref.endpoints;
    const double span = ends.back() - ends.front();
    for (std::size_t k = 1; k < d.size(); ++k) {
      REQUIRE(d[k].grid.size() == ref.grid.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < ref.grid.size(); ++i) {
        const double x = ref.grid[i];
        REQUIRE(std::abs(d[k].grid[i] - x) < 1e-9);
        bool near_end = false;
        for (double e : ends) near_end = near_end || std::abs(x - e) < 0.01 * span;
        if (!near_end) worst = std::max(worst, std::abs(d[k].values[i] - ref.values[i]));
      }
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("densities are nonnegative and normalized") {
  for (const auto& w : panel_weights()) {
    const auto d = sv_density(w);
    CHECK(std::abs(d.integral() - 1.0) <= 1e-3);
    for (double v : d.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("N-transform identity") {
  for (const auto& w : {WeightVector{0.4, 0.6}, equal_weights(2, std::sqrt(0.5)), equal_weights(3, 1.0 / std::sqrt(3.0)),
                        equal_weights(5, 0.3)}) {
    for (int k = 1; k <= 9; ++k) {
      const auto [left, right] = n_transform_bridge(w, -0.1 * k);
      CHECK(std::abs(left - right) <= 1e-5);
    }
  }
}

TEST_CASE("method preconditions") {
  CHECK_THROWS_AS(sv_density(WeightVector{0.1, 0.2, 0.3, 0.4}, {}, DensityMethod::polynomial), InvalidConfig);
  CHECK_THROWS_AS(sv_density(WeightVector{0.1, 0.2, 0.3}, {}, DensityMethod::closed_form), InvalidConfig);
  CHECK_THROWS_AS(polynomial_G_L3(WeightVector{0.4, 0.6}, complex(0.5, 0.1)), DomainError);
}
