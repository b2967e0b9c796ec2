// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cuesum/clt.hpp"
#include "cuesum/eig_density.hpp"
#include "cuesum/finite_size.hpp"
#include "cuesum/monte_carlo.hpp"
#include "cuesum/quaternion.hpp"
#include "cuesum/sv_density.hpp"
#include "cuesum/symmetric.hpp"

using namespace cuesum;

namespace {

const double kPi = std::numbers::pi;

struct Criterion {
  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void progress(const std::string& msg) {
  static const auto start = std::chrono::steady_clock::now();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "[%7.1fs] %s\n", s, msg.c_str());
}

WeightVector A1() { return WeightVector{0.4, std::sqrt(0.84)}; }
WeightVector A2() { return WeightVector{0.4, 0.6}; }
WeightVector B1() { return WeightVector{0.4, 0.6, std::sqrt(1.0 - 0.16 - 0.36)}; }
WeightVector B2() { return WeightVector{0.3, 0.5, std::sqrt(0.66)}; }
WeightVector B3() { return WeightVector{0.25, 0.35, 0.4}; }
WeightVector B4() { return WeightVector{0.15, 0.25, 0.6}; }
WeightVector C1() { return two_value_weights(3, 0.2, 7, std::sqrt(0.88 / 7.0)); }
WeightVector C2() { return two_value_weights(3, 0.2, 7, 0.4 / 7.0); }
WeightVector D(int L) { return equal_weights(L, 1.0 / std::sqrt(L)); }

std::vector<std::pair<std::string, WeightVector>> all_configs() {
  return {{"A1", A1()}, {"A2", A2()}, {"B1", B1()}, {"B2", B2()}, {"B3", B3()}, {"B4", B4()},
          {"C1", C1()}, {"C2", C2()}, {"D1", D(2)},  {"D2", D(3)},  {"D3", D(5)},  {"D4", D(10)}};
}

SimConfig paper_protocol(std::uint64_t seed) {
  SimConfig c;
  c.n = 500;
  c.iterations = 1000;
  c.bins = 100;
  c.seed = seed;
  return c;
}

// Interior sup-norm of |M_numeric - M_reference| on 200 points.
double max_M_difference(const WeightVector& w, DensityMethod method) {
  const EigDensityModel ref(w, {}, method);
  const auto& s = ref.support();
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double R = s.r_int + s.width() * (i + 0.5) / 200.0;
    worst = std::max(worst, std::abs(solve_addition(complex(R), w).M - ref.M(R)));
  }
  return worst;
}

double bulk_l1_eig(const SimResult& sim, const EigDensityModel& model) {
  const auto& s = model.support();
  const double margin = 0.05 * s.width();
  return l1_distance(
      sim.histogram, [&](double a, double b) { return model.bin_average(a, b); }, s.r_int + margin,
      s.r_ext - margin);
}

double bulk_l1_sv(const SimResult& sim, const SVDensity& curve) {
  const double lo = curve.endpoints.front(), hi = curve.endpoints.back();
  const double margin = 0.05 * (hi - lo);
  return l1_distance(
      sim.histogram, [&](double a, double b) { return curve_bin_mean(curve.grid, curve.values, a, b); },
      lo + margin, hi - margin);
}

// ---- oracles shared with criterion 9

double brute_force_mu(const std::vector<double>& x, const Partition& p) {
  const std::size_t k = p.size();
  std::vector<std::size_t> idx(k, 0);
  double total = 0.0;
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == k) {
      double term = 1.0;
      for (std::size_t s = 0; s < k; ++s) term *= std::pow(x[idx[s]], p[s]);
      total += term;
      return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::find(idx.begin(), idx.begin() + depth, i) != idx.begin() + depth) continue;
      idx[depth] = i;
      rec(depth + 1);
    }
  };
  rec(0);
  std::map<int, int> mult;
  for (int part : p) ++mult[part];
  double sym = 1.0;
  for (const auto& [part, m] : mult) sym *= std::tgamma(m + 1.0);
  return total / sym;
}

double erfc_quadrature(double x) {
  boost::math::quadrature::exp_sinh<double> tail;
  boost::math::quadrature::tanh_sinh<double> finite;
  const double c = 2.0 / std::sqrt(kPi);
  auto g = [](double t) { return std::exp(-t * t); };
  if (x >= 0.0) return c * tail.integrate([&](double u) { return g(x + u); }, 0.0, INFINITY);
  return c * (finite.integrate(g, x, 0.0) + tail.integrate(g, 0.0, INFINITY));
}

double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

double unit_phase(complex z) {
  double t = std::arg(z);
  if (t < 0) t += 2.0 * kPi;
  return t / (2.0 * kPi);
}

// ---- criteria

Criterion criterion1() {
  Criterion c{1, "closed-form and polynomial cross-validation of M(R)"};
  struct Case {
    std::string name;
    WeightVector w;
    DensityMethod method;
  };
  std::vector<Case> cases{{"L=2 (0.4, 0.6)", A2(), DensityMethod::closed_form},
                          {"L=3 (0.4, 0.6, sqrt 0.48)", B1(), DensityMethod::polynomial},
                          {"3/7 (0.2, sqrt(0.88/7))", C1(), DensityMethod::polynomial},
                          {"3/7 (0.2, 0.4/7)", C2(), DensityMethod::polynomial}};
  for (int L : {2, 3, 5, 10}) cases.push_back({fmt("equal weights L=%d", L), D(L), DensityMethod::closed_form});
  for (const auto& k : cases) {
    const double d = max_M_difference(k.w, k.method);
    c.check(d <= 1e-8, fmt("%s: max |dM| = %.2e (<= 1e-8)", k.name.c_str(), d));
  }
  return c;
}

Criterion criterion2() {
  Criterion c{2, "support radii"};
  const auto s = support(A2());
  c.check(std::abs(s.r_int - 0.44721) < 5e-6 && std::abs(s.r_ext - 0.72111) < 5e-6,
          fmt("(0.4, 0.6): r_int = %.6f, r_ext = %.6f (0.44721, 0.72111)", s.r_int, s.r_ext));
  for (int L : {2, 3, 5, 10}) {
    const auto e = support(D(L));
    c.check(std::abs(e.r_ext - 1.0) < 1e-12 && e.r_int == 0.0,
            fmt("equal weights L=%d: r_ext = %.15f, r_int = %g", L, e.r_ext, e.r_int));
  }
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> mod(0.05, 1.0), ph(-kPi, kPi);
  std::uniform_int_distribution<int> size(2, 6);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    std::vector<complex> w(static_cast<std::size_t>(size(rng)));
    for (auto& x : w) x = std::polar(mod(rng), ph(rng));
    const WeightVector wv(w);
    const auto f = support_formula(wv), n = numeric_support(wv);
    worst = std::max({worst, std::abs(f.r_int - n.r_int), std::abs(f.r_ext - n.r_ext)});
  }
  c.check(worst <= 1e-6, fmt("50 random vectors: max radius disagreement %.2e (<= 1e-6)", worst));
  return c;
}

struct PaperRuns {
  std::pair<SimResult, SimResult> A2, B1, D1;
  SimResult C1_sv;
};

PaperRuns run_paper_protocol() {
  PaperRuns r;
  progress("Monte Carlo: L=2 (0.4, 0.6), N=500, 1000 iterations");
  r.A2 = simulate_sum_joint(A2(), paper_protocol(1001));
  progress("Monte Carlo: L=3 (0.4, 0.6, sqrt 0.48)");
  r.B1 = simulate_sum_joint(B1(), paper_protocol(1002));
  progress("Monte Carlo: equal weights L=2");
  r.D1 = simulate_sum_joint(D(2), paper_protocol(1003));
  progress("Monte Carlo: 3/7 weights, singular values");
  r.C1_sv = simulate_sum_sv(C1(), paper_protocol(1004));
  progress("Monte Carlo done");
  return r;
}

Criterion criterion3(const PaperRuns& runs) {
  Criterion c{3, "eigenvalue scatter and radial histogram for L=2 (0.4, 0.6)"};
  const auto& sim = runs.A2.first;
  const EigDensityModel model(A2(), {}, DensityMethod::closed_form);
  const auto& s = model.support();
  std::size_t inside = 0;
  for (double m : sim.moduli()) inside += (m >= s.r_int - 0.05 && m <= s.r_ext + 0.05);
  const double frac = static_cast<double>(inside) / static_cast<double>(sim.eigenvalues.size());
  c.check(frac >= 0.99, fmt("fraction of moduli in [r_int - 0.05, r_ext + 0.05] = %.5f (>= 0.99)", frac));
  const double l1 = bulk_l1_eig(sim, model);
  c.check(l1 <= 0.05, fmt("bulk L1 distance = %.4f (<= 0.05)", l1));
  return c;
}

Criterion criterion4(const PaperRuns& runs) {
  Criterion c{4, "erfc finite-size fits"};
  const EigDensityModel d1(D(2)), b1(B1()), a2(A2());
  const auto fd = fit_q(runs.D1.first.histogram, d1, 500);
  c.check(std::abs(fd.q_ext - 2.04) <= 0.4, fmt("equal weights L=2: q = %.3f (2.04 +- 0.4)", fd.q_ext));
  const auto fb = fit_q(runs.B1.first.histogram, b1, 500);
  c.check(std::abs(fb.q_ext - 1.82) <= 0.4, fmt("L=3 disk: q = %.3f (1.82 +- 0.4)", fb.q_ext));
  const auto fa = fit_q(runs.A2.first.histogram, a2, 500);
  const double qi = fa.q_int.value_or(NAN);
  c.check(std::abs(fa.q_ext - 2.98) <= 0.5 && std::abs(qi - 2.33) <= 0.5,
          fmt("annulus (0.4, 0.6): (q_ext, q_int) = (%.3f, %.3f) ((2.98, 2.33) +- 0.5)", fa.q_ext, qi));
  for (const auto& [name, f] : {std::pair{"L=2 equal", fd}, std::pair{"L=3 disk", fb}, std::pair{"annulus", fa}}) {
    c.check(f.residual < f.unfitted_residual,
            fmt("%s: residual %.4g < unfitted %.4g", name, f.residual, f.unfitted_residual));
    c.check(!f.at_bound, fmt("%s: optimum away from the q bounds", name));
  }
  return c;
}

Criterion criterion5(const PaperRuns& runs) {
  Criterion c{5, "singular-value densities"};
  double worst = 0.0;
  for (int i = 1; i < 400; ++i) {
    const double x = 0.04 + 0.96 * i / 400.0;
    const double closed = 1.0 / (kPi * std::sqrt((x - 0.04) * (1.0 - x)));
    worst = std::max(worst, std::abs(sv_density_at(x, A2()) - closed));
  }
  const auto ends = sv_endpoints(A2()).values;
  c.check(worst <= 1e-6, fmt("L=2 (0.4, 0.6) homotopy vs closed form: interior sup %.2e (<= 1e-6)", worst));
  c.check(ends.size() == 2 && std::abs(ends[0] - 0.04) < 1e-9 && std::abs(ends[1] - 1.0) < 1e-9,
          fmt("end points %.10f, %.10f (0.04, 1.0)", ends.front(), ends.back()));
  for (int L : {2, 3, 5, 10}) {
    const double top = 4.0 * (1.0 - 1.0 / L);
    double dk = 0.0;
    for (int i = 1; i < 200; ++i) {
      const double x = top * i / 200.0;
      dk = std::max(dk, std::abs(sv_rho_equal_weights(L, 1.0 / std::sqrt(L), x) - sv_density_at(x, D(L))));
    }
    c.check(dk <= 1e-8, fmt("Kesten L=%d vs master equation: sup %.2e (<= 1e-8)", L, dk));
  }
  const std::vector<std::tuple<std::string, WeightVector, const SimResult*>> mc{
      {"L=2 (0.4, 0.6)", A2(), &runs.A2.second},
      {"L=3 (0.4, 0.6, sqrt 0.48)", B1(), &runs.B1.second},
      {"3/7 (0.2, sqrt(0.88/7))", C1(), &runs.C1_sv},
      {"equal weights L=2", D(2), &runs.D1.second}};
  for (const auto& [name, w, sim] : mc) {
    const double l1 = bulk_l1_sv(*sim, sv_density(w));
    c.check(l1 <= 0.05, fmt("%s: Monte Carlo bulk L1 = %.4f (<= 0.05)", name.c_str(), l1));
  }
  return c;
}

Criterion criterion6() {
  Criterion c{6, "asymptotics, reflection, positivity and normalization"};
  double asym = 0.0, refl = 0.0, eig_norm = 0.0, sv_norm = 0.0;
  bool nonneg = true;
  for (const auto& [name, w] : all_configs()) {
    for (int k = 0; k < 8; ++k) {
      const complex z = std::polar(1e6, -kPi + 2.0 * kPi * (k + 0.5) / 8.0);
      asym = std::max(asym, std::abs(z * sv_green(z, w) - 1.0));
    }
    for (const complex z : {complex(0.3, 0.2), complex(0.7, 1e-3), complex(-0.4, 0.5), complex(2.0, 0.1)}) {
      const complex g = sv_green(z, w);
      refl = std::max(refl, std::abs(sv_green(std::conj(z), w) - std::conj(g)) / std::max(1.0, std::abs(g)));
    }
    const auto e = radial_density(w);
    eig_norm = std::max(eig_norm, std::abs(e.integral() - 1.0));
    for (double v : e.values) nonneg = nonneg && v >= 0.0;
    const auto s = sv_density(w);
    sv_norm = std::max(sv_norm, std::abs(s.integral() - 1.0));
    for (double v : s.values) nonneg = nonneg && v >= 0.0;
  }
  c.check(asym <= 1e-5, fmt("max |z G(z) - 1| at |z| = 1e6: %.2e (<= 1e-5)", asym));
  c.check(refl <= 1e-10, fmt("max Schwarz reflection defect: %.2e (<= 1e-10)", refl));
  c.check(nonneg, "all densities nonnegative");
  c.check(eig_norm <= 1e-4, fmt("eigenvalue normalization defect %.2e (<= 1e-4)", eig_norm));
  c.check(sv_norm <= 1e-3, fmt("singular-value normalization defect %.2e (<= 1e-3)", sv_norm));
  return c;
}

Criterion criterion7() {
  Criterion c{7, "N-transform identity"};
  std::vector<std::pair<std::string, WeightVector>> cases{{"L=2 (0.4, 0.6)", A2()}};
  for (int L : {2, 3, 5, 10}) cases.push_back({fmt("equal weights L=%d", L), D(L)});
  for (const auto& [name, w] : cases) {
    double worst = 0.0;
    for (int k = 1; k <= 9; ++k) {
      const auto [left, right] = n_transform_bridge(w, -0.1 * k);
      worst = std::max(worst, std::abs(left - right));
    }
    c.check(worst <= 1e-5, fmt("%s: max residual %.2e (<= 1e-5)", name.c_str(), worst));
  }
  return c;
}

Criterion criterion8() {
  Criterion c{8, "central limit theorem"};

  progress("CLT (a): L=100 random small weights, N=200, 200 iterations");
  {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> mod(0.5, 1.5), ph(-kPi, kPi);
    std::vector<complex> w(100);
    for (auto& x : w) x = std::polar(mod(rng), ph(rng));
    double s2 = 0.0;
    for (const auto& x : w) s2 += std::norm(x);
    for (auto& x : w) x /= std::sqrt(s2);
    const WeightVector wv(w);
    const auto law = clt_small_weights_density(wv);
    const double sigma = std::sqrt(law.sigma_sq);
    SimConfig cfg;
    cfg.n = 200;
    cfg.iterations = 200;
    cfg.seed = 8001;
    cfg.range = std::pair{0.0, 1.05 * sigma};
    const auto sim = simulate_sum(wv, cfg);
    const double l1 = l1_distance(
        sim.histogram, [&](double a, double b) { return (b * b - a * a) / (law.sigma_sq * (b - a)); },
        0.05 * sigma, 0.95 * sigma);
    c.check(l1 <= 0.05, fmt("(a) radial histogram vs 2R/sigma^2: bulk L1 = %.4f (<= 0.05)", l1));
  }

  progress("CLT (b): m2 = 0.4 phase ensemble, L=50, N=200");
  {
    SimConfig cfg;
    cfg.n = 200;
    cfg.iterations = 50;
    cfg.seed = 8002;
    cfg.ensemble = UnitaryEnsembleSpec::phase_density(0.4, 0.0);
    const auto sim = simulate_sum(D(50), cfg);
    const auto e = ellipse_check(sim.eigenvalues, 0.4);
    c.check(e.coverage >= 0.97, fmt("(b) coverage of the 1.05-scaled ellipse = %.4f (>= 0.97)", e.coverage));
    c.check(e.flatness <= 0.15,
            fmt("(b) interior density variation = %.4f over %d cells (<= 0.15)", e.flatness, e.interior_cells));
  }

  progress("CLT (c): m3 = 1, L in {25, 100, 400}");
  {
    SimConfig cfg;
    cfg.n = 100;
    cfg.iterations = 20;
    cfg.seed = 8003;
    cfg.ensemble = UnitaryEnsembleSpec::phase_atoms({0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0},
                                                    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    std::vector<double> Ls, stats;
    std::string series;
    for (int L : {25, 100, 400}) {
      const auto sim = simulate_sum(D(L), cfg);
      Ls.push_back(L);
      stats.push_back(deviation_statistic(sim.eigenvalues, 1.0));
      series += fmt(" L=%d: %.4f (%.4f)", L, stats.back(), predicted_deviation(1.0, L));
    }
    bool positive = std::all_of(stats.begin(), stats.end(), [](double v) { return v > 0.0; });
    const double slope = positive ? log_log_slope(Ls, stats) : NAN;
    c.check(positive && std::abs(slope + 0.5) <= 0.15,
            fmt("(c) log-log slope = %.3f (-0.5 +- 0.15);%s", slope, series.c_str()));
  }
  return c;
}

Criterion criterion9() {
  Criterion c{9, "oracle micro-tests"};
  {
    std::mt19937_64 rng(9001);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const std::vector<Partition> parts{{1}, {2}, {3}, {1, 1}, {2, 1}, {1, 1, 1}, {2, 2}, {3, 1, 1}};
    double worst = 0.0;
    for (int t = 0; t < 30; ++t) {
      std::vector<complex> w(static_cast<std::size_t>(3 + t % 5));
      for (auto& x : w) x = u(rng);
      const WeightVector wv(w);
      for (const auto& p : parts) {
        if (p.size() > w.size()) continue;
        const double ref = brute_force_mu(wv.moduli_squared(), p);
        worst = std::max(worst, std::abs(monomial_mu(wv, p) - ref) / std::max(1.0, std::abs(ref)));
      }
    }
    c.check(worst <= 1e-12, fmt("monomial_mu vs enumeration: %.2e (<= 1e-12)", worst));
  }
  {
    double worst = 0.0;
    for (int k = -100; k <= 100; ++k) {
      const double x = 0.1 * k, ref = erfc_quadrature(x);
      worst = std::max(worst, std::abs(cuesum::erfc(x) - ref) / ref);
    }
    c.check(worst <= 1e-12, fmt("erfc vs quadrature on |x| <= 10: relative %.2e (<= 1e-12)", worst));
  }
  {
    std::vector<double> u;
    for (int i = 0; i < 2000; ++i) {
      Rng rng = iteration_rng(9002, static_cast<std::uint64_t>(i));
      u.push_back(unit_phase(sample_haar_unitary(1, rng)(0, 0)));
    }
    const double d = ks_uniform(u), crit = 1.6276 / std::sqrt(2000.0);
    c.check(d < crit, fmt("n=1 phases: KS %.4f < %.4f (1%% level)", d, crit));
  }
  {
    complex mean = 0.0;
    double unitarity = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Rng rng = iteration_rng(9003, static_cast<std::uint64_t>(i));
      const auto U = sample_haar_unitary(100, rng);
      mean += U.trace() / 100.0;
      unitarity = std::max(unitarity, (U.adjoint() * U - Eigen::MatrixXcd::Identity(100, 100)).cwiseAbs().maxCoeff());
    }
    mean /= 1000.0;
    c.check(std::abs(mean) <= 0.0095, fmt("m1 over 1000 draws at n=100: |mean| = %.5f (<= 0.0095)", std::abs(mean)));
    c.check(unitarity <= 1e-12, fmt("unitarity defect %.2e (<= 1e-12)", unitarity));
  }
  {
    Rng rng = iteration_rng(9004, 0);
    std::vector<double> u;
    for (const auto& z : general_eigenvalues(sample_haar_unitary(500, rng))) u.push_back(unit_phase(z));
    const double d = ks_uniform(u), crit = 1.6276 / std::sqrt(500.0);
    c.check(d < crit, fmt("eigenphases of one n=500 draw: KS %.4f < %.4f (1%% level)", d, crit));
  }
  return c;
}

void report(const Criterion& c, bool& all) {
  std::printf("criterion %d %s: %s\n", c.id, c.pass ? "PASS" : "FAIL", c.title.c_str());
  for (const auto& d : c.details) std::printf("%s\n", d.c_str());
  std::fflush(stdout);
  all = all && c.pass;
}

}  // namespace

int main() {
  bool all = true;
  std::vector<Criterion> done;
  auto run = [&](auto&& f) {
    try {
      done.push_back(f());
    } catch (const std::exception& e) {
      Criterion c{static_cast<int>(done.size()) + 1, "aborted"};
      c.check(false, e.what());
      done.push_back(c);
    }
    report(done.back(), all);
  };
  run(criterion1);
  run(criterion2);
  PaperRuns runs;
  bool have_runs = true;
  try {
    runs = run_paper_protocol();
  } catch (const std::exception& e) {
    have_runs = false;
    progress(std::string("Monte Carlo failed: ") + e.what());
  }
  auto with_runs = [&](Criterion (*f)(const PaperRuns&), int id) {
    return [&, f, id] {
      if (!have_runs) {
        Criterion c{id, "Monte Carlo unavailable"};
        c.check(false, "paper-protocol simulation failed");
        return c;
      }
      return f(runs);
    };
  };
  run(with_runs(criterion3, 3));
  run(with_runs(criterion4, 4));
  run(with_runs(criterion5, 5));
  run(criterion6);
  run(criterion7);
  run(criterion8);
  run(criterion9);

  std::printf("\nsummary\n");
  for (const auto& c : done) std::printf("criterion %d: %s\n", c.id, c.pass ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
