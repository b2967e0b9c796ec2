#include "cuesum/sv_density.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/tools/roots.hpp>

#include "cuesum/errors.hpp"
#include "cuesum/polynomial.hpp"
#include "cuesum/symmetric.hpp"

namespace cuesum {

namespace {

constexpr double kPi = std::numbers::pi;

// Weight groups as (|w|^2, multiplicity); members of a group share one
// square-root branch along the continuation path.
struct SvSystem {
  std::vector<double> a;
  std::vector<double> m;
  double L = 0.0;
  double scale = 0.0;  // (sum |w|)^2, bounds the support

  explicit SvSystem(const WeightVector& weights) {
    const WeightVector canon = canonicalize(weights);
    for (const auto& g : canon.compressed()) {
      a.push_back(g.modulus * g.modulus);
      m.push_back(g.multiplicity);
    }
    L = static_cast<double>(canon.size());
    scale = canon.sum_moduli() * canon.sum_moduli();
  }

  std::size_t size() const { return a.size(); }
};

struct TrackPoint {
  complex z;
  complex G;
  std::vector<complex> r;
};

// Square roots sqrt(1 + 4 a z G^2) on the branch nearest `ref`; false if the
// choice is ambiguous.
bool pick_roots(const SvSystem& sys, complex z, complex G, const std::vector<complex>& ref,
                std::vector<complex>& r) {
  r.resize(sys.size());
  for (std::size_t g = 0; g < sys.size(); ++g) {
    const complex p = std::sqrt(1.0 + 4.0 * sys.a[g] * z * G * G);
    const double d1 = std::abs(p - ref[g]), d2 = std::abs(p + ref[g]);
    if (std::min(d1, d2) > 0.5 * std::max(d1, d2) && std::abs(p) > 1e-6) return false;
    r[g] = d1 <= d2 ? p : -p;
  }
  return true;
}

complex residual(const SvSystem& sys, complex z, complex G, const std::vector<complex>& r) {
  complex f = sys.L - 2.0 + 2.0 * z * G;
  for (std::size_t g = 0; g < sys.size(); ++g) f -= sys.m[g] * r[g];
  return f;
}

// Partial derivatives of the master function in G and z.
std::pair<complex, complex> partials(const SvSystem& sys, complex z, complex G,
                                     const std::vector<complex>& r) {
  complex fG = 2.0 * z, fz = 2.0 * G;
  for (std::size_t g = 0; g < sys.size(); ++g) {
    fG -= sys.m[g] * 4.0 * sys.a[g] * z * G / r[g];
    fz -= sys.m[g] * 2.0 * sys.a[g] * G * G / r[g];
  }
  return {fG, fz};
}

bool correct(const SvSystem& sys, TrackPoint& p, const std::vector<complex>& ref) {
  std::vector<complex> r;
  for (int it = 0; it < 12; ++it) {
    if (!pick_roots(sys, p.z, p.G, ref, r)) return false;
    const auto [fG, fz] = partials(sys, p.z, p.G, r);
    if (!std::isfinite(std::abs(fG)) || std::abs(fG) == 0.0) return false;
    const complex f = residual(sys, p.z, p.G, r);
    const double size = sys.L + std::abs(p.z * p.G) + 1.0;
    const complex step = f / fG;
    // Stop at the rounding floor of the residual as well: with many weights
    // the sum of square roots cancels against L.
    if (std::abs(f) <= 1e-15 * size) {
      p.r = r;
      return true;
    }
    p.G -= step;
    if (!std::isfinite(std::abs(p.G))) return false;
    if (std::abs(step) <= 1e-14 * std::abs(p.G)) {
      if (!pick_roots(sys, p.z, p.G, ref, r)) return false;
      p.r = r;
      return std::abs(residual(sys, p.z, p.G, r)) <= 1e-10 * size;
    }
  }
  return false;
}

class Continuation {
 public:
  Continuation(const SvSystem& sys, double x, int side) : sys_(sys), x_(x), side_(side) {
    const double start = 1e6 * std::max(1.0, sys.scale);
    t_ = std::log(start);
    p_.z = complex(x, side * start);
    p_.G = 1.0 / p_.z;
    const std::vector<complex> ones(sys.size(), complex(1.0));
    if (!correct(sys, p_, ones)) throw BranchTrackingFailure("no root near the asymptotic value");
  }

  // Moves to height |Im z| = exp(t_target).
  void advance_to(double t_target) {
    while (t_ > t_target) {
      const double dt = std::min(step_, t_ - t_target);
      const complex z_new(x_, side_ * std::exp(t_ - dt));
      if (try_step(z_new)) {
        t_ -= dt;
        step_ = std::min(1.5 * step_, 0.5);
      } else {
        step_ *= 0.5;
        if (step_ < 1e-10)
          throw BranchTrackingFailure("continuation step collapsed at Im z = " +
                                      std::to_string(std::exp(t_)));
      }
    }
  }

  // Final Newton step onto the real axis.
  void land() {
    if (!try_step(complex(x_, 0.0)))
      throw BranchTrackingFailure("continuation could not reach the real axis");
  }

  complex G() const { return p_.G; }
  const std::vector<complex>& roots() const { return p_.r; }

 private:
  bool try_step(complex z_new) {
    const auto [fG, fz] = partials(sys_, p_.z, p_.G, p_.r);
    const complex dz = z_new - p_.z;
    const complex dG = -fz / fG * dz;
    TrackPoint q{z_new, p_.G + dG, {}};
    std::vector<complex> ref(sys_.size());
    for (std::size_t g = 0; g < sys_.size(); ++g) {
      const complex drz = 2.0 * sys_.a[g] * p_.G * p_.G / p_.r[g];
      const complex drG = 4.0 * sys_.a[g] * p_.z * p_.G / p_.r[g];
      ref[g] = p_.r[g] + drz * dz + drG * dG;
    }
    const complex predicted = q.G;
    if (!correct(sys_, q, ref)) return false;
    if (std::abs(q.G - predicted) > 0.1 * std::abs(q.G)) return false;
    for (std::size_t g = 0; g < sys_.size(); ++g)
      if (std::abs(q.r[g] - ref[g]) > 0.1 * std::max(std::abs(ref[g]), 1e-3)) return false;
    p_ = std::move(q);
    return true;
  }

  const SvSystem& sys_;
  double x_;
  int side_;
  double t_ = 0.0;
  double step_ = 0.1;
  TrackPoint p_;
};

double landing_height(const SvSystem& sys, double x) {
  return 1e-13 * (std::abs(x) + sys.scale);
}

struct Tracked {
  complex G;
  std::vector<complex> r;
};

std::vector<Tracked> track(const SvSystem& sys, double x, std::span<const double> heights) {
  if (heights.empty()) return {};
  int side = 1;
  for (double h : heights)
    if (h != 0.0) {
      side = h > 0.0 ? 1 : -1;
      break;
    }
  Continuation path(sys, x, side);
  std::vector<Tracked> out;
  double last = std::numeric_limits<double>::infinity();
  for (double h : heights) {
    if (side * h < 0.0 || std::abs(h) > last)
      throw DomainError("heights must share one sign and decrease in modulus");
    last = std::abs(h);
    if (h == 0.0) {
      path.advance_to(std::log(landing_height(sys, x)));
      path.land();
    } else {
      path.advance_to(std::log(std::abs(h)));
    }
    out.push_back({path.G(), path.roots()});
  }
  return out;
}

// -Im G at heights 4 eps, 2 eps, eps, extrapolated to eps -> 0 through
// second order.
double extrapolated_rho(const double (&im)[3]) {
  return std::max(-(8.0 * im[2] - 6.0 * im[1] + im[0]) / (3.0 * kPi), 0.0);
}

double richardson_rho(const SvSystem& sys, double x, double eps) {
  const double heights[] = {4.0 * eps, 2.0 * eps, eps};
  const auto g = track(sys, x, heights);
  const double im[] = {g[0].G.imag(), g[1].G.imag(), g[2].G.imag()};
  return extrapolated_rho(im);
}

double effective_epsilon(double x, const SolverConfig& cfg) {
  return x > 0.0 ? std::min(cfg.epsilon, 1e-3 * x) : cfg.epsilon;
}

double rho_from_green(double x, double eps, const std::function<complex(complex)>& green) {
  const double im[] = {green(complex(x, 4.0 * eps)).imag(), green(complex(x, 2.0 * eps)).imag(),
                       green(complex(x, eps)).imag()};
  return extrapolated_rho(im);
}

}  // namespace

// ---------------------------------------------------------------------------
// Green function

complex sv_green(complex z, const WeightVector& weights, const SolverConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(std::abs(z))) throw DomainError("z must be finite");
  const SvSystem sys(weights);
  const double heights[] = {z.imag()};
  return track(sys, z.real(), heights).front().G;
}

std::vector<complex> sv_green_path(double x, std::span<const double> heights,
                                   const WeightVector& weights, const SolverConfig& cfg) {
  cfg.validate();
  const SvSystem sys(weights);
  std::vector<complex> out;
  for (const auto& t : track(sys, x, heights)) out.push_back(t.G);
  return out;
}

complex sv_green_two_weights(double w1, double w2, complex z) {
  const double a = std::abs(w1), b = std::abs(w2);
  return 1.0 / (std::sqrt(z - (a - b) * (a - b)) * std::sqrt(z - (a + b) * (a + b)));
}

complex sv_green_equal_weights(int L, double w, complex z) {
  if (L < 1) throw TooFewWeights(0);
  const double r2 = L * w * w;
  const double inv = 1.0 / L;
  const complex num = 0.5 - inv - std::sqrt(0.25 * z - (1.0 - inv) * r2) / std::sqrt(z);
  return num / (r2 - z * inv);
}

double sv_rho_two_weights(double w1, double w2, double x) {
  const double a = std::abs(w1), b = std::abs(w2);
  const double lo = (a - b) * (a - b), hi = (a + b) * (a + b);
  if (!(x > lo && x < hi)) return 0.0;
  return 1.0 / (kPi * std::sqrt((x - lo) * (hi - x)));
}

double sv_rho_equal_weights(int L, double w, double x) {
  if (L < 1) throw TooFewWeights(0);
  const double r2 = L * w * w;
  const double inv = 1.0 / L;
  if (!(x > 0.0 && x < 4.0 * (1.0 - inv) * r2)) return 0.0;
  return std::sqrt((1.0 - inv) * r2 / x - 0.25) / (kPi * (r2 - x * inv));
}

double sv_rho_marchenko_pastur(double r_ext, double x) {
  if (!(x > 0.0 && x < 4.0 * r_ext * r_ext)) return 0.0;
  return std::sqrt(1.0 / x - 1.0 / (4.0 * r_ext * r_ext)) / (kPi * r_ext);
}

// ---------------------------------------------------------------------------
// Polynomial forms

std::array<complex, 6> polynomial_G_L3(const WeightVector& weights, complex z) {
  if (weights.size() != 3) throw DomainError("the quintic form needs exactly three weights");
  const auto f = SymmetricWeightFunctionals::of(weights);
  const auto& v = f.v;
  const auto& V = f.V;
  const complex z2 = z * z, z3 = z2 * z;
  std::array<complex, 6> c{};
  c[0] = z * (z - v[0] * v[0]) * (z - v[1] * v[1]) * (z - v[2] * v[2]) * (z - v[3] * v[3]);
  c[1] = 4.0 * z *
         (z3 - 3.0 * f.mu1 * z2 + (3.0 * f.mu2 + 2.0 * f.mu11) * z - f.mu3 + f.mu21 -
          10.0 * f.mu111);
  c[2] = 2.0 * (2.0 * z3 - 5.0 * f.mu1 * z2 + 4.0 * f.mu2 * z + V[1] * V[2] * V[3]);
  c[3] = -2.0 * (z2 + v[0] * v[1] * v[2] * v[3]);
  c[4] = -5.0 * z + 2.0 * f.mu1;
  c[5] = -2.0;
  return c;
}

std::array<complex, 5> polynomial_G_L1L2(int l1, double w1, int l2, double w2, complex z) {
  if (l1 < 1 || l2 < 1) throw DomainError("both blocks need at least one weight");
  const double L = l1 + l2;
  const double a = std::abs(w1), b = std::abs(w2);
  const double A = l1 * a, B = l2 * b;
  const complex z2 = z * z;
  std::array<complex, 5> c{};
  c[0] = z2 * (z - (A + B) * (A + B)) * (z - (A - B) * (A - B));
  c[1] = 2.0 * z2 * (L - 2.0) * (z - A * A - B * B);
  c[2] = z * ((L * L - 6.0 * L + 6.0 + l1 * l2) * z + l1 * l1 * (-L * l2 + 2.0 * L - 2.0) * a * a +
              l2 * l2 * (-L * l1 + 2.0 * L - 2.0) * b * b);
  c[3] = z * (L - 2.0) * (-2.0 * L + 2.0 + l1 * l2);
  c[4] = -(L - 1.0) * (l1 - 1.0) * (l2 - 1.0);
  return c;
}

// ---------------------------------------------------------------------------
// Density

double sv_density_at(double x, const WeightVector& weights, const SolverConfig& cfg) {
  cfg.validate();
  const SvSystem sys(weights);
  return richardson_rho(sys, x, effective_epsilon(x, cfg));
}

double SVDensity::integral() const {
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    total += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  return total;
}

namespace {

constexpr double kSupportThreshold = 1e-6;

struct ScanResult {
  std::vector<double> edges;
  std::vector<int> sides;  // +1: density switches on when x increases, -1: off
};

ScanResult scan_support(const SvSystem& sys, const SolverConfig& cfg) {
  const double top = 1.05 * sys.scale;
  std::vector<double> xs{0.0};
  for (int k = -10; k < -2; ++k) xs.push_back(top * std::pow(10.0, k));
  constexpr int n = 400;
  for (int i = 1; i <= n; ++i) xs.push_back(top * i / n);
  std::sort(xs.begin(), xs.end());

  auto rho = [&](double x) { return richardson_rho(sys, x, effective_epsilon(x, cfg)); };
  auto on = [&](double x) { return rho(x) > kSupportThreshold; };
  ScanResult out;
  bool prev = on(xs[1]);
  if (prev) {
    out.edges.push_back(0.0);
    out.sides.push_back(1);
  }
  for (std::size_t i = 2; i < xs.size(); ++i) {
    const bool cur = on(xs[i]);
    if (cur == prev) continue;
    double lo = xs[i - 1], hi = xs[i];
    for (int it = 0; it < 60 && hi - lo > 1e-13 * top; ++it) {
      const double mid = 0.5 * (lo + hi);
      (on(mid) == prev ? lo : hi) = mid;
    }
    out.edges.push_back(0.5 * (lo + hi));
    out.sides.push_back(cur ? 1 : -1);
    prev = cur;
  }
  return out;
}

// Newton on (x, G) for the master equation plus the branch-point condition.
std::optional<double> refine_endpoint(const SvSystem& sys, double x, double G,
                                      const std::vector<int>& signs) {
  for (int it = 0; it < 60; ++it) {
    double f1 = sys.L - 2.0 + 2.0 * x * G, f2 = 0.5;
    double f1x = 2.0 * G, f1G = 2.0 * x, f2x = 0.0, f2G = 0.0;
    double sum_a_over_r = 0.0;
    for (std::size_t g = 0; g < sys.size(); ++g) {
      const double arg = 1.0 + 4.0 * sys.a[g] * x * G * G;
      if (!(arg > 0.0)) return std::nullopt;
      const double r = std::sqrt(arg);
      const double ms = sys.m[g] * signs[g];
      const double a = sys.a[g];
      f1 -= ms * r;
      f1x -= ms * 2.0 * a * G * G / r;
      f1G -= ms * 4.0 * a * x * G / r;
      sum_a_over_r += ms * a / r;
      f2x += G * ms * a * 2.0 * a * G * G / (r * r * r);
      f2G += G * ms * a * 4.0 * a * x * G / (r * r * r);
    }
    f2 -= G * sum_a_over_r;
    f2G -= sum_a_over_r;
    const double det = f1x * f2G - f1G * f2x;
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const double dx = (f1 * f2G - f1G * f2) / det;
    const double dG = (f1x * f2 - f1 * f2x) / det;
    x -= dx;
    G -= dG;
    if (!std::isfinite(x) || !std::isfinite(G)) return std::nullopt;
    if (std::abs(dx) <= 1e-14 * std::max(1.0, std::abs(x)) &&
        std::abs(dG) <= 1e-12 * std::max(1.0, std::abs(G)))
      return x;
  }
  return std::nullopt;
}

// (sum_l s_l |w_l|)^2 over all sign vectors, up to permutations within groups.
std::vector<double> divergent_endpoints(const SvSystem& sys) {
  std::vector<double> out;
  std::vector<int> minus(sys.size(), 0);
  while (true) {
    double v = 0.0;
    for (std::size_t g = 0; g < sys.size(); ++g)
      v += (sys.m[g] - 2.0 * minus[g]) * std::sqrt(sys.a[g]);
    out.push_back(v * v);
    std::size_t g = 0;
    while (g < sys.size() && minus[g] == static_cast<int>(sys.m[g])) minus[g++] = 0;
    if (g == sys.size()) break;
    ++minus[g];
  }
  return out;
}

std::vector<double> clustered_segment(double a, double b, int n) {
  std::vector<double> pts;
  for (int i = 0; i <= n; ++i) {
    const double u = 0.5 * (1.0 - std::cos(kPi * i / n));
    const double v = 0.5 * (1.0 - std::cos(kPi * u));
    pts.push_back(a + (b - a) * v);
  }
  return pts;
}

// Roots of the quintic (L = 3) or quartic (two weight groups) nearest to
// the continued branch, Richardson extrapolated like richardson_rho.
double polynomial_rho(const WeightVector& canon, const SvSystem& sys, double x, double eps) {
  const auto groups = canon.compressed();
  auto roots_at = [&](complex z) {
    if (groups.size() == 2) {
      const auto c = polynomial_G_L1L2(groups[0].multiplicity, groups[0].modulus,
                                       groups[1].multiplicity, groups[1].modulus, z);
      return polynomial_roots(std::span<const complex>(c));
    }
    const auto c = polynomial_G_L3(canon, z);
    return polynomial_roots(std::span<const complex>(c));
  };
  const double heights[] = {4.0 * eps, 2.0 * eps, eps};
  const auto tracked = track(sys, x, heights);
  double im[3];
  for (int k = 0; k < 3; ++k) {
    const auto roots = roots_at(complex(x, heights[k]));
    const complex ref = tracked[k].G;
    im[k] = std::min_element(roots.begin(), roots.end(), [&](complex p, complex q) {
              return std::abs(p - ref) < std::abs(q - ref);
            })->imag();
  }
  return extrapolated_rho(im);
}

}  // namespace

SvEndpoints sv_endpoints(const WeightVector& weights, const SolverConfig& cfg) {
  cfg.validate();
  const SvSystem sys(weights);
  const auto scan = scan_support(sys, cfg);
  if (scan.edges.empty()) throw NoAdmissibleBranch("no singular-value support found");
  SvEndpoints out;
  const double tol = 1e-3 * sys.scale;
  for (double seed : scan.edges) {
    if (seed == 0.0) {
      // At x = 0 the pair of equations degenerates (x G^2 stays finite).
      out.values.push_back(0.0);
      continue;
    }
    const double heights[] = {effective_epsilon(seed, cfg)};
    const auto t = track(sys, seed, heights).front();
    std::vector<int> signs;
    for (const auto& r : t.r) signs.push_back(r.real() >= 0.0 ? 1 : -1);
    // End points where G stays finite solve the pair of equations; where G
    // diverges, x G^2 -> infinity reduces the master equation to
    // sqrt(x) = sum_l s_l |w_l|.
    std::vector<double> candidates;
    if (const auto x = refine_endpoint(sys, seed, t.G.real(), signs); x && *x >= 0.0)
      candidates.push_back(*x);
    for (double v : divergent_endpoints(sys)) candidates.push_back(v);
    double best = seed, best_dist = tol;
    bool found = false;
    for (double c : candidates) {
      if (std::abs(c - seed) <= best_dist) {
        best = c;
        best_dist = std::abs(c - seed);
        found = true;
      }
    }
    out.values.push_back(best);
    if (!found) out.from_scan = true;
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

SVDensity sv_density(const WeightVector& weights, const SolverConfig& cfg, DensityMethod method) {
  cfg.validate();
  const WeightVector canon = canonicalize(weights);
  const auto groups = canon.compressed();
  const bool equal = groups.size() == 1;
  const bool closed_available = equal || canon.size() == 2;
  if (method == DensityMethod::automatic)
    method = closed_available ? DensityMethod::closed_form : DensityMethod::homotopy;
  if (method == DensityMethod::closed_form && !closed_available)
    throw InvalidConfig("no closed form for these weights");
  if (method == DensityMethod::quaternion_numeric)
    throw InvalidConfig("the quaternion method applies to eigenvalues only");
  if (method == DensityMethod::polynomial && !(groups.size() == 2 || canon.size() == 3))
    throw InvalidConfig("no polynomial form for these weights");

  SVDensity out;
  out.method = method;
  if (method == DensityMethod::closed_form) {
    if (equal) {
      const double r2 = canon.sum_moduli_squared();
      out.endpoints = {0.0, 4.0 * (1.0 - 1.0 / canon.size()) * r2};
    } else {
      const double a = groups[0].modulus, b = groups[1].modulus;
      out.endpoints = {(a - b) * (a - b), (a + b) * (a + b)};
    }
  } else {
    const auto ends = sv_endpoints(canon, cfg);
    out.endpoints = ends.values;
    out.endpoints_from_scan = ends.from_scan;
  }

  // Grid: one clustered segment between consecutive end points, plus
  // log-spaced points below 0.01 when the support starts at the origin.
  const auto& ends = out.endpoints;
  const double span = ends.back() - ends.front();
  std::vector<double> grid;
  const int n = cfg.grid_points;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    const double a = ends[k], b = ends[k + 1];
    const int m = std::max(20, static_cast<int>(n * (b - a) / span));
    auto seg = clustered_segment(a, b, m);
    grid.insert(grid.end(), seg.begin(), seg.end());
  }
  if (ends.front() == 0.0) {
    const double top = std::min(0.01, 0.1 * ends.back());
    const double lo = 1e-12 * ends.back();
    const int logs = std::max(40, n / 2);
    for (int i = 0; i < logs; ++i)
      grid.push_back(lo * std::pow(top / lo, static_cast<double>(i) / logs));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  out.grid = grid;

  const SvSystem sys(canon);
  const int L = static_cast<int>(canon.size());
  auto closed_green = [&](complex z) {
    return equal ? sv_green_equal_weights(L, groups[0].modulus, z)
                 : sv_green_two_weights(groups[0].modulus, groups[1].modulus, z);
  };
  out.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const bool at_end = std::find(ends.begin(), ends.end(), x) != ends.end();
    const double eps = effective_epsilon(x, cfg);
    double rho;
    switch (method) {
      case DensityMethod::closed_form:
        if (at_end)
          rho = rho_from_green(x, cfg.epsilon, closed_green);
        else
          rho = equal ? sv_rho_equal_weights(L, groups[0].modulus, x)
                      : sv_rho_two_weights(groups[0].modulus, groups[1].modulus, x);
        break;
      case DensityMethod::polynomial:
        rho = polynomial_rho(canon, sys, x, at_end ? cfg.epsilon : eps);
        break;
      default:
        rho = richardson_rho(sys, x, at_end ? cfg.epsilon : eps);
        break;
    }
    out.values[i] = rho;
  }
  return out;
}

// ---------------------------------------------------------------------------
// N-transform bridge

std::pair<double, double> n_transform_bridge(const WeightVector& weights, double z,
                                             const SolverConfig& cfg) {
  if (!(z > -1.0 && z < 0.0)) throw DomainError("z must lie in (-1, 0)");
  const WeightVector canon = canonicalize(weights);
  const SvSystem sys(canon);

  // Left side: x < 0 with x G(x) - 1 = z.
  auto f_left = [&](double x) {
    const double heights[] = {0.0};
    return (x * track(sys, x, heights).front().G).real() - 1.0 - z;
  };
  // Close to a branch point at x = 0 the tracking can fail; step away from it.
  double hi = -1e-9 * sys.scale, lo = -sys.scale;
  double f_hi = 1.0;
  for (int k = 0;; ++k) {
    try {
      f_hi = f_left(hi);
      break;
    } catch (const BranchTrackingFailure&) {
      if (k >= 6) throw;
      hi *= 10.0;
    }
  }
  if (f_hi > 0.0) throw DomainError("inversion of the singular-value M-transform failed");
  int guard = 0;
  while (f_left(lo) <= 0.0) {
    lo *= 4.0;
    if (++guard > 60) throw DomainError("inversion of the singular-value M-transform failed");
  }
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::abs(a); };
  const auto xb = boost::math::tools::toms748_solve(f_left, lo, hi, tol, iters);
  const double left = 0.5 * (xb.first + xb.second);

  // Right side: R^2 with M(R) = z on the eigenvalue support.
  const EigDensityModel model(canon, cfg);
  const auto& sup = model.support();
  auto f_right = [&](double R) { return model.M(R) - z; };
  const double a = sup.r_int + 1e-12 * sup.r_ext, b = sup.r_ext * (1.0 - 1e-12);
  if (f_right(a) * f_right(b) > 0.0) throw DomainError("z outside the range of the eigenvalue M-transform");
  iters = 200;
  const auto rb = boost::math::tools::toms748_solve(f_right, a, b, tol, iters);
  const double R = 0.5 * (rb.first + rb.second);
  const double right = (z + 1.0) / z * R * R;
  return {left, right};
}

}  // namespace cuesum
