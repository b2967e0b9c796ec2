#include "cuesum/eig_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cuesum/errors.hpp"
#include "cuesum/polynomial.hpp"
#include "cuesum/symmetric.hpp"

namespace cuesum {

std::string to_string(DensityMethod method) {
  switch (method) {
    case DensityMethod::automatic: return "automatic";
    case DensityMethod::closed_form: return "closed-form";
    case DensityMethod::polynomial: return "polynomial";
    case DensityMethod::quaternion_numeric: return "quaternion-numeric";
    case DensityMethod::homotopy: return "homotopy";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Closed forms

double M_two_weights(double w1, double w2, double R) {
  const double R2 = R * R;
  const double p = (w1 + w2) * (w1 + w2), m = (w1 - w2) * (w1 - w2);
  return R2 / (p - R2) + R2 / (m - R2);
}

double rho_two_weights(double w1, double w2, double R) {
  const double R2 = R * R;
  const double p = (w1 + w2) * (w1 + w2), m = (w1 - w2) * (w1 - w2);
  return 2.0 * R * (p / ((R2 - p) * (R2 - p)) + m / ((R2 - m) * (R2 - m)));
}

double M_equal_weights(int L, double w, double R) {
  const double re2 = L * w * w, R2 = R * R;
  return -(re2 - R2) / (re2 - R2 / L);
}

double C_equal_weights(int L, double w, double R) {
  const double re2 = L * w * w, R2 = R * R;
  const double den = re2 - R2 / L;
  return (1.0 - 1.0 / L) * (re2 - R2) / (den * den);
}

double rho_equal_weights(int L, double w, double R) {
  const double re2 = L * w * w, R2 = R * R;
  const double den = re2 - R2 / L;
  return 2.0 * R * re2 * (1.0 - 1.0 / L) / (den * den);
}

// ---------------------------------------------------------------------------
// Polynomial forms

std::array<double, 5> polynomial_M_L3(const WeightVector& weights, double R) {
  if (weights.size() != 3) throw DomainError("the quartic form needs exactly three weights");
  const auto f = SymmetricWeightFunctionals::of(weights);
  const double R2 = R * R, R4 = R2 * R2, R6 = R4 * R2, R8 = R4 * R4;
  const auto& v = f.v;
  const double v0 = v[0] * v[0], v1 = v[1] * v[1], v2 = v[2] * v[2], v3 = v[3] * v[3];
  std::array<double, 5> c{};
  c[0] = (R2 - v0) * (R2 - v1) * (R2 - v2) * (R2 - v3);
  c[1] = 9.0 * R8 - 28.0 * f.mu1 * R6 + 10.0 * (3.0 * f.mu2 + 2.0 * f.mu11) * R4 +
         12.0 * (-f.mu3 + f.mu21 - 10.0 * f.mu111) * R2 + v0 * v1 * v2 * v3;
  c[2] = 2.0 * R2 *
         (15.0 * R6 - 35.0 * f.mu1 * R4 + (25.0 * f.mu2 + 14.0 * f.mu11) * R2 - 5.0 * f.mu3 +
          5.0 * f.mu21 - 42.0 * f.mu111);
  c[3] = 4.0 * R4 * (11.0 * R4 - 18.0 * f.mu1 * R2 + 7.0 * f.mu2 + 2.0 * f.mu11);
  c[4] = 24.0 * R6 * (R2 - f.mu1);
  return c;
}

std::array<double, 4> polynomial_M_L1L2(int l1, double w1, int l2, double w2, double R) {
  if (l1 < 1 || l2 < 1) throw DomainError("both blocks need at least one weight");
  const double L = l1 + l2;
  const double A = l1 * std::abs(w1), B = l2 * std::abs(w2);
  const double A2 = A * A, B2 = B * B, R2 = R * R, R4 = R2 * R2;
  const double diff2 = (A2 - B2) * (A2 - B2);
  std::array<double, 4> c{};
  c[0] = (R - A - B) * (R + A - B) * (R - A + B) * (R + A + B);
  c[1] = 2.0 * (L * R4 - (L + 1.0) * (A2 + B2) * R2 + diff2);
  c[2] = (L * L + l1 * l2) * R4 - L * ((2.0 + l2) * A2 + (2.0 + l1) * B2) * R2 + diff2;
  c[3] = L * l1 * l2 * (R2 - l1 * w1 * w1 - l2 * w2 * w2) * R2;
  return c;
}

// ---------------------------------------------------------------------------
// Support

SupportAnnulus support_formula(const WeightVector& weights) {
  const double r_ext = std::sqrt(weights.sum_moduli_squared());
  double inner = 0.0;
  for (std::size_t l = 1; l <= weights.size(); ++l)
    inner = std::max(inner, -V_functional(weights, l));
  return {std::sqrt(inner), r_ext};
}

namespace {

bool has_interior_root(const WeightVector& w, double R, const SolverConfig& cfg) {
  return !master_equation_roots(w, R, cfg).empty();
}

double bisect_edge(const WeightVector& w, double out, double in, const SolverConfig& cfg) {
  for (int it = 0; it < 200 && std::abs(in - out) > 1e-11 * std::max(1.0, in); ++it) {
    const double mid = 0.5 * (in + out);
    if (has_interior_root(w, mid, cfg))
      in = mid;
    else
      out = mid;
  }
  return 0.5 * (in + out);
}

}  // namespace

SupportAnnulus numeric_support(const WeightVector& weights, const SolverConfig& cfg) {
  const WeightVector canon = canonicalize(weights);
  const double scale = std::sqrt(canon.sum_moduli_squared());
  // Uniform scan plus points accumulating at scale, where thin annuli sit.
  constexpr int coarse = 256;
  std::vector<double> radii;
  for (int i = 1; i <= coarse; ++i) radii.push_back(scale * i / coarse);
  for (int k = 9; k <= 40; ++k) radii.push_back(scale * (1.0 - std::ldexp(1.0, -k)));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  std::ptrdiff_t first = -1, last = -1;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (has_interior_root(canon, radii[i], cfg)) {
      if (first < 0) first = static_cast<std::ptrdiff_t>(i);
      last = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (first < 0) throw NoAdmissibleBranch("no interior root of the master equation found");

  double outer;
  const double probe = scale * 1.5;
  if (last + 1 == static_cast<std::ptrdiff_t>(radii.size())) {
    if (has_interior_root(canon, probe, cfg))
      throw NoAdmissibleBranch("interior roots persist beyond the outer radius");
    outer = bisect_edge(canon, probe, radii.back(), cfg);
  } else {
    outer = bisect_edge(canon, radii[last + 1], radii[last], cfg);
  }

  double inner = 0.0;
  const double tiny = 1e-7 * scale;
  if (first == 0) {
    if (!has_interior_root(canon, tiny, cfg)) {
      // At a true inner edge C vanishes; roots that are merely lost near the
      // boundary of the y domain leave C finite.
      const double edge = bisect_edge(canon, tiny, radii[0], cfg);
      auto max_C = [&](double R) {
        double c = 0.0;
        for (const auto& s : master_equation_roots(canon, R, cfg)) c = std::max(c, s.point.C);
        return c;
      };
      const double c_edge = max_C(edge + 1e-8 * scale);
      if (c_edge <= 1e-3 * max_C(radii[0])) inner = edge;
    }
  } else {
    inner = bisect_edge(canon, radii[first - 1], radii[first], cfg);
  }
  return {inner, outer};
}

SupportAnnulus support(const WeightVector& weights, const SolverConfig& cfg) {
  const auto formula = support_formula(weights);
  const auto numeric = numeric_support(weights, cfg);
  constexpr double tol = 1e-6;
  if (std::abs(formula.r_int - numeric.r_int) > tol)
    throw HypothesisViolation(formula.r_int, numeric.r_int);
  if (std::abs(formula.r_ext - numeric.r_ext) > tol)
    throw HypothesisViolation(formula.r_ext, numeric.r_ext);
  return formula;
}

// ---------------------------------------------------------------------------
// Density model

EigDensityModel::EigDensityModel(const WeightVector& weights, const SolverConfig& cfg,
                                 DensityMethod method)
    : weights_(canonicalize(weights)), cfg_(cfg), method_(method) {
  cfg_.validate();
  groups_ = weights_.compressed();
  equal_ = groups_.size() == 1;
  const bool closed_available = equal_ || weights_.size() == 2;
  const bool poly_available = groups_.size() == 2 || weights_.size() == 3;
  if (method_ == DensityMethod::automatic) {
    method_ = closed_available ? DensityMethod::closed_form
              : poly_available ? DensityMethod::polynomial
                               : DensityMethod::quaternion_numeric;
  }
  if (method_ == DensityMethod::closed_form && !closed_available)
    throw InvalidConfig("no closed form for these weights");
  if (method_ == DensityMethod::polynomial && !poly_available)
    throw InvalidConfig("no polynomial form for these weights");
  if (method_ == DensityMethod::homotopy)
    throw InvalidConfig("homotopy applies to singular values only");
  support_ = method_ == DensityMethod::closed_form ? support_formula(weights_)
                                                    : cuesum::support(weights_, cfg_);
}

double EigDensityModel::interior_M(double R, std::optional<double> hint) const {
  switch (method_) {
    case DensityMethod::closed_form:
      if (equal_) return M_equal_weights(static_cast<int>(weights_.size()), groups_[0].modulus, R);
      return M_two_weights(groups_[0].modulus, groups_[1].modulus, R);
    case DensityMethod::polynomial: {
      // Near the origin the roots close to M = -1 merge below double resolution.
      if (R < 1e-4 * support_.r_ext) return solve_addition(complex(R), weights_, cfg_, hint).M;
      std::vector<double> coeffs;
      if (groups_.size() == 2) {
        const auto c = polynomial_M_L1L2(groups_[0].multiplicity, groups_[0].modulus,
                                         groups_[1].multiplicity, groups_[1].modulus, R);
        coeffs.assign(c.begin(), c.end());
      } else {
        const auto c = polynomial_M_L3(weights_, R);
        coeffs.assign(c.begin(), c.end());
      }
      double best = std::numeric_limits<double>::quiet_NaN();
      long best_minus = 0;
      for (double m : real_roots_in(coeffs, -1.0, 0.0)) {
        if (!(m > -1.0 && m < 0.0)) continue;
        const auto signs = matching_signs(weights_, R, m, 1e-7);
        if (!signs) continue;
        const long minus = std::count(signs->begin(), signs->end(), -1);
        bool better;
        if (std::isnan(best))
          better = true;
        else if (hint)
          better = std::abs(m - *hint) < std::abs(best - *hint);
        else
          better = minus < best_minus || (minus == best_minus && m > best);
        if (better) {
          best = m;
          best_minus = minus;
        }
      }
      // Roots merging at M = -1 can spoil the polynomial route at small R.
      if (std::isnan(best)) return solve_addition(complex(R), weights_, cfg_, hint).M;
      return best;
    }
    default:
      return solve_addition(complex(R), weights_, cfg_, hint).M;
  }
}

double EigDensityModel::M(double R, std::optional<double> hint) const {
  if (R >= support_.r_ext) return 0.0;
  if (R <= support_.r_int) return support_.r_int > 0.0 ? -1.0 : interior_M(R, hint);
  return interior_M(R, hint);
}

double EigDensityModel::derivative(double R) const {
  if (method_ == DensityMethod::closed_form) {
    if (equal_) return rho_equal_weights(static_cast<int>(weights_.size()), groups_[0].modulus, R);
    return rho_two_weights(groups_[0].modulus, groups_[1].modulus, R);
  }
  const double h = std::max(cfg_.diff_step, support_.width() / cfg_.grid_points / 10.0);
  const double m0 = M(R);
  if (R - h > support_.r_int && R + h < support_.r_ext)
    return (interior_M(R + h, m0) - interior_M(R - h, m0)) / (2.0 * h);
  // One-sided second-order differences pointing into the support.
  const double dir = (R - h <= support_.r_int) ? 1.0 : -1.0;
  const double m1 = interior_M(R + dir * h, m0);
  const double m2 = interior_M(R + 2.0 * dir * h, m1);
  return dir * (-3.0 * m0 + 4.0 * m1 - m2) / (2.0 * h);
}

double EigDensityModel::density(double R) const {
  if (R < support_.r_int || R > support_.r_ext) return 0.0;
  if (R == 0.0) return 0.0;
  const double v = derivative(R);
  return (v < 0.0 && v >= -1e-8) ? 0.0 : v;
}

double EigDensityModel::continued_M(double R) const {
  const bool outer = R > support_.r_ext;
  const double edge = outer ? support_.r_ext : support_.r_int;
  const double inward = outer ? -1.0 : 1.0;
  const double step = support_.width() / 400.0;
  double R0 = edge + inward * 1e-3 * support_.width();
  const auto start = solve_addition_detailed(complex(R0), weights_, cfg_);
  if (!start.interior) return std::numeric_limits<double>::quiet_NaN();
  const SignVector& signs = start.signs;

  double prev_R = R0, prev_M = start.point.M;
  double slope = derivative(R0);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(R - R0) / step)));
  for (int i = 1; i <= steps; ++i) {
    const double Ri = R0 + (R - R0) * i / steps;
    const double guess = prev_M + slope * (Ri - prev_R);
    const auto next = continue_master_root(weights_, Ri, guess, signs, cfg_);
    if (!next) return std::numeric_limits<double>::quiet_NaN();
    slope = (*next - prev_M) / (Ri - prev_R);
    prev_R = Ri;
    prev_M = *next;
  }
  return prev_M;
}

double EigDensityModel::continued_density(double R) const {
  if (R >= support_.r_int && R <= support_.r_ext) return density(R);
  if (R < 0.0) return 0.0;
  if (method_ == DensityMethod::closed_form) return std::max(0.0, derivative(R));
  const double h = std::max(cfg_.diff_step, support_.width() / cfg_.grid_points / 10.0);
  const double hi = continued_M(R + h), lo = continued_M(R - h);
  return (hi - lo) / (2.0 * h);
}

double EigDensityModel::bin_average(double a, double b) const {
  if (!(b > a)) throw DomainError("bin must have positive width");
  const double lo = std::max(a, support_.r_int), hi = std::min(b, support_.r_ext);
  if (!(hi > lo)) return 0.0;
  auto f = [this](double R) { return density(R); };
  const double mass = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0);
  return mass / (b - a);
}

// ---------------------------------------------------------------------------
// Sampled curves

double RadialDensity::integral() const {
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    total += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  return total;
}

RadialDensity radial_density(const WeightVector& weights, const SolverConfig& cfg,
                             DensityMethod method) {
  const EigDensityModel model(weights, cfg, method);
  const auto& sup = model.support();
  const int n = std::max(cfg.grid_points, 5);
  RadialDensity out;
  out.support = sup;
  out.method = model.method();
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    out.grid.push_back(sup.r_int + sup.width() * 0.5 * (1.0 - std::cos(std::numbers::pi * t)));
  }
  out.values.assign(n, 0.0);
  out.edge.assign(n, false);
  for (int i = 1; i < n - 1; ++i) out.values[i] = model.density(out.grid[i]);
  auto extrapolate = [&](int at, int a, int b) {
    const double slope = (out.values[a] - out.values[b]) / (out.grid[a] - out.grid[b]);
    out.values[at] = std::max(0.0, out.values[a] + slope * (out.grid[at] - out.grid[a]));
    out.edge[at] = true;
  };
  extrapolate(0, 1, 2);
  extrapolate(n - 1, n - 2, n - 3);
  out.continued = out.values;
  return out;
}

RadialDensity radial_density_on(const EigDensityModel& model, std::span<const double> grid) {
  RadialDensity out;
  out.support = model.support();
  out.method = model.method();
  out.grid.assign(grid.begin(), grid.end());
  for (double R : grid) {
    out.values.push_back(model.density(R));
    out.continued.push_back(model.continued_density(R));
  }
  out.edge.assign(grid.size(), false);
  return out;
}

}  // namespace cuesum
