#include "cuesum/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "cuesum/errors.hpp"

namespace cuesum {

// ---------------------------------------------------------------------------
// Unitary ensembles

UnitaryEnsembleSpec UnitaryEnsembleSpec::cue(int n_max) {
  UnitaryEnsembleSpec e;
  e.kind = EnsembleKind::cue;
  e.n_max = n_max;
  e.moments.assign(static_cast<std::size_t>(n_max), complex(0.0));
  return e;
}

UnitaryEnsembleSpec UnitaryEnsembleSpec::phase_density(complex m2, complex m3, int n_max) {
  if (n_max < 3) throw InvalidEnsemble("phase-density family needs n_max >= 3");
  UnitaryEnsembleSpec e;
  e.kind = EnsembleKind::phase_density;
  e.n_max = n_max;
  e.moments.assign(static_cast<std::size_t>(n_max), complex(0.0));
  e.moments[1] = m2;
  e.moments[2] = m3;
  e.validate();
  return e;
}

UnitaryEnsembleSpec UnitaryEnsembleSpec::phase_atoms(std::vector<double> phases,
                                                     std::vector<double> probs, int n_max) {
  UnitaryEnsembleSpec e;
  e.kind = EnsembleKind::phase_atoms;
  e.n_max = n_max;
  e.atom_phases = std::move(phases);
  e.atom_probs = std::move(probs);
  if (e.atom_phases.size() != e.atom_probs.size() || e.atom_phases.empty())
    throw InvalidEnsemble("atom phases and probabilities must have equal, nonzero length");
  for (int n = 1; n <= n_max; ++n) {
    complex m = 0.0;
    for (std::size_t k = 0; k < e.atom_phases.size(); ++k)
      m += e.atom_probs[k] * std::polar(1.0, n * e.atom_phases[k]);
    e.moments.push_back(m);
  }
  e.validate();
  return e;
}

complex UnitaryEnsembleSpec::moment(int n) const {
  if (n == 0) return 1.0;
  if (n < 0) return std::conj(moment(-n));
  if (kind == EnsembleKind::phase_atoms) {
    complex m = 0.0;
    for (std::size_t k = 0; k < atom_phases.size(); ++k)
      m += atom_probs[k] * std::polar(1.0, n * atom_phases[k]);
    return m;
  }
  if (n > static_cast<int>(moments.size())) return 0.0;
  return moments[static_cast<std::size_t>(n - 1)];
}

complex UnitaryEnsembleSpec::m_transform(complex u) const {
  if (kind == EnsembleKind::phase_atoms) {
    complex total = 0.0;
    for (std::size_t k = 0; k < atom_phases.size(); ++k) {
      const complex e = std::polar(1.0, atom_phases[k]);
      total += atom_probs[k] * e / (u - e);
    }
    return total;
  }
  complex total = 0.0;
  complex inv_pow = 1.0;
  for (std::size_t n = 0; n < moments.size(); ++n) {
    inv_pow /= u;
    total += moments[n] * inv_pow;
  }
  return total;
}

double UnitaryEnsembleSpec::phase_pdf(double theta) const {
  if (kind == EnsembleKind::cue) return 0.5 / std::numbers::pi;
  if (kind != EnsembleKind::phase_density)
    throw InvalidEnsemble("atomic ensembles have no phase density");
  double s = 1.0;
  for (std::size_t n = 0; n < moments.size(); ++n) {
    const double k = static_cast<double>(n + 1);
    s += 2.0 * (moments[n] * std::polar(1.0, -k * theta)).real();
  }
  return s * 0.5 / std::numbers::pi;
}

void UnitaryEnsembleSpec::validate() const {
  if (n_max < 1) throw InvalidEnsemble("n_max must be positive");
  for (const auto& m : moments)
    if (std::abs(m) > 1.0 + 1e-12) throw InvalidEnsemble("moment with modulus above one");
  if (kind == EnsembleKind::phase_atoms) {
    double total = 0.0;
    for (double p : atom_probs) {
      if (!(p >= 0.0)) throw InvalidEnsemble("negative atom probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidEnsemble("atom probabilities must sum to one");
  }
  if (kind == EnsembleKind::phase_density) {
    constexpr int grid = 4096;
    for (int i = 0; i < grid; ++i) {
      const double theta = 2.0 * std::numbers::pi * i / grid;
      if (phase_pdf(theta) < -1e-12)
        throw InvalidEnsemble("phase density is negative at theta = " + std::to_string(theta));
    }
  }
}

// ---------------------------------------------------------------------------
// Quaternion Green and Blue functions

HermitizationAux hermitization_aux(const QuaternionPoint& cd, complex w) {
  const double ac = std::abs(cd.first), ad2 = std::norm(cd.second), aw = std::abs(w);
  HermitizationAux aux;
  aux.g = std::sqrt(((ac - aw) * (ac - aw) + ad2) * ((ac + aw) * (ac + aw) + ad2));
  aux.u = (aw * aw + ac * ac + ad2 + aux.g) / (2.0 * w * std::conj(cd.first));
  return aux;
}

QuaternionPoint unitary_quaternion_green(const QuaternionPoint& cd, complex w,
                                         const UnitaryEnsembleSpec& ensemble) {
  const complex c = cd.first, d = cd.second;
  if (std::abs(c) == 0.0) throw DomainError("quaternion Green function is singular at c = 0");
  if (std::abs(w) == 0.0) throw DomainError("weight must be nonzero");
  const auto aux = hermitization_aux(cd, w);
  if (aux.g == 0.0 || !(std::abs(aux.u) > 1.0))
    throw DomainError("auxiliary point u lies on the unit circle; no exterior branch");
  const double k = (-std::norm(w) + std::norm(c) - std::norm(d)) / aux.g;
  const complex mu = ensemble.is_cue() ? complex(0.0) : ensemble.m_transform(aux.u);
  const complex a = (k + 1.0) * (1.0 + mu) / (2.0 * c) + (k - 1.0) * std::conj(mu) / (2.0 * c);
  const complex b = -d / aux.g * (1.0 + mu + std::conj(mu));
  return {a, b};
}

QuaternionPoint cue_blue(const QuaternionPoint& ab, complex w, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("Blue function sign must be +1 or -1");
  const complex a = ab.first, b = ab.second;
  const double nb = std::norm(b);
  const double n = std::norm(a) + nb;
  if (n == 0.0) throw DomainError("quaternion Blue function is singular at (a, b) = (0, 0)");
  const complex c = std::conj(a) / n;
  if (nb == 0.0) {
    if (sign == 1) throw DomainError("b = 0 has a finite Blue function only for sign -1");
    return {c, 0.0};
  }
  const double w2 = std::norm(w);
  const complex root = std::sqrt(complex(1.0 - 4.0 * w2 * nb, 0.0));
  // For sign -1 use (1 - root) / (2|b|^2) = 2|w|^2 / (1 + root) to avoid cancellation.
  const complex t = sign == 1 ? (1.0 + root) / (2.0 * nb) : 2.0 * w2 / (1.0 + root);
  return {c, -b * (1.0 / n - t)};
}

// ---------------------------------------------------------------------------
// Eigenvalue master equation

namespace {

struct SignConfig {
  std::vector<int> minus;  // number of minus signs in each weight group
  int total_minus = 0;
};

std::vector<SignConfig> enumerate_configs(const std::vector<WeightGroup>& groups) {
  std::vector<SignConfig> out;
  SignConfig cur;
  cur.minus.assign(groups.size(), 0);
  while (true) {
    cur.total_minus = 0;
    for (int k : cur.minus) cur.total_minus += k;
    out.push_back(cur);
    std::size_t g = 0;
    while (g < groups.size() && cur.minus[g] == groups[g].multiplicity) {
      cur.minus[g] = 0;
      ++g;
    }
    if (g == groups.size()) break;
    ++cur.minus[g];
  }
  return out;
}

SignVector expand_signs(const std::vector<WeightGroup>& groups, const SignConfig& cfg) {
  SignVector s;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i = 0; i < groups[g].multiplicity; ++i) s.push_back(i < cfg.minus[g] ? -1 : 1);
  return s;
}

SignConfig compress_signs(const std::vector<WeightGroup>& groups, const SignVector& signs) {
  SignConfig cfg;
  std::size_t pos = 0;
  for (const auto& g : groups) {
    int k = 0;
    for (int i = 0; i < g.multiplicity; ++i)
      if (signs.at(pos++) < 0) ++k;
    cfg.minus.push_back(k);
    cfg.total_minus += k;
  }
  return cfg;
}

// The master equation is solved in y = 4 M (M + 1) / R^2 = -4 C. On the
// branch M = (-1 + sigma sqrt(1 + R^2 y)) / 2 it reads
//   F(y) = L - 1 + sigma sqrt(1 + R^2 y) - sum_l s_l sqrt(1 + |w_l|^2 y),
// which stays well conditioned as R -> 0. With sqrt(1 + a y) = 1 + a y / (1 + sqrt(1 + a y)),
// F(y) = 2k - (1 - sigma) + y H(y); the holomorphic root y = 0 is divided out
// when 2k = 1 - sigma.
struct Branch {
  const std::vector<WeightGroup>* groups;
  const SignConfig* sc;
  double R2;
  int sigma;

  double base() const { return 2.0 * sc->total_minus - (1.0 - sigma); }

  double H(double y) const {
    double acc = sigma * R2 / (1.0 + std::sqrt(std::max(0.0, 1.0 + R2 * y)));
    for (std::size_t g = 0; g < groups->size(); ++g) {
      const int coef = (*groups)[g].multiplicity - 2 * sc->minus[g];
      if (coef == 0) continue;
      const double a = (*groups)[g].modulus * (*groups)[g].modulus;
      acc -= coef * a / (1.0 + std::sqrt(std::max(0.0, 1.0 + a * y)));
    }
    return acc;
  }

  double deflated(double y) const {
    const double b = base();
    return b == 0.0 ? H(y) : b + y * H(y);
  }

  double full(double y) const { return base() + y * H(y); }

  // M and M + 1 without cancellation.
  double M(double y) const {
    const double root = std::sqrt(std::max(0.0, 1.0 + R2 * y));
    const double small = R2 * y / (2.0 * (1.0 + root));
    return sigma > 0 ? small : -1.0 - small;
  }
};

double y_lower_bound(double wmax, double R2) {
  return std::max(-1.0 / R2, -1.0 / (wmax * wmax));
}

std::vector<double> scan_points(double a, double b, int n) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(n) + 40);
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    pts.push_back(a + (b - a) * 0.5 * (1.0 - std::cos(std::numbers::pi * t)));
  }
  for (int k = 3; k <= 15; ++k) {
    const double h = (b - a) * std::pow(10.0, -k);
    pts.push_back(a + h);
    pts.push_back(b - h);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double r_ext_of(const std::vector<WeightGroup>& groups) {
  double s = 0.0;
  for (const auto& g : groups) s += g.multiplicity * g.modulus * g.modulus;
  return std::sqrt(s);
}

}  // namespace

double master_residual(const WeightVector& weights, double R, double M, const SignVector& signs) {
  const auto w = canonicalize(weights).moduli();
  if (signs.size() != w.size()) throw DomainError("sign vector length differs from L");
  double rhs = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    const double arg = 1.0 + 4.0 * w[l] * w[l] * M * (M + 1.0) / (R * R);
    rhs += signs[l] * std::sqrt(std::max(0.0, arg));
  }
  return static_cast<double>(w.size()) + 2.0 * M - rhs;
}

std::vector<MasterSolution> master_equation_roots(const WeightVector& weights, double R,
                                                  const SolverConfig& cfg) {
  cfg.validate();
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("radius must be positive and finite");
  const WeightVector canon = canonicalize(weights);
  const auto groups = canon.compressed();
  const double R2 = R * R;
  const double y_min = y_lower_bound(groups.front().modulus, R2);
  const auto pts = scan_points(y_min, 0.0, cfg.grid_points);
  const double tol = cfg.root_tol * std::max(1.0, -y_min);

  std::vector<MasterSolution> found;
  for (const auto& sc : enumerate_configs(groups)) {
    for (int sigma : {1, -1}) {
      const Branch br{&groups, &sc, R2, sigma};
      auto h = [&](double y) { return br.deflated(y); };
      double prev_x = pts.front(), prev_h = h(prev_x);
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const double x = pts[i], hx = h(x);
        double root = std::numeric_limits<double>::quiet_NaN();
        double lo_edge = x, hi_edge = x;
        if (hx == 0.0) {
          root = x;
        } else if ((prev_h < 0.0) != (hx < 0.0) && prev_h != 0.0) {
          std::uintmax_t iters = static_cast<std::uintmax_t>(cfg.max_iter);
          auto bracket = boost::math::tools::toms748_solve(
              h, prev_x, x, prev_h, hx,
              [tol](double lo, double hi) {
                return std::abs(hi - lo) <= std::max(tol, 4e-16 * std::abs(lo));
              },
              iters);
          lo_edge = bracket.first;
          hi_edge = bracket.second;
          root = 0.5 * (bracket.first + bracket.second);
        }
        prev_x = x;
        prev_h = hx;
        if (std::isnan(root) || !(root < 0.0) || root < y_min) continue;
        const bool small = std::abs(br.full(root)) <= 1e-8 * static_cast<double>(canon.size());
        const bool brackets = br.full(lo_edge) * br.full(hi_edge) <= 0.0;
        if (!small && !brackets) continue;
        const double M = br.M(root);
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& s) {
          return std::abs(s.point.M - M) <= 1e-12 &&
                 std::abs(s.point.C + 0.25 * root) <= 1e-9 * std::max(1.0, -0.25 * root);
        });
        if (duplicate) continue;
        found.push_back({SpectralPoint{R, M, -0.25 * root}, expand_signs(groups, sc), true});
      }
    }
  }
  return found;
}

MasterSolution solve_addition_detailed(complex z, const WeightVector& weights,
                                       const SolverConfig& cfg, std::optional<double> hint) {
  const double R = std::abs(z);
  if (!std::isfinite(R)) throw DomainError("z must be finite");
  const WeightVector canon = canonicalize(weights);
  const auto groups = canon.compressed();
  const double r_ext = r_ext_of(groups);

  if (R == 0.0) {
    // Radial limit: M -> -1 while C tends to a finite value on a disk.
    auto near = solve_addition_detailed(complex(1e-7 * r_ext), canon, cfg);
    near.point = {0.0, -1.0, near.interior ? near.point.C : 0.0};
    return near;
  }

  auto roots = master_equation_roots(canon, R, cfg);
  if (roots.empty()) {
    if (R >= r_ext * (1.0 - 1e-12)) return {SpectralPoint::exterior(R, 0.0), {}, false};
    return {SpectralPoint::exterior(R, -1.0), {}, false};
  }
  if (roots.size() == 1) return roots.front();
  if (hint) {
    return *std::min_element(roots.begin(), roots.end(), [&](const auto& x, const auto& y) {
      return std::abs(x.point.M - *hint) < std::abs(y.point.M - *hint);
    });
  }
  auto minus_count = [](const MasterSolution& s) {
    return std::count(s.signs.begin(), s.signs.end(), -1);
  };
  return *std::min_element(roots.begin(), roots.end(), [&](const auto& x, const auto& y) {
    const auto mx = minus_count(x), my = minus_count(y);
    return mx != my ? mx < my : x.point.M > y.point.M;
  });
}

SpectralPoint solve_addition(complex z, const WeightVector& weights, const SolverConfig& cfg,
                             std::optional<double> hint) {
  return solve_addition_detailed(z, weights, cfg, hint).point;
}

std::optional<SignVector> matching_signs(const WeightVector& weights, double R, double M,
                                         double tol) {
  const WeightVector canon = canonicalize(weights);
  const auto groups = canon.compressed();
  std::optional<SignVector> best;
  double best_res = tol;
  for (const auto& sc : enumerate_configs(groups)) {
    auto signs = expand_signs(groups, sc);
    const double res = std::abs(master_residual(canon, R, M, signs));
    // Near M = 0 or M = -1 at small R the equation is steep; accept a sign
    // change within a relative neighbourhood as well.
    const double eta = std::max(1e-14, 1e-9 * std::min(std::abs(M), std::abs(M + 1.0)));
    const bool brackets = master_residual(canon, R, M - eta, signs) *
                              master_residual(canon, R, M + eta, signs) <= 0.0;
    if (brackets && res > best_res && !best) {
      best = std::move(signs);
      continue;
    }
    if (res <= best_res) {
      best_res = res;
      best = std::move(signs);
    }
  }
  return best;
}

std::optional<double> continue_master_root(const WeightVector& weights, double R, double guess,
                                           const SignVector& signs, const SolverConfig& cfg) {
  const WeightVector canon = canonicalize(weights);
  const auto groups = canon.compressed();
  const SignConfig sc = compress_signs(groups, signs);
  const double R2 = R * R;
  const Branch br{&groups, &sc, R2, guess > -0.5 ? 1 : -1};
  const double y_min = y_lower_bound(groups.front().modulus, R2);
  auto h = [&](double y) { return br.deflated(y); };
  double y = 4.0 * guess * (guess + 1.0) / R2;
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (y < y_min) return std::nullopt;
    const double step = 1e-7 * std::max(1.0, std::abs(y));
    const double dh = (h(y + step) - h(y - step)) / (2.0 * step);
    if (dh == 0.0 || !std::isfinite(dh)) return std::nullopt;
    double delta = h(y) / dh;
    // Damp steps that would leave the real-square-root region.
    int guard = 0;
    while (y - delta < y_min && guard++ < 30) delta *= 0.5;
    y -= delta;
    if (std::abs(delta) <= cfg.root_tol * std::max(1.0, std::abs(y))) {
      if (std::abs(h(y)) > 1e-8) return std::nullopt;
      return br.M(y);
    }
  }
  return std::nullopt;
}

double addition_law_residual(complex z, const MasterSolution& solution,
                             const WeightVector& weights) {
  const WeightVector canon = canonicalize(weights);
  const double L = static_cast<double>(canon.size());
  const double M = solution.point.M, C = solution.point.C;
  const complex a = (M + 1.0) / z;
  const complex b = std::sqrt(std::max(C, 0.0));
  const double n = std::norm(a) + std::norm(b);
  complex sum_c = 0.0, sum_d = 0.0;
  for (std::size_t l = 0; l < canon.size(); ++l) {
    const int s = solution.signs.empty() ? 1 : solution.signs[l];
    // The master-equation sign is the opposite of the Blue-function sign.
    const auto cd = cue_blue({a, b}, canon[l], -s);
    sum_c += cd.first;
    sum_d += cd.second;
  }
  const complex r1 = sum_c - (L - 1.0) * std::conj(a) / n - z;
  const complex r2 = sum_d + (L - 1.0) * b / n;
  return std::abs(r1) + std::abs(r2);
}

}  // namespace cuesum
