#include "cuesum/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include <cblas.h>
#include <lapacke.h>

#include "cuesum/eig_density.hpp"
#include "cuesum/errors.hpp"
#include "cuesum/sv_density.hpp"

namespace cuesum {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

lapack_complex_double* lp(complex* p) { return reinterpret_cast<lapack_complex_double*>(p); }

// C = A B^dagger (conj_b) or A B.
Eigen::MatrixXcd multiply(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, bool conj_b) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXcd c(n, b.rows());
  const complex one(1.0), zero(0.0);
  cblas_zgemm(CblasColMajor, CblasNoTrans, conj_b ? CblasConjTrans : CblasNoTrans, n,
              static_cast<int>(conj_b ? b.rows() : b.cols()), static_cast<int>(a.cols()), &one,
              a.data(), n, b.data(), static_cast<int>(b.rows()), &zero, c.data(), n);
  return c;
}

}  // namespace

Rng iteration_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt) {
  const std::uint64_t s = splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (attempt << 32));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(attempt)};
  return Rng(seq);
}

Eigen::MatrixXcd sample_haar_unitary(int n, Rng& rng) {
  if (n < 1) throw InvalidConfig("matrix dimension must be positive");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd q(n, n);
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const double re = gauss(rng);
    q.data()[k] = complex(re, gauss(rng));
  }
  std::vector<complex> tau(static_cast<std::size_t>(n));
  if (LAPACKE_zgeqrf(LAPACK_COL_MAJOR, n, n, lp(q.data()), n, lp(tau.data())) != 0)
    throw EigensolverFailure("QR factorization failed");
  std::vector<complex> phase(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const complex r = q(j, j);
    phase[j] = std::abs(r) > 0.0 ? r / std::abs(r) : complex(1.0);
  }
  if (LAPACKE_zungqr(LAPACK_COL_MAJOR, n, n, n, lp(q.data()), n, lp(tau.data())) != 0)
    throw EigensolverFailure("forming Q failed");
  for (int j = 0; j < n; ++j) q.col(j) *= phase[j];
  return q;
}

std::vector<double> sample_phases(int n, const UnitaryEnsembleSpec& ensemble, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (ensemble.kind) {
    case EnsembleKind::cue:
      for (auto& t : out) t = two_pi * unif(rng);
      break;
    case EnsembleKind::phase_atoms: {
      std::discrete_distribution<std::size_t> pick(ensemble.atom_probs.begin(),
                                                   ensemble.atom_probs.end());
      for (auto& t : out) t = ensemble.atom_phases[pick(rng)];
      break;
    }
    case EnsembleKind::phase_density: {
      double bound = 1.0;
      for (int k = 1; k <= ensemble.n_max; ++k) bound += 2.0 * std::abs(ensemble.moment(k));
      bound /= two_pi;
      for (auto& t : out) {
        while (true) {
          const double x = two_pi * unif(rng);
          if (unif(rng) * bound <= ensemble.phase_pdf(x)) {
            t = x;
            break;
          }
        }
      }
      break;
    }
  }
  return out;
}

Eigen::MatrixXcd sample_phase_unitary(int n, const UnitaryEnsembleSpec& ensemble, Rng& rng) {
  ensemble.validate();
  Eigen::MatrixXcd v = sample_haar_unitary(n, rng);
  const auto theta = sample_phases(n, ensemble, rng);
  Eigen::MatrixXcd vd = v;
  for (int j = 0; j < n; ++j) vd.col(j) *= std::polar(1.0, theta[j]);
  return multiply(vd, v, true);
}

void SimConfig::validate() const {
  if (n < 2) throw InvalidConfig("matrix dimension must be at least 2");
  if (iterations < 1) throw InvalidConfig("at least one iteration is required");
  if (bins < 2) throw InvalidConfig("at least two bins are required");
  if (threads < 0) throw InvalidConfig("thread count must be nonnegative");
  if (max_retries < 0) throw InvalidConfig("retry count must be nonnegative");
  if (range && !(range->second > range->first))
    throw InvalidConfig("histogram range must be nonempty");
  ensemble.validate();
}

std::vector<double> SimResult::moduli() const {
  std::vector<double> out;
  out.reserve(eigenvalues.size());
  for (const auto& z : eigenvalues) out.push_back(std::abs(z));
  return out;
}

std::vector<complex> general_eigenvalues(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXcd work = a;
  std::vector<complex> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, lp(work.data()), n,
                                        lp(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) throw EigensolverFailure("zgeev returned " + std::to_string(info));
  return w;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXcd work = a;
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, lp(work.data()), n, w.data());
  if (info != 0) throw EigensolverFailure("zheevd returned " + std::to_string(info));
  return w;
}

namespace {

struct IterationOutput {
  std::vector<complex> eig;
  std::vector<double> sv;
  complex moments[3];
  int retries = 0;
};

complex trace_power(const Eigen::MatrixXcd& u, int k) {
  const Eigen::Index n = u.rows();
  if (k == 1) return u.trace();
  if (k == 2) {
    complex t = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) t += u(i, j) * u(j, i);
    return t;
  }
  const Eigen::MatrixXcd u2 = multiply(u, u, false);
  complex t = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) t += u2(i, j) * u(j, i);
  return t;
}

IterationOutput run_iteration(const WeightVector& weights, const SimConfig& cfg,
                              std::uint64_t index, bool want_eig, bool want_sv) {
  IterationOutput out;
  for (int attempt = 0;; ++attempt) {
    try {
      Rng rng = iteration_rng(cfg.seed, index, static_cast<std::uint64_t>(attempt));
      Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(cfg.n, cfg.n);
      for (std::size_t l = 0; l < weights.size(); ++l) {
        const Eigen::MatrixXcd u = cfg.ensemble.is_cue()
                                       ? sample_haar_unitary(cfg.n, rng)
                                       : sample_phase_unitary(cfg.n, cfg.ensemble, rng);
        if (l == 0)
          for (int k = 0; k < 3; ++k) out.moments[k] = trace_power(u, k + 1) / double(cfg.n);
        s += weights[l] * u;
      }
      if (want_eig) out.eig = general_eigenvalues(s);
      if (want_sv) {
        Eigen::MatrixXcd h(cfg.n, cfg.n);
        cblas_zherk(CblasColMajor, CblasUpper, CblasConjTrans, cfg.n, cfg.n, 1.0, s.data(), cfg.n,
                    0.0, h.data(), cfg.n);
        out.sv = hermitian_eigenvalues(h);
        // Rounding can leave the smallest eigenvalues of S^dagger S slightly negative.
        for (auto& x : out.sv) x = std::max(x, 0.0);
      }
      out.retries = attempt;
      return out;
    } catch (const EigensolverFailure& e) {
      if (attempt >= cfg.max_retries)
        throw EigensolverFailure("iteration " + std::to_string(index) + " failed after " +
                                 std::to_string(attempt + 1) + " attempts: " + e.what());
    }
  }
}

std::vector<IterationOutput> run_all(const WeightVector& weights, const SimConfig& cfg,
                                     bool want_eig, bool want_sv) {
  cfg.validate();
  openblas_set_num_threads(1);
  std::vector<IterationOutput> results(static_cast<std::size_t>(cfg.iterations));
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, cfg.iterations);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= cfg.iterations) return;
      try {
        results[static_cast<std::size_t>(i)] =
            run_iteration(weights, cfg, static_cast<std::uint64_t>(i), want_eig, want_sv);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(cfg.iterations);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

SimResult collect(const WeightVector& weights, const SimConfig& cfg,
                  const std::vector<IterationOutput>& results, bool eig) {
  SimResult r;
  r.config = cfg;
  r.weights.assign(weights.values().begin(), weights.values().end());
  complex m[3] = {0.0, 0.0, 0.0};
  for (const auto& it : results) {
    if (eig)
      r.eigenvalues.insert(r.eigenvalues.end(), it.eig.begin(), it.eig.end());
    else
      r.singular_values.insert(r.singular_values.end(), it.sv.begin(), it.sv.end());
    for (int k = 0; k < 3; ++k) m[k] += it.moments[k];
    r.retries += it.retries;
  }
  const double count = static_cast<double>(results.size());
  r.moments_check = {m[0] / count, m[1] / count, m[2] / count, results.size()};

  std::vector<double> samples = eig ? r.moduli() : r.singular_values;
  std::pair<double, double> range;
  if (cfg.range) {
    range = *cfg.range;
  } else if (cfg.ensemble.is_cue()) {
    if (eig) {
      const auto sup = support_formula(weights);
      range = histogram_range(samples, sup.r_int, sup.r_ext);
    } else {
      const auto ends = sv_endpoints(weights).values;
      range = histogram_range(samples, ends.front(), ends.back());
    }
  } else {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    range = {*mn, *mx};
  }
  r.histogram = make_histogram(samples, range.first, range.second, cfg.bins);
  return r;
}

}  // namespace

SimResult simulate_sum(const WeightVector& weights, const SimConfig& cfg) {
  return collect(weights, cfg, run_all(weights, cfg, true, false), true);
}

SimResult simulate_sum_sv(const WeightVector& weights, const SimConfig& cfg) {
  return collect(weights, cfg, run_all(weights, cfg, false, true), false);
}

std::pair<SimResult, SimResult> simulate_sum_joint(const WeightVector& weights,
                                                   const SimConfig& cfg) {
  const auto results = run_all(weights, cfg, true, true);
  return {collect(weights, cfg, results, true), collect(weights, cfg, results, false)};
}

}  // namespace cuesum
