#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "common.hpp"
#include "cuesum/clt.hpp"
#include "cuesum/eig_density.hpp"
#include "cuesum/errors.hpp"
#include "cuesum/finite_size.hpp"
#include "cuesum/io.hpp"
#include "cuesum/monte_carlo.hpp"
#include "cuesum/sv_density.hpp"
#include "figures.hpp"

using namespace cuesum;
using cli::json;

namespace {

const std::map<std::string, DensityMethod> kEigMethods{{"auto", DensityMethod::automatic},
                                                       {"closed-form", DensityMethod::closed_form},
                                                       {"polynomial", DensityMethod::polynomial},
                                                       {"quaternion-numeric", DensityMethod::quaternion_numeric}};
const std::map<std::string, DensityMethod> kSvMethods{{"auto", DensityMethod::automatic},
                                                      {"closed-form", DensityMethod::closed_form},
                                                      {"polynomial", DensityMethod::polynomial},
                                                      {"homotopy", DensityMethod::homotopy}};

struct Options {
  cli::WeightOptions weights;
  std::string out;
  std::string format = "csv";
  std::string method = "auto";
  int grid = 400;
  double epsilon = 1e-6;
  double extend = 0.0;

  int n = 500;
  int iters = 1000;
  int bins = 100;
  std::uint64_t seed = 0;
  int threads = 0;
  bool samples = false;
  std::string m2 = "0", m3 = "0";
  int L = 50;
  std::vector<int> Ls;

  std::string sim_path, curve_path;
  int fit_n = 0;
  double tol = 1e-8;

  std::string figure, outdir = ".";
};

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.grid_points = o.grid;
  cfg.epsilon = o.epsilon;
  cfg.validate();
  return cfg;
}

SimConfig sim_config(const Options& o) {
  SimConfig c;
  c.n = o.n;
  c.iterations = o.iters;
  c.bins = o.bins;
  c.seed = o.seed;
  c.threads = o.threads;
  const complex m2 = parse_complex(o.m2), m3 = parse_complex(o.m3);
  if (m2 == 0.0 && std::abs(std::abs(m3) - 1.0) < 1e-12) {
    // Three equally likely phases: the only law with m1 = m2 = 0 and |m3| = 1.
    const double phi = std::arg(m3) / 3.0;
    c.ensemble = UnitaryEnsembleSpec::phase_atoms(
        {phi, phi + 2.0 * std::numbers::pi / 3.0, phi + 4.0 * std::numbers::pi / 3.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  } else if (m2 != 0.0 || m3 != 0.0) {
    c.ensemble = UnitaryEnsembleSpec::phase_density(m2, m3);
  }
  c.validate();
  return c;
}

std::string table_text(const CurveTable& t, const std::string& format) {
  std::ostringstream ss;
  if (format == "json") {
    json j = json::parse(t.metadata);
    for (std::size_t i = 0; i < t.names.size(); ++i) j["columns"][t.names[i]] = t.columns[i];
    ss << j.dump(1) << '\n';
  } else {
    write_csv(ss, t);
  }
  return ss.str();
}

// Adds the manifest reference to a table's metadata.
CurveTable with_manifest(CurveTable t, const std::string& out) {
  if (out.empty() || out == "-") return t;
  json j = json::parse(t.metadata);
  j["manifest"] = cli::Manifest::path_for(out);
  t.metadata = j.dump();
  return t;
}

void finish(cli::Manifest& m, const std::string& out, const std::vector<std::string>& extra = {}) {
  if (out.empty() || out == "-") return;
  m.add_output(out);
  for (const auto& e : extra) m.add_output(e);
  m.write(cli::Manifest::path_for(out));
}

int run_eig_density(const Options& o, cli::Manifest& m) {
  const auto w = o.weights.resolve();
  const auto cfg = solver_config(o);
  const EigDensityModel model(w, cfg, kEigMethods.at(o.method));
  auto curve = radial_density(w, cfg, model.method());
  if (o.extend > 0.0) {
    const auto& s = model.support();
    std::vector<double> grid;
    constexpr int kExtra = 50;
    if (s.r_int > 0.0)
      for (int i = 0; i < kExtra; ++i) grid.push_back(std::max(0.0, s.r_int - o.extend) + i * std::min(o.extend, s.r_int) / kExtra);
    grid.insert(grid.end(), curve.grid.begin(), curve.grid.end());
    for (int i = 1; i <= kExtra; ++i) grid.push_back(s.r_ext + o.extend * i / kExtra);
    curve = radial_density_on(model, grid);
  }
  m.config = {{"weights", o.weights.describe()}, {"method", to_string(model.method())}, {"grid", o.grid},
              {"extend", o.extend}};
  cli::emit(o.out, table_text(with_manifest(radial_density_table(curve), o.out), o.format));
  finish(m, o.out);
  return 0;
}

int run_sv_density(const Options& o, cli::Manifest& m) {
  const auto w = o.weights.resolve();
  const auto cfg = solver_config(o);
  const auto curve = sv_density(w, cfg, kSvMethods.at(o.method));
  m.config = {{"weights", o.weights.describe()}, {"method", to_string(curve.method)}, {"grid", o.grid},
              {"epsilon", o.epsilon}};
  cli::emit(o.out, table_text(with_manifest(sv_density_table(curve), o.out), o.format));
  finish(m, o.out);
  return 0;
}

int run_simulate(const Options& o, cli::Manifest& m, bool singular) {
  const auto w = o.weights.resolve();
  const auto cfg = sim_config(o);
  const auto result = singular ? simulate_sum_sv(w, cfg) : simulate_sum(w, cfg);
  m.seed = o.seed;
  m.config = {{"weights", o.weights.describe()}, {"n", o.n}, {"iterations", o.iters}, {"bins", o.bins},
              {"threads", o.threads}, {"m2", o.m2}, {"m3", o.m3}, {"samples", o.samples}};
  const std::string manifest = (o.out.empty() || o.out == "-") ? "" : cli::Manifest::path_for(o.out);
  cli::emit(o.out, sim_result_json(result, o.samples, manifest));
  finish(m, o.out);
  return 0;
}

int run_fit_erfc(const Options& o, cli::Manifest& m) {
  const auto sim = sim_result_from_json(read_text_file(o.sim_path));
  std::istringstream curve_text(read_text_file(o.curve_path));
  const auto curve = radial_density_from_table(read_csv(curve_text));
  const int n = o.fit_n > 0 ? o.fit_n : sim.config.n;
  const auto fit = fit_q(sim.histogram, curve, n);
  m.config = {{"sim", o.sim_path}, {"curve", o.curve_path}, {"n", n}};
  json extra{{"n", n}, {"r_int", curve.support.r_int}, {"r_ext", curve.support.r_ext}};
  if (!o.out.empty() && o.out != "-") extra["manifest"] = cli::Manifest::path_for(o.out);
  cli::emit(o.out, fit_result_json(fit, extra.dump()));
  finish(m, o.out);
  return 0;
}

int run_clt_check(const Options& o, cli::Manifest& m) {
  const complex m2 = parse_complex(o.m2), m3 = parse_complex(o.m3);
  const bool custom = !o.weights.weights.empty() || o.weights.l1 > 0;
  const auto w = custom ? o.weights.resolve() : equal_weights(o.L, 1.0 / std::sqrt(o.L));
  const auto cfg = sim_config(o);
  const auto sim = simulate_sum(w, cfg);
  const double sigma2 = w.sum_moduli_squared();

  json report;
  report["L"] = w.size();
  report["sigma_sq"] = sigma2;
  report["m2"] = json::parse(cli::json_complex(m2));
  report["m3"] = json::parse(cli::json_complex(m3));
  report["moments_check"] = {{"m2", json::parse(cli::json_complex(sim.moments_check.m2))},
                             {"m3", json::parse(cli::json_complex(sim.moments_check.m3))}};
  // The law scales with sigma; compare in units of sigma.
  std::vector<complex> scaled(sim.eigenvalues.size());
  const double sigma = std::sqrt(sigma2);
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = sim.eigenvalues[i] / sigma;
  const auto law = EllipseLaw::of(m2);
  const auto check = ellipse_check(scaled, m2);
  report["ellipse"] = {{"semi_major", law.semi_major},
                       {"semi_minor", law.semi_minor},
                       {"tilt", law.tilt},
                       {"coverage_1_05", check.coverage},
                       {"flatness_cv", check.flatness},
                       {"interior_cells", check.interior_cells}};
  if (m2 == 0.0 && m3 == 0.0) {
    const double lo = 0.05 * sigma, hi = 0.95 * sigma;
    const auto h = make_histogram(sim.moduli(), 0.0, sigma * 1.05, o.bins);
    report["small_weights_l1"] =
        l1_distance(h, [&](double a, double b) { return (b * b - a * a) / (sigma2 * (b - a)); }, lo, hi);
  }
  if (m3 != 0.0) {
    report["deviation_statistic"] = deviation_statistic(sim.eigenvalues, m3);
    // Large-n mean of (1/n) Tr S^3 is m3 sum_l w_l^3.
    complex cubes = 0.0;
    for (const auto& x : w.values()) cubes += x * x * x;
    report["deviation_predicted"] = std::abs(m3) * cubes.real();
  }
  if (m3 != 0.0 && !o.Ls.empty()) {
    std::vector<double> xs, ys;
    json series = json::array();
    for (int L : o.Ls) {
      const auto r = simulate_sum(equal_weights(L, 1.0 / std::sqrt(L)), cfg);
      const double d = deviation_statistic(r.eigenvalues, m3);
      xs.push_back(L);
      ys.push_back(d);
      series.push_back({{"L", L}, {"statistic", d}, {"predicted", predicted_deviation(m3, L)}});
    }
    report["deviation_series"] = series;
    report["slope"] = log_log_slope(xs, ys);
  }
  m.seed = o.seed;
  m.config = {{"L", w.size()}, {"Ls", o.Ls}, {"n", o.n}, {"iterations", o.iters}, {"m2", o.m2}, {"m3", o.m3}};
  if (!o.out.empty() && o.out != "-") report["manifest"] = cli::Manifest::path_for(o.out);
  cli::emit(o.out, report.dump(1));
  finish(m, o.out);
  return 0;
}

int run_quaternion_check(const Options& o, cli::Manifest& m) {
  const auto w = o.weights.resolve();
  SolverConfig cfg = solver_config(o);
  const EigDensityModel reference(w, cfg, DensityMethod::automatic);
  if (reference.method() == DensityMethod::quaternion_numeric)
    throw InvalidConfig("no closed or polynomial form exists for these weights");
  const auto& s = reference.support();
  double worst = 0.0, worst_R = 0.0;
  for (int i = 0; i < o.grid; ++i) {
    const double R = s.r_int + s.width() * (i + 0.5) / o.grid;
    const double numeric = solve_addition(complex(R), w, cfg).M;
    const double d = std::abs(numeric - reference.M(R));
    if (d > worst) {
      worst = d;
      worst_R = R;
    }
  }
  const bool pass = worst <= o.tol;
  json report{{"weights", o.weights.describe()},
              {"reference", to_string(reference.method())},
              {"grid", o.grid},
              {"r_int", s.r_int},
              {"r_ext", s.r_ext},
              {"max_abs_diff", worst},
              {"at_R", worst_R},
              {"tolerance", o.tol},
              {"pass", pass}};
  m.config = {{"weights", o.weights.describe()}, {"grid", o.grid}, {"tol", o.tol}};
  cli::emit(o.out, report.dump(1));
  finish(m, o.out);
  return pass ? 0 : 1;
}

int run_reproduce(const Options& o, cli::Manifest& m) {
  cli::FigureOptions f;
  f.outdir = o.outdir;
  f.n = o.n;
  f.iterations = o.iters;
  f.bins = o.bins;
  f.seed = o.seed;
  f.threads = o.threads;
  std::vector<std::string> outputs;
  const auto summary = cli::reproduce_figure(o.figure, f, outputs);
  m.seed = o.seed;
  m.config = {{"figure", o.figure}, {"n", o.n}, {"iterations", o.iters}, {"bins", o.bins}, {"outdir", o.outdir}};
  const std::string out = o.out.empty() ? (std::filesystem::path(o.outdir) / ("fig" + o.figure + "_summary.json")).string() : o.out;
  cli::emit(out, summary.dump(1));
  finish(m, out, outputs);
  return 0;
}

void add_mc_options(CLI::App& c, Options& o) {
  c.add_option("--n", o.n, "Matrix dimension")->check(CLI::PositiveNumber);
  c.add_option("--iters", o.iters, "Monte-Carlo iterations")->check(CLI::PositiveNumber);
  c.add_option("--bins", o.bins, "Histogram bins")->check(CLI::Range(2, 100000));
  c.add_option("--seed", o.seed, "Random seed")->required();
  c.add_option("--threads", o.threads, "Worker threads (0: available parallelism)")->check(CLI::NonNegativeNumber);
}

std::vector<std::string> load_replay(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  return j.at("argv").get<std::vector<std::string>>();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 2 && args[0] == "--replay") {
    try {
      args = load_replay(args[1]);
    } catch (const std::exception& e) {
      std::cerr << "cannot replay manifest: " << e.what() << '\n';
      return 2;
    }
  }

  CLI::App app{"Spectral densities of weighted sums of free CUE matrices"};
  app.set_version_flag("--version", std::string(CUESUM_VERSION));
  app.require_subcommand(1);
  Options o;

  auto* eig = app.add_subcommand("eig-density", "Radial eigenvalue density curve");
  o.weights.add_to(*eig);
  eig->add_option("--method", o.method)->check(CLI::IsMember({"auto", "closed-form", "polynomial", "quaternion-numeric"}));
  eig->add_option("--grid", o.grid, "Grid points")->check(CLI::Range(10, 1000000));
  eig->add_option("--extend", o.extend, "Also sample the continuation this far beyond each edge")->check(CLI::NonNegativeNumber);
  eig->add_option("--out", o.out, "Output file (stdout by default)");
  eig->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  auto* sv = app.add_subcommand("sv-density", "Singular-value density curve of S^dagger S");
  o.weights.add_to(*sv);
  sv->add_option("--method", o.method)->check(CLI::IsMember({"auto", "closed-form", "polynomial", "homotopy"}));
  sv->add_option("--grid", o.grid, "Grid points")->check(CLI::Range(10, 1000000));
  sv->add_option("--epsilon", o.epsilon, "Imaginary offset for the Green function")->check(CLI::PositiveNumber);
  sv->add_option("--out", o.out, "Output file (stdout by default)");
  sv->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  CLI::App* sims[2];
  int k = 0;
  for (const char* name : {"simulate-eig", "simulate-sv"}) {
    auto* c = app.add_subcommand(name, k == 0 ? "Monte-Carlo eigenvalue moduli histogram"
                                              : "Monte-Carlo singular-value histogram");
    o.weights.add_to(*c);
    add_mc_options(*c, o);
    c->add_option("--m2", o.m2, "Second moment of a phase-density ensemble (CUE when m2 = m3 = 0)");
    c->add_option("--m3", o.m3, "Third moment of a phase-density ensemble");
    c->add_flag("--samples", o.samples, "Include the pooled samples");
    c->add_option("--out", o.out, "Output JSON (stdout by default)");
    sims[k++] = c;
  }

  auto* fit = app.add_subcommand("fit-erfc", "Least-squares erfc form-factor fit");
  fit->add_option("--sim", o.sim_path, "Simulation JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--curve", o.curve_path, "Analytic curve CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--n", o.fit_n, "Matrix dimension (default: from the simulation)");
  fit->add_option("--out", o.out, "Output JSON (stdout by default)");

  auto* clt = app.add_subcommand("clt-check", "Elliptic law and correction checks for many small summands");
  o.weights.add_to(*clt);
  clt->add_option("--L", o.L, "Number of equal weights 1/sqrt(L) when no weights are given")->check(CLI::Range(2, 100000));
  clt->add_option("--Ls", o.Ls, "Equal-weight sizes for the correction scaling slope (needs --m3)")->delimiter(',');
  clt->add_option("--m2", o.m2, "Second moment of the summands");
  clt->add_option("--m3", o.m3, "Third moment of the summands");
  add_mc_options(*clt, o);
  clt->add_option("--out", o.out, "Output JSON (stdout by default)");

  auto* qc = app.add_subcommand("quaternion-check", "Numeric master equation against closed forms");
  o.weights.add_to(*qc);
  qc->add_option("--grid", o.grid, "Interior grid points")->check(CLI::Range(1, 1000000));
  qc->add_option("--tol", o.tol, "Pass threshold on max |M_numeric - M_closed|");
  qc->add_option("--out", o.out, "Output JSON (stdout by default)");

  auto* rf = app.add_subcommand("reproduce-figure", "Analytic curves, simulations, overlays and fits for a figure");
  rf->add_option("figure", o.figure, "3, 4A..4D, 5A..5D or 6A..6D")
      ->required()
      ->check(CLI::IsMember({"3", "4A", "4B", "4C", "4D", "5A", "5B", "5C", "5D", "6A", "6B", "6C", "6D"}));
  add_mc_options(*rf, o);
  rf->add_option("--outdir", o.outdir, "Output directory");
  rf->add_option("--out", o.out, "Summary JSON (default: <outdir>/fig<id>_summary.json)");

  // CLI11 parses in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto* sub = app.get_subcommands().front();
  cli::Manifest manifest(sub->get_name(), args);
  try {
    if (sub == eig) return run_eig_density(o, manifest);
    if (sub == sv) return run_sv_density(o, manifest);
    if (sub == sims[0]) return run_simulate(o, manifest, false);
    if (sub == sims[1]) return run_simulate(o, manifest, true);
    if (sub == fit) return run_fit_erfc(o, manifest);
    if (sub == clt) return run_clt_check(o, manifest);
    if (sub == qc) return run_quaternion_check(o, manifest);
    if (sub == rf) return run_reproduce(o, manifest);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n' << sub->help();
    return 2;
  } catch (const std::exception& e) {
    json diag{{"error", e.what()}, {"subcommand", sub->get_name()}};
    std::cerr << diag.dump() << '\n';
    return 1;
  }
  return 2;
}
