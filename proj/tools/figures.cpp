#include "figures.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cuesum/eig_density.hpp"
#include "cuesum/errors.hpp"
#include "cuesum/finite_size.hpp"
#include "cuesum/io.hpp"
#include "cuesum/monte_carlo.hpp"
#include "cuesum/sv_density.hpp"

namespace cli {

using nlohmann::json;
using namespace cuesum;

std::vector<PanelConfig> panel_configs(char panel) {
  switch (panel) {
    case 'A':
      return {{"A1", WeightVector{0.4, std::sqrt(1.0 - 0.16)}, "L=2, w=(0.4, sqrt(0.84))"},
              {"A2", WeightVector{0.4, 0.6}, "L=2, w=(0.4, 0.6)"}};
    case 'B':
      return {{"B1", WeightVector{0.4, 0.6, std::sqrt(1.0 - 0.16 - 0.36)}, "L=3, w=(0.4, 0.6, sqrt(0.48))"},
              {"B2", WeightVector{0.3, 0.5, std::sqrt(1.0 - 0.09 - 0.25)}, "L=3, w=(0.3, 0.5, sqrt(0.66))"},
              {"B3", WeightVector{0.25, 0.35, 0.4}, "L=3, w=(0.25, 0.35, 0.4)"},
              {"B4", WeightVector{0.15, 0.25, 0.6}, "L=3, w=(0.15, 0.25, 0.6)"}};
    case 'C':
      return {{"C1", two_value_weights(3, 0.2, 7, std::sqrt((1.0 - 3 * 0.04) / 7.0)),
               "L1=3 at 0.2, L2=7 at sqrt(0.88/7)"},
              {"C2", two_value_weights(3, 0.2, 7, (1.0 - 3 * 0.2) / 7.0), "L1=3 at 0.2, L2=7 at 0.4/7"}};
    case 'D': {
      std::vector<PanelConfig> out;
      int k = 1;
      for (int L : {2, 3, 5, 10})
        out.push_back({"D" + std::to_string(k++), equal_weights(L, 1.0 / std::sqrt(L)),
                       "L=" + std::to_string(L) + " equal weights 1/sqrt(L)"});
      return out;
    }
    default:
      throw InvalidConfig(std::string("unknown panel '") + panel + "'");
  }
}

namespace {

SimConfig sim_config(const FigureOptions& o) {
  SimConfig c;
  c.n = o.n;
  c.iterations = o.iterations;
  c.bins = o.bins;
  c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

std::string out_path(const FigureOptions& o, const std::string& name) {
  return (std::filesystem::path(o.outdir) / name).string();
}

void write_table(const std::string& path, const CurveTable& t, std::vector<std::string>& outputs) {
  std::ostringstream ss;
  write_csv(ss, t);
  write_text_file(path, ss.str());
  outputs.push_back(path);
}

void write_json(const std::string& path, const std::string& text, std::vector<std::string>& outputs) {
  write_text_file(path, text + "\n");
  outputs.push_back(path);
}

json scatter(const FigureOptions& o, std::vector<std::string>& outputs) {
  const WeightVector w{0.4, 0.6};
  const auto sim = simulate_sum(w, sim_config(o));
  const auto sup = support(w);
  CurveTable t;
  t.metadata = json{{"r_int", sup.r_int}, {"r_ext", sup.r_ext}}.dump();
  t.names = {"re", "im"};
  t.columns.resize(2);
  std::size_t inside = 0;
  for (const auto& z : sim.eigenvalues) {
    t.columns[0].push_back(z.real());
    t.columns[1].push_back(z.imag());
    const double r = std::abs(z);
    if (r >= sup.r_int - 0.05 && r <= sup.r_ext + 0.05) ++inside;
  }
  write_table(out_path(o, "fig3_eigenvalues.csv"), t, outputs);
  return {{"r_int", sup.r_int},
          {"r_ext", sup.r_ext},
          {"eigenvalues", sim.eigenvalues.size()},
          {"fraction_in_band", static_cast<double>(inside) / static_cast<double>(sim.eigenvalues.size())}};
}

json eigen_panel(char panel, bool fit, const FigureOptions& o, std::vector<std::string>& outputs) {
  json summary = json::array();
  const std::string fig = fit ? "fig5" : "fig4";
  for (const auto& pc : panel_configs(panel)) {
    const std::string stem = fig + "_" + pc.label;
    const EigDensityModel model(pc.weights);
    const auto curve = radial_density(pc.weights);
    write_table(out_path(o, stem + "_curve.csv"), radial_density_table(curve), outputs);

    const auto sim = simulate_sum(pc.weights, sim_config(o));
    write_json(out_path(o, stem + "_hist.json"), sim_result_json(sim), outputs);

    const auto& h = sim.histogram;
    const auto& s = model.support();
    const double margin = 0.05 * s.width();
    const double l1 = l1_distance(
        h, [&](double a, double b) { return model.bin_average(a, b); }, s.r_int + margin, s.r_ext - margin);

    CurveTable overlay;
    overlay.metadata = json{{"config", pc.description}, {"r_int", s.r_int}, {"r_ext", s.r_ext}}.dump();
    overlay.names = {"R", "histogram", "rho_bin_mean"};
    overlay.columns.resize(3);
    for (std::size_t i = 0; i < h.bins(); ++i) {
      overlay.columns[0].push_back(h.center(i));
      overlay.columns[1].push_back(h.heights[i]);
      overlay.columns[2].push_back(model.bin_average(h.edges[i], h.edges[i + 1]));
    }
    json entry{{"config", pc.label}, {"description", pc.description}, {"r_int", s.r_int},
               {"r_ext", s.r_ext},   {"bulk_l1", l1}};

    if (fit) {
      const auto result = fit_q(h, model, o.n);
      write_json(out_path(o, stem + "_fit.json"), fit_result_json(result, json{{"config", pc.label}}.dump()),
                 outputs);
      const auto product = apply_form_factor(model, o.n, result.q_ext, result.q_int);
      write_table(out_path(o, stem + "_erfc_curve.csv"), radial_density_table(product), outputs);
      overlay.names.push_back("rho_erfc");
      overlay.columns.emplace_back();
      for (std::size_t i = 0; i < h.bins(); ++i) {
        const double c = h.center(i);
        const double bare = model.continued_density(c);
        overlay.columns.back().push_back((std::isfinite(bare) ? std::max(bare, 0.0) : 0.0) *
                                         form_factor(c, o.n, s, result.q_ext, result.q_int));
      }
      entry["q_ext"] = result.q_ext;
      entry["q_int"] = result.q_int ? json(*result.q_int) : json(nullptr);
      entry["residual"] = result.residual;
      entry["unfitted_residual"] = result.unfitted_residual;
      entry["at_bound"] = result.at_bound;
    }
    write_table(out_path(o, stem + "_overlay.csv"), overlay, outputs);
    summary.push_back(entry);
  }
  return summary;
}

json sv_panel(char panel, const FigureOptions& o, std::vector<std::string>& outputs) {
  json summary = json::array();
  for (const auto& pc : panel_configs(panel)) {
    const std::string stem = "fig6_" + pc.label;
    const auto curve = sv_density(pc.weights);
    write_table(out_path(o, stem + "_curve.csv"), sv_density_table(curve), outputs);

    const auto sim = simulate_sum_sv(pc.weights, sim_config(o));
    write_json(out_path(o, stem + "_hist.json"), sim_result_json(sim), outputs);

    const auto& h = sim.histogram;
    auto mean = [&](double a, double b) { return curve_bin_mean(curve.grid, curve.values, a, b); };
    const double lo = curve.endpoints.front(), hi = curve.endpoints.back();
    const double margin = 0.05 * (hi - lo);
    const double l1 = l1_distance(h, mean, lo + margin, hi - margin);

    CurveTable overlay;
    overlay.metadata = json{{"config", pc.description}, {"endpoints", curve.endpoints}}.dump();
    overlay.names = {"x", "histogram", "rho_bin_mean"};
    overlay.columns.resize(3);
    for (std::size_t i = 0; i < h.bins(); ++i) {
      overlay.columns[0].push_back(h.center(i));
      overlay.columns[1].push_back(h.heights[i]);
      overlay.columns[2].push_back(mean(h.edges[i], h.edges[i + 1]));
    }
    write_table(out_path(o, stem + "_overlay.csv"), overlay, outputs);
    summary.push_back({{"config", pc.label},
                       {"description", pc.description},
                       {"endpoints", curve.endpoints},
                       {"bulk_l1", l1},
                       {"integral", curve.integral()}});
  }
  return summary;
}

}  // namespace

json reproduce_figure(const std::string& id, const FigureOptions& opts, std::vector<std::string>& outputs) {
  std::filesystem::create_directories(opts.outdir);
  if (id == "3") return {{"figure", id}, {"result", scatter(opts, outputs)}};
  if (id.size() == 2 && id[1] >= 'A' && id[1] <= 'D') {
    if (id[0] == '4') return {{"figure", id}, {"result", eigen_panel(id[1], false, opts, outputs)}};
    if (id[0] == '5') return {{"figure", id}, {"result", eigen_panel(id[1], true, opts, outputs)}};
    if (id[0] == '6') return {{"figure", id}, {"result", sv_panel(id[1], opts, outputs)}};
  }
  throw InvalidConfig("unknown figure '" + id + "' (expected 3, 4A..4D, 5A..5D or 6A..6D)");
}

}  // namespace cli
