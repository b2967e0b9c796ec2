#include "cuesum/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cuesum/errors.hpp"

namespace cuesum {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InvalidConfig("not a number: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto k = s.find(sep, start);
    parts.push_back(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start));
    if (k == std::string_view::npos) break;
    start = k + 1;
  }
  return parts;
}

json complex_json(complex z) { return json::array({z.real(), z.imag()}); }

complex complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  throw InvalidConfig("expected a number or an [re, im] pair");
}

json parse_object(std::string_view text) {
  json j = json::parse(text.empty() ? std::string_view("{}") : text);
  if (!j.is_object()) throw InvalidConfig("metadata must be a JSON object");
  return j;
}

json ensemble_json(const UnitaryEnsembleSpec& e) {
  json j;
  switch (e.kind) {
    case EnsembleKind::cue: j["kind"] = "cue"; break;
    case EnsembleKind::phase_density:
      j["kind"] = "phase_density";
      j["m2"] = complex_json(e.moment(2));
      j["m3"] = complex_json(e.moment(3));
      break;
    case EnsembleKind::phase_atoms:
      j["kind"] = "phase_atoms";
      j["phases"] = e.atom_phases;
      j["probs"] = e.atom_probs;
      break;
  }
  return j;
}

UnitaryEnsembleSpec ensemble_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "cue") return UnitaryEnsembleSpec::cue();
  if (kind == "phase_density")
    return UnitaryEnsembleSpec::phase_density(complex_from(j.at("m2")), complex_from(j.at("m3")));
  if (kind == "phase_atoms")
    return UnitaryEnsembleSpec::phase_atoms(j.at("phases").get<std::vector<double>>(),
                                            j.at("probs").get<std::vector<double>>());
  throw InvalidEnsemble("unknown ensemble kind '" + kind + "'");
}

}  // namespace

complex parse_complex(std::string_view text) {
  auto s = std::string(trim(text));
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw InvalidConfig("empty number");
  if (s.back() != 'i' && s.back() != 'j') return {parse_double(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t k = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      k = i;
      break;
    }
  }
  auto imag_of = [](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_double(t);
  };
  if (k == std::string::npos) return {0.0, imag_of(s)};
  return {parse_double(std::string_view(s).substr(0, k)), imag_of(std::string_view(s).substr(k))};
}

WeightVector parse_weights(std::string_view text) {
  const auto t = trim(text);
  if (t.empty()) throw InvalidWeights("no weights given");
  const std::filesystem::path path{std::string(t)};
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) {
    const auto content = read_text_file(path.string());
    std::vector<complex> w;
    if (path.extension() == ".json") {
      const json j = json::parse(content);
      const json& arr = j.is_object() ? j.at("weights") : j;
      for (const auto& x : arr) w.push_back(complex_from(x));
    } else {
      std::istringstream in(content);
      std::string line;
      while (std::getline(in, line)) {
        const auto l = trim(line);
        if (l.empty() || l.front() == '#') continue;
        const auto cells = split(l, ',');
        try {
          if (cells.size() == 1)
            w.push_back(parse_complex(cells[0]));
          else
            w.emplace_back(parse_double(cells[0]), parse_double(cells[1]));
        } catch (const InvalidConfig&) {
          if (w.empty()) continue;  // header row
          throw;
        }
      }
    }
    return WeightVector(std::move(w));
  }
  std::vector<complex> w;
  for (auto part : split(t, ',')) w.push_back(parse_complex(part));
  return WeightVector(std::move(w));
}

const std::vector<double>& CurveTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw InvalidConfig("no column named '" + std::string(name) + "'");
}

void write_csv(std::ostream& out, const CurveTable& table) {
  if (table.names.size() != table.columns.size()) throw InvalidConfig("column names do not match columns");
  out << "# " << parse_object(table.metadata).dump() << '\n';
  for (std::size_t i = 0; i < table.names.size(); ++i) out << (i ? "," : "") << table.names[i];
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, table.columns[c][r]);
      if (c) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

CurveTable read_csv(std::istream& in) {
  CurveTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    const auto l = trim(line);
    if (l.empty()) continue;
    if (l.front() == '#') {
      if (!header) t.metadata = parse_object(trim(l.substr(1))).dump();
      continue;
    }
    const auto cells = split(l, ',');
    if (!header) {
      for (auto c : cells) t.names.emplace_back(trim(c));
      t.columns.resize(t.names.size());
      header = true;
      continue;
    }
    if (cells.size() != t.names.size()) throw InvalidConfig("ragged CSV row");
    for (std::size_t c = 0; c < cells.size(); ++c) t.columns[c].push_back(parse_double(cells[c]));
  }
  if (!header) throw InvalidConfig("CSV has no header row");
  return t;
}

CurveTable radial_density_table(const RadialDensity& density, std::string_view extra_metadata) {
  json meta = parse_object(extra_metadata);
  meta["r_int"] = density.support.r_int;
  meta["r_ext"] = density.support.r_ext;
  meta["method"] = to_string(density.method);
  CurveTable t;
  t.metadata = meta.dump();
  t.names = {"R", "rho", "rho_continued"};
  t.columns = {density.grid, density.values,
               density.continued.size() == density.grid.size() ? density.continued : density.values};
  return t;
}

RadialDensity radial_density_from_table(const CurveTable& table) {
  const json meta = parse_object(table.metadata);
  RadialDensity d;
  d.grid = table.column("R");
  d.values = table.column("rho");
  d.continued = std::find(table.names.begin(), table.names.end(), "rho_continued") != table.names.end()
                    ? table.column("rho_continued")
                    : d.values;
  d.edge.assign(d.grid.size(), false);
  if (meta.contains("method") && meta["method"].is_string()) {
    const auto name = meta["method"].get<std::string>();
    for (auto m : {DensityMethod::closed_form, DensityMethod::polynomial, DensityMethod::quaternion_numeric,
                   DensityMethod::homotopy})
      if (to_string(m) == name) d.method = m;
  }
  if (meta.contains("r_int") && meta.contains("r_ext")) {
    d.support = SupportAnnulus(meta["r_int"].get<double>(), meta["r_ext"].get<double>());
  } else {
    // Support from where the density is positive.
    std::size_t a = 0, b = d.values.size();
    while (a < b && d.values[a] <= 0.0) ++a;
    while (b > a && d.values[b - 1] <= 0.0) --b;
    if (a == b) throw InvalidConfig("curve has no positive density");
    d.support = SupportAnnulus(a == 0 ? d.grid.front() : d.grid[a - 1], d.grid[b - 1]);
  }
  return d;
}

CurveTable sv_density_table(const SVDensity& density, std::string_view extra_metadata) {
  json meta = parse_object(extra_metadata);
  meta["endpoints"] = density.endpoints;
  meta["endpoints_from_scan"] = density.endpoints_from_scan;
  meta["method"] = to_string(density.method);
  CurveTable t;
  t.metadata = meta.dump();
  t.names = {"x", "rho"};
  t.columns = {density.grid, density.values};
  return t;
}

std::string sim_result_json(const SimResult& result, bool samples, std::string_view manifest) {
  const bool eig = !result.eigenvalues.empty();
  json j;
  j["kind"] = eig ? "eigenvalues" : "singular_values";
  json w = json::array();
  for (const auto& x : result.weights) w.push_back(complex_json(x));
  j["weights"] = w;
  const auto& c = result.config;
  j["config"] = {{"n", c.n},       {"iterations", c.iterations},   {"bins", c.bins},
                 {"seed", c.seed}, {"max_retries", c.max_retries}, {"ensemble", ensemble_json(c.ensemble)}};
  j["generator"] = result.generator;
  j["retries"] = result.retries;
  const auto& m = result.moments_check;
  j["moments_check"] = {{"m1", complex_json(m.m1)},
                        {"m2", complex_json(m.m2)},
                        {"m3", complex_json(m.m3)},
                        {"matrices", m.matrices}};
  const auto& h = result.histogram;
  j["histogram"] = {{"edges", h.edges}, {"heights", h.heights}, {"counted", h.counted}, {"dropped", h.dropped}};
  if (samples) j["samples"] = eig ? result.moduli() : result.singular_values;
  if (!manifest.empty()) j["manifest"] = std::string(manifest);
  return j.dump(1);
}

SimResult sim_result_from_json(std::string_view text) {
  const json j = json::parse(text);
  SimResult r;
  for (const auto& x : j.at("weights")) r.weights.push_back(complex_from(x));
  const auto& c = j.at("config");
  r.config.n = c.at("n").get<int>();
  r.config.iterations = c.at("iterations").get<int>();
  r.config.bins = c.at("bins").get<int>();
  r.config.seed = c.at("seed").get<std::uint64_t>();
  r.config.max_retries = c.value("max_retries", 3);
  if (c.contains("ensemble")) r.config.ensemble = ensemble_from(c["ensemble"]);
  r.generator = j.value("generator", std::string(kGeneratorName));
  r.retries = j.value("retries", 0);
  if (j.contains("moments_check")) {
    const auto& m = j["moments_check"];
    r.moments_check.m1 = complex_from(m.at("m1"));
    r.moments_check.m2 = complex_from(m.at("m2"));
    r.moments_check.m3 = complex_from(m.at("m3"));
    r.moments_check.matrices = m.value("matrices", std::size_t{0});
  }
  const auto& h = j.at("histogram");
  r.histogram.edges = h.at("edges").get<std::vector<double>>();
  r.histogram.heights = h.at("heights").get<std::vector<double>>();
  r.histogram.counted = h.value("counted", std::size_t{0});
  r.histogram.dropped = h.value("dropped", std::size_t{0});
  if (r.histogram.edges.size() != r.histogram.heights.size() + 1)
    throw InvalidConfig("histogram edges and heights disagree");
  if (j.contains("samples")) {
    const auto s = j["samples"].get<std::vector<double>>();
    if (j.value("kind", std::string("eigenvalues")) == "eigenvalues")
      for (double x : s) r.eigenvalues.emplace_back(x, 0.0);
    else
      r.singular_values = s;
  }
  return r;
}

std::string fit_result_json(const ErfcFitResult& fit, std::string_view extra) {
  json j = parse_object(extra);
  j["q_ext"] = fit.q_ext;
  j["q_int"] = fit.q_int ? json(*fit.q_int) : json(nullptr);
  j["residual"] = fit.residual;
  j["unfitted_residual"] = fit.unfitted_residual;
  j["curvature_ext"] = fit.curvature_ext;
  j["curvature_int"] = fit.curvature_int ? json(*fit.curvature_int) : json(nullptr);
  j["at_bound"] = fit.at_bound;
  j["bins"] = fit.bins;
  return j.dump(1);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidConfig("failed writing '" + path + "'");
}

}  // namespace cuesum
