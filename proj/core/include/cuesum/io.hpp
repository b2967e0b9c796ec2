#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cuesum/eig_density.hpp"
#include "cuesum/finite_size.hpp"
#include "cuesum/monte_carlo.hpp"
#include "cuesum/sv_density.hpp"
#include "cuesum/types.hpp"

namespace cuesum {

// "0.4", "-0.3+0.2i", "0.5i", "1e-3-2e-3i".
complex parse_complex(std::string_view text);

// A comma-separated list of complex numbers, or the path of a JSON file (an
// array of numbers or of [re, im] pairs) or of a CSV file (one or two columns).
WeightVector parse_weights(std::string_view text);

// Column-oriented numeric table. On disk: an optional "# {json}" metadata
// line, a header row, then comma-separated rows.
struct CurveTable {
  std::string metadata = "{}";  // JSON object
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(std::string_view name) const;
};

void write_csv(std::ostream& out, const CurveTable& table);
CurveTable read_csv(std::istream& in);

// Columns R, rho, rho_continued; metadata carries r_int, r_ext, method plus `extra`.
CurveTable radial_density_table(const RadialDensity& density, std::string_view extra_metadata = "{}");
RadialDensity radial_density_from_table(const CurveTable& table);

// Columns x, rho; metadata carries the endpoints and method plus `extra`.
CurveTable sv_density_table(const SVDensity& density, std::string_view extra_metadata = "{}");

// Deterministic JSON (no timestamps). `samples` adds the pooled moduli or
// singular values; `manifest` is recorded when nonempty.
std::string sim_result_json(const SimResult& result, bool samples = false,
                            std::string_view manifest = {});
SimResult sim_result_from_json(std::string_view text);

std::string fit_result_json(const ErfcFitResult& fit, std::string_view extra = "{}");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace cuesum
