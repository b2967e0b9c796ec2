#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuesum/types.hpp"

namespace cli {

struct PanelConfig {
  std::string label;  // "A1", "D3", ...
  cuesum::WeightVector weights;
  std::string description;
};

// Weight configurations of panel A, B, C or D.
std::vector<PanelConfig> panel_configs(char panel);

struct FigureOptions {
  std::string outdir = ".";
  int n = 500;
  int iterations = 1000;
  int bins = 100;
  std::uint64_t seed = 0;
  int threads = 0;
};

// Runs the pipeline for "3", "4A".."4D" (eigenvalue densities), "5A".."5D"
// (the same with erfc fits) or "6A".."6D" (singular values). Returns a
// summary and appends every written file to `outputs`.
nlohmann::json reproduce_figure(const std::string& id, const FigureOptions& opts,
                                std::vector<std::string>& outputs);

}  // namespace cli
