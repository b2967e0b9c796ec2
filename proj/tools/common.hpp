#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cuesum/types.hpp"

namespace cli {

using nlohmann::json;

// --weights or the degenerate --l1/--w1/--l2/--w2 form.
struct WeightOptions {
  std::string weights;
  int l1 = 0, l2 = 0;
  double w1 = 0.0, w2 = 0.0;

  void add_to(CLI::App& app);
  cuesum::WeightVector resolve() const;
  json describe() const;
};

// Records what a subcommand did, written next to its outputs.
class Manifest {
 public:
  Manifest(std::string subcommand, std::vector<std::string> argv);

  json config = json::object();
  std::optional<std::uint64_t> seed;

  void add_output(const std::string& path) { outputs_.push_back(path); }
  // Path of the manifest that belongs to `primary_output`.
  static std::string path_for(const std::string& primary_output);
  void write(const std::string& path) const;

 private:
  std::string subcommand_;
  std::vector<std::string> argv_;
  std::string started_;
  std::vector<std::string> outputs_;
};

std::string utc_timestamp();

// Writes `text` to `path`, or to stdout when `path` is empty or "-".
void emit(const std::string& path, const std::string& text);

std::string json_complex(cuesum::complex z);

}  // namespace cli
