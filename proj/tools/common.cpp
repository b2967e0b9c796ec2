#include "common.hpp"

#include <ctime>
#include <iostream>

#include "cuesum/errors.hpp"
#include "cuesum/io.hpp"

namespace cli {

void WeightOptions::add_to(CLI::App& app) {
  auto* w = app.add_option("--weights", weights, "Comma-separated weights (a+bi allowed), or a JSON/CSV file");
  auto* o1 = app.add_option("--l1", l1, "Multiplicity of the first weight value")->excludes(w);
  auto* o2 = app.add_option("--w1", w1, "First weight value")->excludes(w);
  auto* o3 = app.add_option("--l2", l2, "Multiplicity of the second weight value")->excludes(w);
  auto* o4 = app.add_option("--w2", w2, "Second weight value")->excludes(w);
  o1->needs(o2, o3, o4);
  o2->needs(o1);
  o3->needs(o1);
  o4->needs(o1);
}

cuesum::WeightVector WeightOptions::resolve() const {
  if (!weights.empty()) return cuesum::parse_weights(weights);
  if (l1 > 0) return cuesum::two_value_weights(l1, w1, l2, w2);
  throw CLI::RequiredError("--weights or --l1/--w1/--l2/--w2");
}

json WeightOptions::describe() const {
  const auto w = resolve();
  json arr = json::array();
  for (const auto& x : w.values()) arr.push_back(json::array({x.real(), x.imag()}));
  return arr;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Manifest::Manifest(std::string subcommand, std::vector<std::string> argv)
    : subcommand_(std::move(subcommand)), argv_(std::move(argv)), started_(utc_timestamp()) {}

std::string Manifest::path_for(const std::string& primary_output) {
  return primary_output + ".manifest.json";
}

void Manifest::write(const std::string& path) const {
  json j;
  j["subcommand"] = subcommand_;
  j["argv"] = argv_;
  j["config"] = config;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["version"] = CUESUM_VERSION;
  j["started"] = started_;
  j["finished"] = utc_timestamp();
  j["outputs"] = outputs_;
  cuesum::write_text_file(path, j.dump(1) + "\n");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  cuesum::write_text_file(path, text);
}

std::string json_complex(cuesum::complex z) { return json::array({z.real(), z.imag()}).dump(); }

}  // namespace cli
