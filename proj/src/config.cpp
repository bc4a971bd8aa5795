#include "invbo/config.hpp"

#include "invbo/benchmarks.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace invbo::config {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError("unknown config key: " + where + it.key());
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

std::optional<kernels::Family> read_family(const json& obj) {
  std::string s = "default";
  read(obj, "family", s);
  if (s == "default") return std::nullopt;
  return kernels::parse_family(s);
}

std::vector<kernels::Mode> read_modes(const json& obj, std::vector<kernels::Mode> fallback) {
  auto it = obj.find("modes");
  if (it == obj.end()) return fallback;
  std::vector<kernels::Mode> modes;
  for (const auto& m : *it) modes.push_back(kernels::parse_mode(m.get<std::string>()));
  if (modes.empty()) throw ConfigError("kernel.modes must not be empty");
  return modes;
}

json modes_json(const std::vector<kernels::Mode>& modes) {
  json a = json::array();
  for (auto m : modes) a.push_back(kernels::to_string(m));
  return a;
}

std::string family_string(const std::optional<kernels::Family>& family) {
  return family ? kernels::to_string(*family) : "default";
}

std::string default_dir(const std::string& benchmark) {
  std::string s = benchmark;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return "results/" + s;
}

json parse_top(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

bo::BOConfig ExperimentConfig::cell(kernels::Mode mode, std::uint64_t seed) const {
  bo::BOConfig c;
  c.benchmark = benchmark;
  c.mode = mode;
  c.family = family;
  c.seed = seed;
  c.n_init = n_init;
  c.n_iters = n_iters;
  c.beta_coefficient = beta_coefficient;
  c.noise_fraction = noise_fraction;
  c.m_starts = m_starts;
  c.candidate_budget = candidate_budget;
  c.ascent_steps = ascent_steps;
  return c;
}

std::string ExperimentConfig::resolved_output_dir() const {
  return output_dir.empty() ? default_dir(benchmark) : output_dir;
}

std::string SpectraConfig::resolved_output_dir() const {
  return output_dir.empty() ? default_dir(benchmark) + "/spectra" : output_dir;
}

ExperimentConfig parse_experiment(const std::string& json_text) {
  const json j = parse_top(json_text);
  try {
    check_keys(j, "", {"benchmark", "kernel", "seeds", "protocol", "acquisition", "output"});
    ExperimentConfig c;
    if (!j.contains("benchmark")) throw ConfigError("config needs a benchmark id");
    c.benchmark = j.at("benchmark").get<std::string>();
    if (auto it = j.find("kernel"); it != j.end()) {
      check_keys(*it, "kernel.", {"family", "modes"});
      c.family = read_family(*it);
      c.modes = read_modes(*it, c.modes);
    }
    if (auto it = j.find("seeds"); it != j.end()) {
      c.seeds = it->get<std::vector<std::uint64_t>>();
      if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
    }
    if (auto it = j.find("protocol"); it != j.end()) {
      check_keys(*it, "protocol.",
                 {"n_init", "n_iters", "noise_fraction", "beta_coefficient"});
      read(*it, "n_init", c.n_init);
      read(*it, "n_iters", c.n_iters);
      read(*it, "noise_fraction", c.noise_fraction);
      read(*it, "beta_coefficient", c.beta_coefficient);
    }
    if (auto it = j.find("acquisition"); it != j.end()) {
      check_keys(*it, "acquisition.", {"m_starts", "candidate_budget", "ascent_steps"});
      read(*it, "m_starts", c.m_starts);
      read(*it, "candidate_budget", c.candidate_budget);
      read(*it, "ascent_steps", c.ascent_steps);
    }
    if (auto it = j.find("output"); it != j.end()) {
      check_keys(*it, "output.", {"dir", "workers"});
      read(*it, "dir", c.output_dir);
      read(*it, "workers", c.workers);
      if (c.workers < 1) throw ConfigError("output.workers must be at least 1");
    }
    bo::validate(c.cell(c.modes.front(), c.seeds.front()));
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field: ") + e.what());
  }
}

SpectraConfig parse_spectra(const std::string& json_text) {
  const json j = parse_top(json_text);
  try {
    check_keys(j, "", {"benchmark", "kernel", "n", "seed", "include_reduced", "output"});
    SpectraConfig c;
    if (!j.contains("benchmark")) throw ConfigError("config needs a benchmark id");
    c.benchmark = j.at("benchmark").get<std::string>();
    if (auto it = j.find("kernel"); it != j.end()) {
      check_keys(*it, "kernel.", {"family", "modes", "lengthscale", "signal_variance"});
      c.family = read_family(*it);
      c.modes = read_modes(*it, c.modes);
      read(*it, "lengthscale", c.lengthscale);
      read(*it, "signal_variance", c.signal_variance);
    }
    read(j, "n", c.n);
    read(j, "seed", c.seed);
    read(j, "include_reduced", c.include_reduced);
    if (auto it = j.find("output"); it != j.end()) {
      check_keys(*it, "output.", {"dir"});
      read(*it, "dir", c.output_dir);
    }
    if (c.n < 1) throw ConfigError("n must be at least 1");
    if (!(c.lengthscale > 0.0)) throw ConfigError("kernel.lengthscale must be positive");
    if (!(c.signal_variance > 0.0)) throw ConfigError("kernel.signal_variance must be positive");
    benchmarks::make_benchmark(c.benchmark);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field: ") + e.what());
  }
}

std::string serialize(const ExperimentConfig& c) {
  json j;
  j["benchmark"] = c.benchmark;
  j["kernel"] = {{"family", family_string(c.family)}, {"modes", modes_json(c.modes)}};
  j["seeds"] = c.seeds;
  j["protocol"] = {{"n_init", c.n_init},
                   {"n_iters", c.n_iters},
                   {"noise_fraction", c.noise_fraction},
                   {"beta_coefficient", c.beta_coefficient}};
  j["acquisition"] = {{"m_starts", c.m_starts},
                      {"candidate_budget", c.candidate_budget},
                      {"ascent_steps", c.ascent_steps}};
  j["output"] = {{"dir", c.output_dir}, {"workers", c.workers}};
  return j.dump(2) + "\n";
}

std::string serialize(const SpectraConfig& c) {
  json j;
  j["benchmark"] = c.benchmark;
  j["kernel"] = {{"family", family_string(c.family)},
                 {"modes", modes_json(c.modes)},
                 {"lengthscale", c.lengthscale},
                 {"signal_variance", c.signal_variance}};
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["include_reduced"] = c.include_reduced;
  j["output"] = {{"dir", c.output_dir}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_experiment(const std::string& path) {
  return parse_experiment(read_file(path));
}

SpectraConfig load_spectra(const std::string& path) { return parse_spectra(read_file(path)); }

}  // namespace invbo::config
