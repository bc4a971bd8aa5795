#pragma once

// Experiment configuration files: strict JSON with nested sections. Unknown
// keys are rejected with their path; every field has a protocol default, so
// "{\"benchmark\": \"Ackley2d\"}" is a complete config.

#include "invbo/bo.hpp"
#include "invbo/kernels.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace invbo::config {

struct ExperimentConfig {
  std::string benchmark;
  std::optional<kernels::Family> family;  // empty = benchmark default
  std::vector<kernels::Mode> modes = {kernels::Mode::kBase, kernels::Mode::kAvg,
                                      kernels::Mode::kPlus};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int n_init = 5;
  int n_iters = 50;
  double noise_fraction = 0.02;
  double beta_coefficient = 0.5;
  int m_starts = 10;
  int candidate_budget = 0;
  int ascent_steps = 50;
  std::string output_dir;  // empty = "results/<benchmark, lowercased>"
  int workers = 1;

  bool operator==(const ExperimentConfig&) const = default;

  // The BOConfig of one (mode, seed) cell.
  bo::BOConfig cell(kernels::Mode mode, std::uint64_t seed) const;
  std::string resolved_output_dir() const;
};

struct SpectraConfig {
  std::string benchmark;
  std::optional<kernels::Family> family;
  std::vector<kernels::Mode> modes = {kernels::Mode::kBase, kernels::Mode::kAvg,
                                      kernels::Mode::kMax, kernels::Mode::kPlus};
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  int n = 1000;
  std::uint64_t seed = 1;
  // Also emit the plain-kernel spectrum on the volume-reduced sub-box
  // (finite groups only).
  bool include_reduced = true;
  std::string output_dir;

  bool operator==(const SpectraConfig&) const = default;

  std::string resolved_output_dir() const;
};

ExperimentConfig parse_experiment(const std::string& json_text);
SpectraConfig parse_spectra(const std::string& json_text);

// Fully expanded canonical form; parse(serialize(c)) == c.
std::string serialize(const ExperimentConfig& c);
std::string serialize(const SpectraConfig& c);

ExperimentConfig load_experiment(const std::string& path);
SpectraConfig load_spectra(const std::string& path);

}  // namespace invbo::config
