#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "invbo/common.hpp"
#include "invbo/config.hpp"
#include "invbo/kernels.hpp"

#include <filesystem>
#include <string>
#include <vector>

using namespace invbo;
using namespace invbo::config;
using invbo::kernels::Family;
using invbo::kernels::Mode;

#ifndef INVBO_SOURCE_DIR
#define INVBO_SOURCE_DIR "."
#endif

// ---------------------------------------------------------------------------
// Experiment configs.

TEST_CASE("a bare benchmark key yields the full protocol defaults") {
  const ExperimentConfig c = parse_experiment(R"({"benchmark": "Ackley2d"})");
  CHECK(c.benchmark == "Ackley2d");
  CHECK(!c.family.has_value());
  REQUIRE(c.modes.size() == 3);
  CHECK(c.modes[0] == Mode::kBase);
  CHECK(c.modes[1] == Mode::kAvg);
  CHECK(c.modes[2] == Mode::kPlus);
  REQUIRE(c.seeds.size() == 10);
  CHECK(c.seeds.front() == 1);
  CHECK(c.seeds.back() == 10);
  CHECK(c.n_init == 5);
  CHECK(c.n_iters == 50);
  CHECK(c.noise_fraction == 0.02);
  CHECK(c.beta_coefficient == 0.5);
  CHECK(c.m_starts == 10);
  CHECK(c.candidate_budget == 0);
  CHECK(c.ascent_steps == 50);
  CHECK(c.workers == 1);
  CHECK(c.output_dir.empty());
  CHECK(c.resolved_output_dir() == "results/ackley2d");
}

TEST_CASE("experiment round trip: parse, serialize, parse is the identity") {
  const ExperimentConfig a = parse_experiment(R"({
    "benchmark": "Rastrigin5d",
    "kernel": {"family": "matern52", "modes": ["avg", "plus"]},
    "seeds": [3, 14, 15],
    "protocol": {"n_init": 7, "n_iters": 20, "noise_fraction": 0.05,
                 "beta_coefficient": 1.5},
    "acquisition": {"m_starts": 4, "candidate_budget": 128, "ascent_steps": 25},
    "output": {"dir": "out/somewhere", "workers": 3}
  })");
  CHECK(a.family == Family::kMatern52);
  CHECK(a.modes == std::vector<Mode>{Mode::kAvg, Mode::kPlus});
  CHECK(a.seeds == std::vector<std::uint64_t>{3, 14, 15});
  CHECK(a.n_init == 7);
  CHECK(a.candidate_budget == 128);
  CHECK(a.workers == 3);
  CHECK(a.resolved_output_dir() == "out/somewhere");

  const std::string text = serialize(a);
  const ExperimentConfig b = parse_experiment(text);
  CHECK(a == b);
  CHECK(serialize(b) == text);  // canonical form is a fixed point

  // Defaults round trip too.
  const ExperimentConfig d = parse_experiment(R"({"benchmark": "WLAN8d"})");
  CHECK(parse_experiment(serialize(d)) == d);
}

TEST_CASE("experiment cell produces the matching run config") {
  ExperimentConfig c = parse_experiment(R"({
    "benchmark": "Scaling2d",
    "protocol": {"n_iters": 12},
    "acquisition": {"m_starts": 6}
  })");
  const bo::BOConfig run = c.cell(Mode::kPlus, 9);
  CHECK(run.benchmark == "Scaling2d");
  CHECK(run.mode == Mode::kPlus);
  CHECK(run.seed == 9);
  CHECK(run.n_init == 5);
  CHECK(run.n_iters == 12);
  CHECK(run.m_starts == 6);
  CHECK(!run.family.has_value());
}

TEST_CASE("unknown keys are rejected with their path") {
  auto message_of = [](const std::string& text) {
    try {
      parse_experiment(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("(no throw)");
  };
  CHECK(message_of(R"({"benchmark": "Ackley2d", "bogus": 1})").find("bogus") !=
        std::string::npos);
  const std::string nested =
      message_of(R"({"benchmark": "Ackley2d", "protocol": {"n_itters": 3}})");
  CHECK(nested.find("protocol.n_itters") != std::string::npos);
  CHECK(message_of(R"({"benchmark": "Ackley2d", "kernel": {"form": "rbf"}})")
            .find("kernel.form") != std::string::npos);
  CHECK(message_of(R"({"benchmark": "Ackley2d", "output": {"folder": "x"}})")
            .find("output.folder") != std::string::npos);
}

TEST_CASE("invalid experiment values are rejected") {
  CHECK_THROWS_AS(parse_experiment("{}"), ConfigError);  // no benchmark
  CHECK_THROWS_AS(parse_experiment(R"({"benchmark": "NotABenchmark"})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment(R"({"benchmark": "Ackley2d", "seeds": []})"), ConfigError);
  CHECK_THROWS_AS(
      parse_experiment(R"({"benchmark": "Ackley2d", "kernel": {"modes": []}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_experiment(R"({"benchmark": "Ackley2d", "kernel": {"modes": ["warp"]}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_experiment(R"({"benchmark": "Ackley2d", "kernel": {"family": "poly"}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_experiment(R"({"benchmark": "Ackley2d", "protocol": {"n_init": 0}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_experiment(R"({"benchmark": "Ackley2d", "protocol": {"noise_fraction": -1}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_experiment(R"({"benchmark": "Ackley2d", "output": {"workers": 0}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_experiment("not json at all"), ConfigError);
  CHECK_THROWS_AS(parse_experiment(R"(["array"])"), ConfigError);
}

// ---------------------------------------------------------------------------
// Spectra configs.

TEST_CASE("spectra defaults and round trip") {
  const SpectraConfig c = parse_spectra(R"({"benchmark": "Rastrigin5d"})");
  CHECK(c.benchmark == "Rastrigin5d");
  CHECK(!c.family.has_value());
  REQUIRE(c.modes.size() == 4);
  CHECK(c.modes[2] == Mode::kMax);
  CHECK(c.lengthscale == 1.0);
  CHECK(c.signal_variance == 1.0);
  CHECK(c.n == 1000);
  CHECK(c.seed == 1);
  CHECK(c.include_reduced);
  CHECK(c.resolved_output_dir() == "results/rastrigin5d/spectra");

  const SpectraConfig full = parse_spectra(R"({
    "benchmark": "WLAN8d",
    "kernel": {"family": "rbf", "modes": ["max"], "lengthscale": 70.0,
               "signal_variance": 2.0},
    "n": 250,
    "seed": 77,
    "include_reduced": false,
    "output": {"dir": "spectra_out"}
  })");
  CHECK(full.family == Family::kRbf);
  CHECK(full.modes == std::vector<Mode>{Mode::kMax});
  CHECK(full.lengthscale == 70.0);
  CHECK(full.n == 250);
  CHECK(!full.include_reduced);
  const SpectraConfig back = parse_spectra(serialize(full));
  CHECK(back == full);
}

TEST_CASE("invalid spectra values are rejected") {
  CHECK_THROWS_AS(parse_spectra(R"({"benchmark": "Ackley2d", "n": 0})"), ConfigError);
  CHECK_THROWS_AS(
      parse_spectra(R"({"benchmark": "Ackley2d", "kernel": {"lengthscale": 0}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_spectra(R"({"benchmark": "Ackley2d", "kernel": {"signal_variance": -1}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_spectra(R"({"benchmark": "Ackley2d", "nn": 5})"), ConfigError);
}

// ---------------------------------------------------------------------------
// Shipped example configs.

TEST_CASE("every shipped experiment config parses and targets its benchmark") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(INVBO_SOURCE_DIR) / "configs";
  REQUIRE(fs::exists(dir));
  int experiment_count = 0;
  int spectra_count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.rfind("spectra_", 0) == 0) {
      const SpectraConfig c = load_spectra(entry.path().string());
      CHECK(!c.benchmark.empty());
      ++spectra_count;
    } else {
      const ExperimentConfig c = load_experiment(entry.path().string());
      CHECK(!c.benchmark.empty());
      CHECK(c.modes == std::vector<Mode>{Mode::kBase, Mode::kAvg, Mode::kPlus});
      CHECK(c.seeds.size() == 10);
      CHECK(c.n_iters == 50);
      // File name matches the lowercased benchmark.
      std::string lowered = c.benchmark;
      for (char& ch : lowered) ch = static_cast<char>(std::tolower(ch));
      CHECK(stem == lowered);
      ++experiment_count;
    }
  }
  CHECK(experiment_count == 6);
  CHECK(spectra_count == 2);
}

TEST_CASE("load reports missing files as config errors") {
  CHECK_THROWS_AS(load_experiment("/nonexistent/path.json"), ConfigError);
  CHECK_THROWS_AS(load_spectra("/nonexistent/path.json"), ConfigError);
}
