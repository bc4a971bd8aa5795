#pragma once

// GP-UCB optimization loop: screen-then-refine acquisition maximization plus
// the full experimental protocol (uniform init design, 2%-of-variance noise,
// per-iteration hyperparameter refit, regret ledger).

#include "invbo/benchmarks.hpp"
#include "invbo/common.hpp"
#include "invbo/gp.hpp"
#include "invbo/kernels.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace invbo::bo {

struct BOConfig {
  std::string benchmark;  // id accepted by benchmarks::make_benchmark
  kernels::Mode mode = kernels::Mode::kPlus;
  // Base-kernel family; empty picks the benchmark's default.
  std::optional<kernels::Family> family;
  std::uint64_t seed = 1;
  int n_init = 5;
  int n_iters = 50;
  double beta_coefficient = 0.5;  // beta_t = coeff * d * log t
  double noise_fraction = 0.02;   // observation noise variance / Var[f]
  int m_starts = 10;              // refined acquisition starts
  int candidate_budget = 0;       // screened uniform candidates; 0 -> max(64, n)
  int ascent_steps = 50;
};

// Throws ConfigError on out-of-range fields or an unknown benchmark id.
void validate(const BOConfig& config);

struct IterationRecord {
  int t = 0;  // -(n_init-1)..0 for the init design, then 1..n_iters
  Vector x;
  double y = 0.0;       // observed (noisy) value
  double f_true = 0.0;  // noise-free objective value
  double r_t = 0.0;     // instantaneous regret; NaN without a known maximum
  double R_t = 0.0;     // running sum of r_t
  double s_t = 0.0;     // best-so-far gap; negated best value without a known maximum
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double lengthscale = std::numeric_limits<double>::quiet_NaN();
  double noise_var = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
};

struct BOTrace {
  BOConfig config;
  std::vector<IterationRecord> records;
  std::vector<std::string> warnings;  // fit failures; never abort the run
  Vector best_x;
  double best_f = -std::numeric_limits<double>::infinity();  // noise-free
  double cumulative_regret = 0.0;  // final R_t
  double simple_regret = 0.0;      // final s_t
};

// mean + sqrt(0.5 d log t) * sqrt(max(0, variance)); log 1 = 0 makes the
// first round pure exploitation.
double ucb_score(double mean, double variance, int t, int d);

// Projected coordinate-wise pattern ascent: per sweep each coordinate probes
// +-step (a forward-difference estimate of the directional slope at the
// pattern scale) and keeps the first improving move; step starts at
// 0.1 * width and halves after a sweep with no accepted move. Never leaves
// the box, never decreases the score below score(clamp(start)).
Vector ascend(const std::function<double(const Vector&)>& score, const Box& box,
              const Vector& start, int steps);

// Refine every start with ascend() and return the best scorer.
Vector maximize_score(const std::function<double(const Vector&)>& score, const Box& box,
                      const std::vector<Vector>& starts, int steps);

struct AcquisitionOptions {
  double beta_coefficient = 0.5;
  int m_starts = 10;
  int candidate_budget = 0;  // 0 -> max(64, design size)
  int ascent_steps = 50;
};

// Screens the candidate budget of uniform points by UCB, refines the top
// m_starts plus the best-observed design point, returns the best UCB scorer.
// Deterministic given the RNG state; always feasible.
Vector propose_next(const gp::Posterior& posterior, const Box& box, int t, Rng& rng,
                    const AcquisitionOptions& options = {});

inline constexpr std::uint64_t kSignalVarianceSeed = 90210;
inline constexpr int kSignalVarianceSamples = 10000;

// Population variance of f over kSignalVarianceSamples uniform draws with the
// dedicated seed; memoized per benchmark name (thread-safe).
double benchmark_signal_variance(const benchmarks::Benchmark& bench);

BOTrace run_bo(const BOConfig& config);

}  // namespace invbo::bo
