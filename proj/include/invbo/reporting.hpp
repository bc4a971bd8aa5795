#pragma once

// Result artifacts: per-run trace CSVs, seed-aggregated summary JSON, and
// spectrum CSVs. All numeric text uses %.17g so files round-trip doubles.

#include "invbo/bo.hpp"
#include "invbo/spectra.hpp"

#include <string>
#include <vector>

namespace invbo::reporting {

// Fixed column order:
// t,x,y,f_true,r_t,R_t,s_t,lambda,lengthscale,noise_var,wall_ms
// with x semicolon-joined.
std::string trace_csv(const bo::BOTrace& trace);

// "<benchmark>_<mode>_seed<seed>.csv", lowercased benchmark.
std::string run_filename(const bo::BOConfig& config);

struct SummaryStat {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample stddev / sqrt(seeds)
};

// Mean and standard error over one value per seed.
SummaryStat summarize(const std::vector<double>& values);

// Per-mode aggregate over seeds: cumulative regret, average regret, simple
// regret, best value; each as mean, stderr and the 95% CI mean +- 1.96 stderr.
// Cell order follows first appearance in `traces`. Non-finite stats are null.
std::string aggregate_json(const std::string& benchmark,
                           const std::vector<bo::BOTrace>& traces);

// "rank,eigenvalue" rows, rank 1-based.
std::string spectrum_csv(const spectra::SpectrumReport& report);

void write_file(const std::string& path, const std::string& content);

}  // namespace invbo::reporting
