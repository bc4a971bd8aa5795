#include "invbo/reporting.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace invbo::reporting {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

nlohmann::json stat_json(const SummaryStat& s) {
  if (!std::isfinite(s.mean)) return nullptr;
  return {{"mean", s.mean},
          {"stderr", s.stderr_},
          {"ci95", {s.mean - 1.96 * s.stderr_, s.mean + 1.96 * s.stderr_}}};
}

}  // namespace

std::string trace_csv(const bo::BOTrace& trace) {
  std::ostringstream out;
  out << "t,x,y,f_true,r_t,R_t,s_t,lambda,lengthscale,noise_var,wall_ms\n";
  for (const auto& r : trace.records) {
    out << r.t << ",";
    for (Eigen::Index i = 0; i < r.x.size(); ++i) {
      if (i) out << ";";
      out << fmt(r.x[i]);
    }
    out << "," << fmt(r.y) << "," << fmt(r.f_true) << "," << fmt(r.r_t) << "," << fmt(r.R_t)
        << "," << fmt(r.s_t) << "," << fmt(r.lambda) << "," << fmt(r.lengthscale) << ","
        << fmt(r.noise_var) << "," << fmt(r.wall_ms) << "\n";
  }
  return out.str();
}

std::string run_filename(const bo::BOConfig& config) {
  return lower(config.benchmark) + "_" + kernels::to_string(config.mode) + "_seed" +
         std::to_string(config.seed) + ".csv";
}

SummaryStat summarize(const std::vector<double>& values) {
  SummaryStat s;
  if (values.empty()) return s;
  const double k = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= k;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
  }
  return s;
}

std::string aggregate_json(const std::string& benchmark,
                           const std::vector<bo::BOTrace>& traces) {
  std::vector<kernels::Mode> order;
  std::map<kernels::Mode, std::vector<const bo::BOTrace*>> by_mode;
  for (const auto& t : traces) {
    if (by_mode.find(t.config.mode) == by_mode.end()) order.push_back(t.config.mode);
    by_mode[t.config.mode].push_back(&t);
  }

  nlohmann::json j;
  j["benchmark"] = benchmark;
  auto cells = nlohmann::json::array();
  for (auto mode : order) {
    const auto& runs = by_mode[mode];
    std::vector<double> cum, avg, simple, best;
    nlohmann::json seeds = nlohmann::json::array();
    std::size_t warning_count = 0;
    for (const auto* t : runs) {
      cum.push_back(t->cumulative_regret);
      avg.push_back(t->cumulative_regret / static_cast<double>(t->records.size()));
      simple.push_back(t->simple_regret);
      best.push_back(t->best_f);
      seeds.push_back(t->config.seed);
      warning_count += t->warnings.size();
    }
    nlohmann::json cell;
    cell["mode"] = kernels::to_string(mode);
    cell["seeds"] = seeds;
    cell["cumulative_regret"] = stat_json(summarize(cum));
    cell["average_regret"] = stat_json(summarize(avg));
    cell["simple_regret"] = stat_json(summarize(simple));
    cell["best_value"] = stat_json(summarize(best));
    cell["warnings"] = warning_count;
    cells.push_back(std::move(cell));
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

std::string spectrum_csv(const spectra::SpectrumReport& report) {
  std::ostringstream out;
  out << "rank,eigenvalue\n";
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
    out << (i + 1) << "," << fmt(report.eigenvalues[i]) << "\n";
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace invbo::reporting
