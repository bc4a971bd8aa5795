// Experiment runner: BO batches, spectrum reports, PSD projection
// diagnostics, and benchmark inspection. All results land as files under the
// configured output directory.

#include "invbo/benchmarks.hpp"
#include "invbo/bo.hpp"
#include "invbo/config.hpp"
#include "invbo/psd_nystrom.hpp"
#include "invbo/reporting.hpp"
#include "invbo/spectra.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace invbo;

namespace {

int run_bo_command(const std::string& config_path, const std::string& out_override,
                   int workers_override) {
  config::ExperimentConfig cfg = config::load_experiment(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (workers_override > 0) cfg.workers = workers_override;
  const fs::path out_dir(cfg.resolved_output_dir());
  fs::create_directories(out_dir);

  std::vector<bo::BOConfig> cells;
  for (auto mode : cfg.modes) {
    for (auto seed : cfg.seeds) cells.push_back(cfg.cell(mode, seed));
  }

  std::vector<bo::BOTrace> traces(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::string first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        traces[i] = bo::run_bo(cells[i]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error.empty()) first_error = e.what();
        return;
      }
    }
  };
  const int nw = std::min<int>(cfg.workers, static_cast<int>(cells.size()));
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) {
    std::cerr << "run failed: " << first_error << "\n";
    return 1;
  }

  std::size_t warning_total = 0;
  for (const auto& t : traces) {
    reporting::write_file((out_dir / reporting::run_filename(t.config)).string(),
                          reporting::trace_csv(t));
    warning_total += t.warnings.size();
  }
  reporting::write_file((out_dir / "aggregate.json").string(),
                        reporting::aggregate_json(cfg.benchmark, traces));
  reporting::write_file((out_dir / "config.json").string(), config::serialize(cfg));
  std::cout << "wrote " << traces.size() << " traces + aggregate.json to " << out_dir.string()
            << " (" << warning_total << " warnings)\n";
  return 0;
}

int spectra_command(const std::string& config_path, const std::string& out_override) {
  config::SpectraConfig cfg = config::load_spectra(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const fs::path out_dir(cfg.resolved_output_dir());
  fs::create_directories(out_dir);

  const auto bench = benchmarks::make_benchmark(cfg.benchmark);
  const kernels::Family family = cfg.family.value_or(bench.default_family);
  std::ostringstream combined;
  combined << "report,rank,eigenvalue\n";
  auto emit = [&](const spectra::SpectrumReport& report, const std::string& tag) {
    reporting::write_file((out_dir / (tag + ".csv")).string(),
                          reporting::spectrum_csv(report));
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", report.eigenvalues[i]);
      combined << tag << "," << (i + 1) << "," << buf << "\n";
    }
  };

  for (auto mode : cfg.modes) {
    kernels::KernelSpec spec(family, cfg.lengthscale, cfg.signal_variance, mode,
                             mode == kernels::Mode::kBase
                                 ? std::optional<groups::GroupAction>{}
                                 : std::optional<groups::GroupAction>{bench.group});
    emit(spectra::empirical_spectrum(spec, bench.box, cfg.n, cfg.seed),
         "spectrum_" + kernels::to_string(mode));
  }
  if (cfg.include_reduced) {
    if (auto card = bench.group.cardinality()) {
      kernels::KernelSpec base(family, cfg.lengthscale, cfg.signal_variance);
      emit(spectra::reduced_domain_spectrum(base, bench.box, *card, cfg.n, cfg.seed),
           "spectrum_base_reduced");
    } else {
      std::cout << "skipping reduced-domain spectrum: group is continuous\n";
    }
  }
  reporting::write_file((out_dir / "spectra_combined.csv").string(), combined.str());
  std::cout << "wrote spectrum reports to " << out_dir.string() << "\n";
  return 0;
}

int psd_check_command(int n, std::uint64_t seed, const std::string& out) {
  // Max-alignment Gram over block permutations of two planar points: the
  // best-assignment structure makes this genuinely indefinite on most draws.
  groups::GroupAction group = groups::GroupAction::block_permutations(2, 2);
  kernels::KernelSpec spec(kernels::Family::kRbf, 4.0, 1.0, kernels::Mode::kMax, group);
  const Box box = Box::cube(4, -3.0, 3.0);
  Rng rng(seed);
  Matrix X(n, 4);
  for (int i = 0; i < n; ++i) X.row(i) = rng.uniform_in(box).transpose();

  const Matrix K = kernels::gram(spec, X);
  const psd::EigenClip clip = psd::psd_project(K);
  const Matrix Kp = psd::reconstruct(clip);

  int clipped_count = 0;
  double neg_sq = 0.0;
  for (Eigen::Index i = 0; i < clip.raw.size(); ++i) {
    if (clip.raw[i] < 0.0) {
      ++clipped_count;
      neg_sq += clip.raw[i] * clip.raw[i];
    }
  }
  const double frob_moved = (K - Kp).norm();

  std::ostringstream csv;
  csv << "index,eigenvalue_before,eigenvalue_after\n";
  for (Eigen::Index i = 0; i < clip.raw.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zd,%.17g,%.17g\n", static_cast<std::ptrdiff_t>(i),
                  clip.raw[i], clip.clipped[i]);
    csv << buf;
  }
  if (!out.empty()) {
    fs::create_directories(out);
    reporting::write_file((fs::path(out) / "psd_check.csv").string(), csv.str());
  } else {
    std::cout << csv.str();
  }

  std::cout << "n=" << n << " seed=" << seed << " min_eig=" << clip.raw.minCoeff()
            << " clipped=" << clipped_count << " frobenius_moved=" << frob_moved << "\n";
  // Frobenius-nearest check: the squared movement must equal the energy of
  // the clipped negative part.
  const bool nearest_ok = std::abs(frob_moved * frob_moved - neg_sq) <= 1e-8 * (1.0 + neg_sq);
  if (clipped_count == 0) {
    std::cout << "projection is identity (Gram already PSD)\n";
  } else {
    std::cout << (nearest_ok ? "nearest-PSD verdict: OK" : "nearest-PSD verdict: MISMATCH")
              << " (" << clipped_count << " eigenvalues clipped)\n";
  }
  return nearest_ok || clipped_count == 0 ? 0 : 1;
}

int bench_info_command(const std::string& name) {
  const auto bench = benchmarks::make_benchmark(name);
  std::cout << "name: " << bench.name << "\n";
  std::cout << "dimension: " << bench.box.dim() << "\n";
  std::cout << "box:";
  for (int i = 0; i < bench.box.dim(); ++i) {
    std::cout << " [" << bench.box.lo[i] << ", " << bench.box.hi[i] << "]";
  }
  std::cout << "\n";
  std::cout << "group: " << bench.group.name() << "\n";
  if (auto card = bench.group.cardinality()) {
    std::cout << "group order: " << *card << "\n";
  } else {
    std::cout << "group order: infinite\n";
  }
  if (bench.known_max) {
    std::cout << "known maximum: " << *bench.known_max << "\n";
  } else {
    std::cout << "known maximum: unknown\n";
  }
  std::cout << "default family: " << kernels::to_string(bench.default_family) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-invariant Bayesian optimization experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, bench_name;
  int workers = 0;
  int psd_n = 64;
  std::uint64_t psd_seed = 1;

  auto* run = app.add_subcommand("run-bo", "Run a BO experiment batch from a config file");
  run->add_option("--config", config_path, "Experiment config JSON")->required();
  run->add_option("--out", out_dir, "Output directory override");
  run->add_option("--workers", workers, "Parallel worker threads");

  auto* spect = app.add_subcommand("spectra", "Emit Gram spectrum reports from a config file");
  spect->add_option("--config", config_path, "Spectra config JSON")->required();
  spect->add_option("--out", out_dir, "Output directory override");

  auto* psd = app.add_subcommand("psd-check", "Eigenvalue dump of a projected indefinite Gram");
  psd->add_option("--n", psd_n, "Sample count");
  psd->add_option("--seed", psd_seed, "Sampling seed");
  psd->add_option("--out", out_dir, "Output directory (stdout if omitted)");

  auto* info = app.add_subcommand("bench-info", "Describe a benchmark");
  info->add_option("name", bench_name, "Benchmark id")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_bo_command(config_path, out_dir, workers);
    if (spect->parsed()) return spectra_command(config_path, out_dir);
    if (psd->parsed()) return psd_check_command(psd_n, psd_seed, out_dir);
    if (info->parsed()) return bench_info_command(bench_name);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
