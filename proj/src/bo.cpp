#include "invbo/bo.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace invbo::bo {

void validate(const BOConfig& config) {
  if (config.n_init < 1) throw ConfigError("n_init must be at least 1");
  if (config.n_iters < 0) throw ConfigError("n_iters must be nonnegative");
  if (config.noise_fraction < 0.0) throw ConfigError("noise_fraction must be nonnegative");
  if (config.beta_coefficient < 0.0) throw ConfigError("beta_coefficient must be nonnegative");
  if (config.m_starts < 1) throw ConfigError("m_starts must be at least 1");
  if (config.candidate_budget < 0) throw ConfigError("candidate_budget must be nonnegative");
  if (config.ascent_steps < 0) throw ConfigError("ascent_steps must be nonnegative");
  benchmarks::make_benchmark(config.benchmark);  // throws on unknown id
}

double ucb_score(double mean, double variance, int t, int d) {
  if (t < 1) throw ConfigError("ucb_score: t must be at least 1");
  const double beta = 0.5 * static_cast<double>(d) * std::log(static_cast<double>(t));
  return mean + std::sqrt(std::max(0.0, beta)) * std::sqrt(std::max(0.0, variance));
}

Vector ascend(const std::function<double(const Vector&)>& score, const Box& box,
              const Vector& start, int steps) {
  const int d = box.dim();
  Vector x = box.clamp(start);
  double fx = score(x);
  Vector step = 0.1 * (box.hi - box.lo);
  const double floor = 1e-12 * (box.hi - box.lo).maxCoeff();

  Vector cand = x;
  for (int s = 0; s < steps; ++s) {
    bool improved = false;
    for (int i = 0; i < d; ++i) {
      for (double dir : {1.0, -1.0}) {
        const double xi = std::clamp(x[i] + dir * step[i], box.lo[i], box.hi[i]);
        if (xi == x[i]) continue;
        cand[i] = xi;
        const double fc = score(cand);
        if (fc > fx) {
          x[i] = xi;
          fx = fc;
          improved = true;
          break;
        }
        cand[i] = x[i];
      }
      cand[i] = x[i];
    }
    if (!improved) {
      step *= 0.5;
      if (step.maxCoeff() < floor) break;
    }
  }
  return x;
}

Vector maximize_score(const std::function<double(const Vector&)>& score, const Box& box,
                      const std::vector<Vector>& starts, int steps) {
  if (starts.empty()) throw ConfigError("maximize_score: needs at least one start");
  Vector best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const Vector& s : starts) {
    Vector refined = ascend(score, box, s, steps);
    const double v = score(refined);
    if (v > best_score) {
      best_score = v;
      best = std::move(refined);
    }
  }
  return best;
}

Vector propose_next(const gp::Posterior& posterior, const Box& box, int t, Rng& rng,
                    const AcquisitionOptions& options) {
  if (t < 1) throw ConfigError("propose_next: t must be at least 1");
  const int d = box.dim();
  const int n = posterior.kernel().size();
  const double beta =
      options.beta_coefficient * static_cast<double>(d) * std::log(static_cast<double>(t));
  const double root_beta = std::sqrt(std::max(0.0, beta));

  auto score = [&](const Vector& x) {
    auto [mean, var] = posterior.mean_and_variance(x);
    return mean + root_beta * std::sqrt(var);
  };

  const int budget =
      options.candidate_budget > 0 ? options.candidate_budget : std::max(64, n);
  std::vector<std::pair<double, Vector>> screened;
  screened.reserve(static_cast<std::size_t>(budget));
  for (int i = 0; i < budget; ++i) {
    Vector c = rng.uniform_in(box);
    screened.emplace_back(score(c), std::move(c));
  }
  const int keep = std::min<int>(options.m_starts, budget);
  std::partial_sort(screened.begin(), screened.begin() + keep, screened.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<Vector> starts;
  starts.reserve(static_cast<std::size_t>(keep) + 1);
  for (int i = 0; i < keep; ++i) starts.push_back(std::move(screened[static_cast<std::size_t>(i)].second));
  // The incumbent by observed value; its neighborhood often holds the optimum.
  Eigen::Index best_row = 0;
  posterior.data().y.maxCoeff(&best_row);
  starts.push_back(posterior.data().X.row(best_row).transpose());

  return maximize_score(score, box, starts, options.ascent_steps);
}

double benchmark_signal_variance(const benchmarks::Benchmark& bench) {
  static std::mutex mu;
  static std::map<std::string, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bench.name);
    if (it != cache.end()) return it->second;
  }

  Rng rng(kSignalVarianceSeed);
  double mean = 0.0, m2 = 0.0;  // Welford
  for (int i = 0; i < kSignalVarianceSamples; ++i) {
    const double f = bench.evaluate(rng.uniform_in(bench.box));
    const double delta = f - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (f - mean);
  }
  const double var = m2 / static_cast<double>(kSignalVarianceSamples);

  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(bench.name, var);
  return var;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

BOTrace run_bo(const BOConfig& config) {
  validate(config);
  const benchmarks::Benchmark bench = benchmarks::make_benchmark(config.benchmark);
  const kernels::Family family = config.family.value_or(bench.default_family);
  const Box& box = bench.box;
  const int d = box.dim();
  const bool known_max = bench.known_max.has_value();
  const double f_star = known_max ? *bench.known_max : 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const double noise_sd =
      std::sqrt(config.noise_fraction * benchmark_signal_variance(bench));

  Rng rng(config.seed);
  BOTrace trace;
  trace.config = config;
  trace.records.reserve(static_cast<std::size_t>(config.n_init + config.n_iters));

  Matrix X(config.n_init + config.n_iters, d);
  Vector y(config.n_init + config.n_iters);
  int n = 0;

  double running_regret = 0.0;
  // Regret is kept on the noise-free values; the optimizer never sees them.
  auto observe = [&](int t, Vector x, double fit_lambda, double fit_l, double fit_s2,
                     std::chrono::steady_clock::time_point started) {
    const double f = bench.evaluate(x);
    const double yv = f + noise_sd * rng.normal();
    X.row(n) = x.transpose();
    y[n] = yv;
    ++n;
    if (f > trace.best_f) {
      trace.best_f = f;
      trace.best_x = x;
    }
    IterationRecord rec;
    rec.t = t;
    rec.x = std::move(x);
    rec.y = yv;
    rec.f_true = f;
    if (known_max) {
      rec.r_t = f_star - f;
      running_regret += rec.r_t;
      rec.R_t = running_regret;
      rec.s_t = f_star - trace.best_f;
    } else {
      rec.r_t = nan;
      rec.R_t = nan;
      rec.s_t = -trace.best_f;
    }
    rec.lambda = fit_lambda;
    rec.lengthscale = fit_l;
    rec.noise_var = fit_s2;
    rec.wall_ms = elapsed_ms(started);
    trace.records.push_back(std::move(rec));
  };

  for (int i = 0; i < config.n_init; ++i) {
    const auto started = std::chrono::steady_clock::now();
    observe(i - (config.n_init - 1), rng.uniform_in(box), nan, nan, nan, started);
  }

  AcquisitionOptions acq;
  acq.beta_coefficient = config.beta_coefficient;
  acq.m_starts = config.m_starts;
  acq.candidate_budget = config.candidate_budget;
  acq.ascent_steps = config.ascent_steps;

  std::optional<groups::GroupAction> group;
  if (config.mode != kernels::Mode::kBase) group = bench.group;

  std::array<double, 3> warm{};
  bool have_warm = false;

  for (int t = 1; t <= config.n_iters; ++t) {
    const auto started = std::chrono::steady_clock::now();
    const Matrix Xt = X.topRows(n);
    const Vector yt = y.head(n);

    double fit_lambda = nan, fit_l = nan, fit_s2 = nan;
    Vector x_next;
    try {
      kernels::GramProfile profile(config.mode, group, Xt);
      gp::FitOptions fit_opts;
      fit_opts.domain_diagonal = box.diagonal();
      const gp::FitResult fit = gp::fit_hyperparams(profile, family, yt, fit_opts,
                                                    have_warm ? &warm : nullptr);
      if (!fit.warning.empty()) {
        trace.warnings.push_back("t=" + std::to_string(t) + ": " + fit.warning);
      }
      fit_lambda = fit.signal_variance;
      fit_l = fit.lengthscale;
      fit_s2 = fit.noise_variance;
      warm = {fit.signal_variance, fit.lengthscale, fit.noise_variance};
      have_warm = true;

      kernels::KernelSpec spec(family, fit.lengthscale, fit.signal_variance, config.mode, group);
      gp::BoundKernel kernel(spec, Xt);
      gp::Posterior posterior =
          gp::fit_posterior(std::move(kernel), gp::Dataset{Xt, yt, fit.noise_variance});
      x_next = propose_next(posterior, box, t, rng, acq);
    } catch (const SingularSystemError& e) {
      trace.warnings.push_back("t=" + std::to_string(t) + ": " + e.what());
      x_next = rng.uniform_in(box);
    } catch (const NumericalError& e) {
      trace.warnings.push_back("t=" + std::to_string(t) + ": " + e.what());
      x_next = rng.uniform_in(box);
    }

    observe(t, std::move(x_next), fit_lambda, fit_l, fit_s2, started);
  }

  if (!trace.records.empty()) {
    trace.cumulative_regret = trace.records.back().R_t;
    trace.simple_regret = trace.records.back().s_t;
  }
  return trace;
}

}  // namespace invbo::bo
