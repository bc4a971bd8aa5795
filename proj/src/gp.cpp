#include "invbo/gp.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace invbo::gp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct CholFactor {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;
};

bool llt_ok(const Eigen::LLT<Matrix>& llt) {
  if (llt.info() != Eigen::Success) return false;
  // Eigen reports success for some semi-definite inputs; require a strictly
  // positive, finite diagonal.
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    const double d = L(i, i);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
  }
  return true;
}

// First attempt jitter-free, then 6 escalating jittered attempts.
CholFactor chol_with_jitter(const Matrix& A, double mean_diag) {
  CholFactor f;
  f.llt.compute(A);
  if (llt_ok(f.llt)) return f;
  double jitter = 1e-10 * mean_diag;
  if (!(jitter > 0.0)) jitter = 1e-16;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Matrix Aj = A;
    Aj.diagonal().array() += jitter;
    f.llt.compute(Aj);
    if (llt_ok(f.llt)) {
      f.jitter = jitter;
      return f;
    }
    jitter *= 10.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  double cond = std::numeric_limits<double>::infinity();
  if (es.info() == Eigen::Success) {
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo != 0.0) cond = std::abs(hi / lo);
  }
  throw SingularSystemError(
      "factorization failed after jitter escalation (n=" + std::to_string(A.rows()) +
          ", condition estimate=" + std::to_string(cond) + ")",
      cond);
}

double var_floor(const Vector& y) {
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size());
  return std::max(var, 1e-10);
}

}  // namespace

BoundKernel::BoundKernel(const kernels::KernelSpec& spec, Matrix design)
    : spec_(spec), design_(std::move(design)) {
  if (design_.rows() < 1) throw DimensionError("BoundKernel: empty design");
  if (spec_.mode == kernels::Mode::kPlus) {
    projection_ = std::make_shared<psd::ProjectedKernel>(spec_, design_);
    gram_ = projection_->kplus();
  } else {
    gram_ = kernels::gram(spec_, design_);
  }
}

double BoundKernel::cross_and_diag(const Vector& x, Vector& cross) const {
  const int n = size();
  cross.resize(n);
  if (projection_) {
    const Vector phi = projection_->features(x);
    cross.noalias() = projection_->design_features() * phi;
    return phi.squaredNorm();
  }
  for (int i = 0; i < n; ++i) {
    cross[i] = kernels::eval(spec_, design_.row(i).transpose(), x);
  }
  return kernels::eval(spec_, x, x);
}

Vector BoundKernel::cross(const Vector& x) const {
  Vector c;
  cross_and_diag(x, c);
  return c;
}

double BoundKernel::diag(const Vector& x) const {
  if (projection_) return projection_->features(x).squaredNorm();
  return kernels::eval(spec_, x, x);
}

Matrix BoundKernel::cross_matrix(const Matrix& queries) const {
  const int m = static_cast<int>(queries.rows());
  Matrix C(m, size());
  Vector row;
  for (int i = 0; i < m; ++i) {
    cross_and_diag(queries.row(i).transpose(), row);
    C.row(i) = row.transpose();
  }
  return C;
}

Matrix BoundKernel::query_gram(const Matrix& queries) const {
  if (projection_) return projection_->cross_gram(queries).query;
  if (queries.rows() == 0) return Matrix(0, 0);
  return kernels::gram(spec_, queries);
}

Posterior fit_posterior(BoundKernel kernel, Dataset data) {
  if (data.X.rows() != data.y.size()) throw DimensionError("fit_posterior: |X| != |y|");
  if (data.y.size() < 1) throw DimensionError("fit_posterior: empty dataset");
  if (data.noise_variance < 0.0) throw NumericalError("fit_posterior: negative noise variance");

  const Matrix& K = kernel.design_gram();
  const int t = static_cast<int>(data.y.size());
  Matrix A = K;
  A.diagonal().array() += data.noise_variance;
  if (!A.allFinite()) throw NumericalError("fit_posterior: non-finite kernel matrix");

  CholFactor f = chol_with_jitter(A, K.trace() / static_cast<double>(t));
  Posterior post(std::move(kernel), std::move(data));
  post.alpha_ = f.llt.solve(post.data_.y);
  post.llt_ = std::move(f.llt);
  post.jitter_ = f.jitter;
  return post;
}

double Posterior::mean(const Vector& x) const { return kernel_.cross(x).dot(alpha_); }

double Posterior::variance(const Vector& x) const { return mean_and_variance(x).second; }

std::pair<double, double> Posterior::mean_and_variance(const Vector& x) const {
  Vector c;
  const double prior = kernel_.cross_and_diag(x, c);
  const double mu = c.dot(alpha_);
  const Vector sol = llt_.solve(c);
  const double var = prior - c.dot(sol);
  return {mu, std::max(0.0, var)};
}

std::pair<Vector, Matrix> Posterior::predict(const Matrix& queries) const {
  const Matrix C = kernel_.cross_matrix(queries);
  const Matrix P = kernel_.query_gram(queries);
  Vector mean = C * alpha_;
  Matrix cov = P - C * llt_.solve(C.transpose());
  return {std::move(mean), std::move(cov)};
}

double log_marginal_likelihood(const BoundKernel& kernel, const Dataset& data) {
  if (data.X.rows() != data.y.size()) throw DimensionError("log_marginal_likelihood: |X| != |y|");
  const int t = static_cast<int>(data.y.size());
  Matrix A = kernel.design_gram();
  A.diagonal().array() += data.noise_variance;
  CholFactor f = chol_with_jitter(A, kernel.design_gram().trace() / static_cast<double>(t));
  const Vector alpha = f.llt.solve(data.y);
  double logdet = 0.0;
  const auto& L = f.llt.matrixLLT();
  for (int i = 0; i < t; ++i) logdet += 2.0 * std::log(L(i, i));
  return -0.5 * data.y.dot(alpha) - 0.5 * logdet - 0.5 * t * kLog2Pi;
}

double log_marginal_likelihood(kernels::Family family, kernels::Mode mode,
                               const std::optional<groups::GroupAction>& group,
                               double signal_variance, double lengthscale,
                               double noise_variance, const Matrix& X, const Vector& y) {
  kernels::KernelSpec spec(family, lengthscale, signal_variance, mode, group);
  BoundKernel kernel(spec, X);
  return log_marginal_likelihood(kernel, Dataset{X, y, noise_variance});
}

namespace {

// LML through the symmetric eigendecomposition of the unit-variance Gram:
// K(lambda, l) = lambda * Khat(l), so one decomposition per distinct l serves
// every (lambda, s2) query; Plus mode clips the eigenvalues at 0 (the clip
// commutes with the positive scaling and keeps the eigenbasis).
class LmlObjective {
 public:
  LmlObjective(const kernels::GramProfile& profile, kernels::Family family, const Vector& y)
      : profile_(profile), family_(family), y_(y),
        clip_(profile.mode() == kernels::Mode::kPlus) {}

  double operator()(double log_lam, double log_l, double log_s2) {
    const double lam = std::exp(log_lam);
    const double l = std::exp(log_l);
    const double s2 = std::exp(log_s2);
    if (!std::isfinite(lam) || !std::isfinite(l) || !std::isfinite(s2)) {
      return -std::numeric_limits<double>::infinity();
    }
    if (l != cached_l_) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(profile_.gram(family_, 1.0, l));
      if (es.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
      evals_ = es.eigenvalues();
      z_ = es.eigenvectors().transpose() * y_;
      cached_l_ = l;
    }
    const int t = static_cast<int>(y_.size());
    double quad = 0.0, logdet = 0.0;
    for (int i = 0; i < t; ++i) {
      double e = evals_[i];
      if (clip_) e = std::max(e, 0.0);
      const double d = lam * e + s2;
      if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
      quad += z_[i] * z_[i] / d;
      logdet += std::log(d);
    }
    return -0.5 * quad - 0.5 * logdet - 0.5 * t * kLog2Pi;
  }

 private:
  const kernels::GramProfile& profile_;
  kernels::Family family_;
  const Vector& y_;
  bool clip_;
  double cached_l_ = std::numeric_limits<double>::quiet_NaN();
  Vector evals_;
  Vector z_;
};

struct LogBounds {
  std::array<double, 3> lo;  // (log lambda, log l, log s2)
  std::array<double, 3> hi;

  std::array<double, 3> clamp(std::array<double, 3> p) const {
    for (int i = 0; i < 3; ++i) p[i] = std::min(std::max(p[i], lo[i]), hi[i]);
    return p;
  }
  std::array<double, 3> at_fractions(const std::array<double, 3>& f) const {
    std::array<double, 3> p;
    for (int i = 0; i < 3; ++i) p[i] = lo[i] + f[i] * (hi[i] - lo[i]);
    return p;
  }
};

}  // namespace

FitResult fit_hyperparams(const kernels::GramProfile& profile, kernels::Family family,
                          const Vector& y, const FitOptions& options,
                          const std::array<double, 3>* warm_start) {
  if (y.size() < 2) throw ConfigError("fit_hyperparams: need at least 2 observations");
  if (profile.size() != y.size()) throw DimensionError("fit_hyperparams: profile/y size mismatch");

  const double vy = var_floor(y);
  const double diag = std::max(options.domain_diagonal, 1e-12);
  LogBounds bounds{
      {std::log(1e-4 * vy), std::log(1e-3 * diag), std::log(1e-8 * vy)},
      {std::log(1e4 * vy), std::log(10.0 * diag), std::log(vy)}};

  LmlObjective objective(profile, family, y);
  auto f = [&](const std::array<double, 3>& p) { return objective(p[0], p[1], p[2]); };

  // Fixed fractional lattice keeps the multi-start deterministic; extra
  // restarts beyond the table come from a fixed-seed stream.
  static constexpr std::array<std::array<double, 3>, 4> kStartFractions = {{
      {0.5, 0.5, 0.25},
      {0.75, 0.25, 0.5},
      {0.25, 0.75, 0.125},
      {0.5, 0.1, 0.625},
  }};

  FitResult best;
  bool any = false;
  int best_idx = -1;

  Rng extra_starts(0xF17u);
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::array<double, 3> theta;
    if (r == 0 && warm_start != nullptr) {
      theta = bounds.clamp({std::log((*warm_start)[0]), std::log((*warm_start)[1]),
                            std::log((*warm_start)[2])});
    } else if (r < static_cast<int>(kStartFractions.size())) {
      theta = bounds.at_fractions(kStartFractions[static_cast<std::size_t>(r)]);
    } else {
      theta = bounds.at_fractions(
          {extra_starts.uniform01(), extra_starts.uniform01(), extra_starts.uniform01()});
    }

    double fval = f(theta);
    if (!std::isfinite(fval)) continue;

    constexpr double kGradStep = 1e-4;
    double step = 0.5;
    int stall = 0;
    for (int iter = 0; iter < options.max_iters; ++iter) {
      std::array<double, 3> grad;
      double gmax = 0.0;
      for (int i = 0; i < 3; ++i) {
        auto up = theta, dn = theta;
        up[i] += kGradStep;
        dn[i] -= kGradStep;
        grad[i] = (f(up) - f(dn)) / (2.0 * kGradStep);
        if (!std::isfinite(grad[i])) grad[i] = 0.0;
        gmax = std::max(gmax, std::abs(grad[i]));
      }
      if (gmax < 1e-7 * std::max(1.0, std::abs(fval))) break;

      // Projected ascent with backtracking; direction scaled to unit inf-norm.
      bool improved = false;
      double alpha = step;
      for (int half = 0; half < 20; ++half) {
        std::array<double, 3> trial = theta;
        for (int i = 0; i < 3; ++i) trial[i] += alpha * grad[i] / gmax;
        trial = bounds.clamp(trial);
        const double ftrial = f(trial);
        if (ftrial > fval) {
          const double gain = ftrial - fval;
          theta = trial;
          fval = ftrial;
          improved = true;
          step = std::min(alpha * 1.5, 0.5);
          stall = (gain < 1e-10 * (1.0 + std::abs(fval))) ? stall + 1 : 0;
          break;
        }
        alpha *= 0.5;
      }
      if (!improved || stall >= 2) break;
    }

    if (!any || fval > best.lml) {
      any = true;
      best_idx = r;
      best.lml = fval;
      best.signal_variance = std::exp(theta[0]);
      best.lengthscale = std::exp(theta[1]);
      best.noise_variance = std::exp(theta[2]);
    }
  }
  (void)best_idx;

  if (!any) {
    // Every restart landed in an infeasible region; return the bound midpoint.
    const auto mid = bounds.at_fractions({0.5, 0.5, 0.5});
    best.signal_variance = std::exp(mid[0]);
    best.lengthscale = std::exp(mid[1]);
    best.noise_variance = std::exp(mid[2]);
    best.lml = f(mid);
    best.converged = false;
    best.warning = "hyperparameter fit: no feasible restart";
    return best;
  }
  best.converged = true;
  return best;
}

FitResult fit_hyperparams(const Matrix& X, const Vector& y, kernels::Family family,
                          kernels::Mode mode, const std::optional<groups::GroupAction>& group,
                          const FitOptions& options, const std::array<double, 3>* warm_start) {
  kernels::GramProfile profile(mode, group, X);
  return fit_hyperparams(profile, family, y, options, warm_start);
}

}  // namespace invbo::gp
