#pragma once

// Exact GP posterior inference and marginal-likelihood hyperparameter fitting
// for any kernel mode, including the design-dependent projected kernel.

#include "invbo/common.hpp"
#include "invbo/kernels.hpp"
#include "invbo/psd_nystrom.hpp"

#include <Eigen/Cholesky>

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace invbo::gp {

struct Dataset {
  Matrix X;  // t x d, rows are inputs
  Vector y;  // t observations
  double noise_variance = 0.0;
};

// Kernel bound to a design set: for Plus mode this owns the projection built
// on exactly that design; other modes evaluate statelessly.
class BoundKernel {
 public:
  BoundKernel(const kernels::KernelSpec& spec, Matrix design);

  const kernels::KernelSpec& spec() const { return spec_; }
  const Matrix& design() const { return design_; }
  int size() const { return static_cast<int>(design_.rows()); }

  // Design Gram: K for base/avg/max, the clipped K+ for plus.
  const Matrix& design_gram() const { return gram_; }

  // k(D, x) into cross (resized); returns k(x, x).
  double cross_and_diag(const Vector& x, Vector& cross) const;

  Vector cross(const Vector& x) const;
  double diag(const Vector& x) const;

  Matrix cross_matrix(const Matrix& queries) const;  // m x n
  Matrix query_gram(const Matrix& queries) const;    // m x m

  const psd::ProjectedKernel* projection() const { return projection_.get(); }

 private:
  kernels::KernelSpec spec_;
  Matrix design_;
  Matrix gram_;
  std::shared_ptr<const psd::ProjectedKernel> projection_;
};

class Posterior {
 public:
  double mean(const Vector& x) const;
  // Clamped at 0 for acquisition use; the unclamped value stays above
  // -1e-9 * signal variance.
  double variance(const Vector& x) const;
  std::pair<double, double> mean_and_variance(const Vector& x) const;

  // Batch mean vector and full (unclamped) posterior covariance.
  std::pair<Vector, Matrix> predict(const Matrix& queries) const;

  const BoundKernel& kernel() const { return kernel_; }
  const Dataset& data() const { return data_; }
  double applied_jitter() const { return jitter_; }

 private:
  friend Posterior fit_posterior(BoundKernel kernel, Dataset data);
  Posterior(BoundKernel kernel, Dataset data) : kernel_(std::move(kernel)), data_(std::move(data)) {}

  BoundKernel kernel_;
  Dataset data_;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
  double jitter_ = 0.0;
};

// Solves (K + noise I + jitter I) alpha = y. First attempt is jitter-free;
// on failure the jitter starts at 1e-10 trace(K)/t and escalates x10, max 6
// jittered attempts, then SingularSystemError with a condition estimate.
Posterior fit_posterior(BoundKernel kernel, Dataset data);

// -1/2 y^T (K+s2 I)^-1 y - 1/2 log det(K+s2 I) - t/2 log(2 pi), with
// data.noise_variance as s2 and the same jitter policy as fit_posterior.
double log_marginal_likelihood(const BoundKernel& kernel, const Dataset& data);

// Convenience: build the kernel for (lambda, l, s2) and evaluate.
double log_marginal_likelihood(kernels::Family family, kernels::Mode mode,
                               const std::optional<groups::GroupAction>& group,
                               double signal_variance, double lengthscale,
                               double noise_variance, const Matrix& X, const Vector& y);

struct FitOptions {
  int restarts = 4;
  int max_iters = 100;
  // Domain main-diagonal length; bounds the lengthscale search.
  double domain_diagonal = 1.0;
};

struct FitResult {
  double signal_variance = 1.0;
  double lengthscale = 1.0;
  double noise_variance = 1e-6;
  double lml = -std::numeric_limits<double>::infinity();
  bool converged = false;
  std::string warning;
};

// Maximizes the log marginal likelihood over log-parameterized
// (lambda, l, s2) by multi-start backtracking gradient ascent with central
// finite differences. Bounds: l in [1e-3, 10] x domain diagonal,
// lambda in [1e-4, 1e4] x var(y), s2 in [1e-8, 1] x var(y).
FitResult fit_hyperparams(const kernels::GramProfile& profile, kernels::Family family,
                          const Vector& y, const FitOptions& options,
                          const std::array<double, 3>* warm_start = nullptr);

FitResult fit_hyperparams(const Matrix& X, const Vector& y, kernels::Family family,
                          kernels::Mode mode, const std::optional<groups::GroupAction>& group,
                          const FitOptions& options,
                          const std::array<double, 3>* warm_start = nullptr);

}  // namespace invbo::gp
