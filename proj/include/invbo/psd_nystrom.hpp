#pragma once

// Frobenius-nearest PSD projection of the max-alignment Gram and the Nystrom
// surrogate k_plus(x,x') = k_max(x,D) K+^dagger k_max(D,x') with its feature
// map phi(x) = K+^{dagger/2} k_max(D,x).

#include "invbo/common.hpp"
#include "invbo/kernels.hpp"

namespace invbo::psd {

struct EigenClip {
  Matrix eigvecs;  // Q, columns, ascending eigenvalue order
  Vector raw;      // eigenvalues of (K + K^T)/2
  Vector clipped;  // max(0, raw)
};

// Symmetrize, eigendecompose, clip negatives at exactly 0 (no jitter here).
EigenClip psd_project(const Matrix& K);

// Q diag(clipped) Q^T
Matrix reconstruct(const EigenClip& clip);

class ProjectedKernel {
 public:
  // Relative eigenvalue cutoff for the pseudo-inverse truncation.
  static constexpr double kRankTol = 1e-10;

  // spec mode must be kMax or kPlus; design rows are the points D.
  ProjectedKernel(const kernels::KernelSpec& spec, Matrix design);

  double eval(const Vector& x, const Vector& y) const;

  // phi(x), length rank().
  Vector features(const Vector& x) const;

  // Rows phi(x) for each query row; m x rank().
  Matrix feature_matrix(const Matrix& queries) const;

  struct CrossGram {
    Matrix cross;  // m x n: k_plus(queries, design)
    Matrix query;  // m x m: k_plus(queries, queries), PSD by construction
  };
  CrossGram cross_gram(const Matrix& queries) const;

  const Matrix& design() const { return design_; }
  // Full clipped reconstruction (no rank truncation): the on-sample Gram.
  const Matrix& kplus() const { return kplus_; }
  // n x rank(): row i is phi(x_i).
  const Matrix& design_features() const { return design_features_; }
  int rank() const { return rank_; }
  const Vector& eigvals_raw() const { return raw_; }
  const Vector& eigvals_clipped() const { return clipped_; }
  const kernels::KernelSpec& spec() const { return spec_; }

 private:
  kernels::KernelSpec spec_;  // normalized to kMax for evaluation
  Matrix design_;
  Vector raw_;
  Vector clipped_;
  Matrix kplus_;
  Matrix pinv_sqrt_factor_;  // rank x n: diag(lambda_i^{-1/2}) Q_cols^T
  Matrix design_features_;   // n x rank
  int rank_ = 0;
};

}  // namespace invbo::psd
