#include "invbo/psd_nystrom.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace invbo::psd {

EigenClip psd_project(const Matrix& K) {
  if (K.rows() != K.cols() || K.rows() < 1) {
    throw DimensionError("psd_project: matrix must be square and nonempty");
  }
  const Matrix sym = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("psd_project: eigendecomposition failed (n=" +
                         std::to_string(K.rows()) +
                         ", max|K|=" + std::to_string(sym.cwiseAbs().maxCoeff()) +
                         ", trace=" + std::to_string(sym.trace()) + ")");
  }
  EigenClip clip;
  clip.eigvecs = solver.eigenvectors();
  clip.raw = solver.eigenvalues();
  clip.clipped = clip.raw.cwiseMax(0.0);
  return clip;
}

Matrix reconstruct(const EigenClip& clip) {
  return clip.eigvecs * clip.clipped.asDiagonal() * clip.eigvecs.transpose();
}

ProjectedKernel::ProjectedKernel(const kernels::KernelSpec& spec, Matrix design)
    : spec_(spec), design_(std::move(design)) {
  if (spec_.mode != kernels::Mode::kMax && spec_.mode != kernels::Mode::kPlus) {
    throw ConfigError("ProjectedKernel: spec mode must be max or plus");
  }
  spec_.mode = kernels::Mode::kMax;
  if (design_.rows() < 1) throw DimensionError("ProjectedKernel: empty design");

  const Matrix K = kernels::gram(spec_, design_);
  EigenClip clip = psd_project(K);
  raw_ = clip.raw;
  clipped_ = clip.clipped;
  kplus_ = reconstruct(clip);

  const int n = static_cast<int>(design_.rows());
  const double lam_max = clipped_.maxCoeff();
  const double cutoff = kRankTol * lam_max;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (clipped_[i] > cutoff && clipped_[i] > 0.0) keep.push_back(i);
  }
  rank_ = static_cast<int>(keep.size());
  pinv_sqrt_factor_.resize(rank_, n);
  for (int a = 0; a < rank_; ++a) {
    pinv_sqrt_factor_.row(a) =
        clip.eigvecs.col(keep[a]).transpose() / std::sqrt(clipped_[keep[a]]);
  }
  // phi(x_i) = F k_max(D, x_i) = F K[:,i]; K is symmetric.
  design_features_ = (pinv_sqrt_factor_ * K).transpose();
}

Vector ProjectedKernel::features(const Vector& x) const {
  const int n = static_cast<int>(design_.rows());
  Vector kvec(n);
  for (int i = 0; i < n; ++i) {
    kvec[i] = kernels::eval_max(spec_, design_.row(i).transpose(), x);
  }
  return pinv_sqrt_factor_ * kvec;
}

double ProjectedKernel::eval(const Vector& x, const Vector& y) const {
  return features(x).dot(features(y));
}

Matrix ProjectedKernel::feature_matrix(const Matrix& queries) const {
  const int m = static_cast<int>(queries.rows());
  Matrix phi(m, rank_);
  for (int i = 0; i < m; ++i) {
    phi.row(i) = features(queries.row(i).transpose()).transpose();
  }
  return phi;
}

ProjectedKernel::CrossGram ProjectedKernel::cross_gram(const Matrix& queries) const {
  CrossGram out;
  const Matrix phi = feature_matrix(queries);
  out.cross = phi * design_features_.transpose();
  out.query = phi * phi.transpose();
  return out;
}

}  // namespace invbo::psd
