#include "invbo/spectra.hpp"

#include "invbo/psd_nystrom.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace invbo::spectra {

namespace {

std::string domain_label(const Box& box) {
  std::ostringstream out;
  out << "box";
  for (int i = 0; i < box.dim(); ++i) out << "[" << box.lo[i] << "," << box.hi[i] << "]";
  return out.str();
}

Vector ordered_spectrum(const Matrix& K, int n) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(K / static_cast<double>(n));
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed on a " << K.rows() << "x" << K.cols()
        << " Gram (min " << K.minCoeff() << ", max " << K.maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  return eig.eigenvalues().reverse();
}

}  // namespace

SpectrumReport empirical_spectrum(const kernels::KernelSpec& spec, const Box& box, int n,
                                  std::uint64_t seed) {
  if (n < 1) throw ConfigError("empirical_spectrum: n must be at least 1");
  Rng rng(seed);
  Matrix X(n, box.dim());
  for (int i = 0; i < n; ++i) X.row(i) = rng.uniform_in(box).transpose();

  Matrix K;
  if (spec.mode == kernels::Mode::kPlus) {
    K = psd::ProjectedKernel(spec, X).kplus();
  } else {
    K = kernels::gram(spec, X);
  }

  SpectrumReport report;
  report.kernel_id = kernels::to_string(spec.family) + "/" + kernels::to_string(spec.mode);
  report.domain_id = domain_label(box);
  report.n = n;
  report.eigenvalues = ordered_spectrum(K, n);
  report.seed = seed;
  return report;
}

Box reduced_box(const Box& box, std::uint64_t group_order) {
  if (group_order < 1) throw ConfigError("reduced_box: group order must be at least 1");
  const double shrink =
      std::pow(static_cast<double>(group_order), -1.0 / static_cast<double>(box.dim()));
  Box out = box;
  out.hi = box.lo + shrink * (box.hi - box.lo);
  return out;
}

SpectrumReport reduced_domain_spectrum(const kernels::KernelSpec& spec, const Box& box,
                                       std::uint64_t group_order, int n, std::uint64_t seed) {
  kernels::KernelSpec base(spec.family, spec.lengthscale, spec.signal_variance);
  SpectrumReport report = empirical_spectrum(base, reduced_box(box, group_order), n, seed);
  report.domain_id += "/order" + std::to_string(group_order);
  return report;
}

double delta2(const Vector& a, const Vector& b) {
  const Eigen::Index n = std::max(a.size(), b.size());
  Vector pa = Vector::Zero(n), pb = Vector::Zero(n);
  pa.head(a.size()) = a;
  pb.head(b.size()) = b;
  std::sort(pa.data(), pa.data() + n, std::greater<double>());
  std::sort(pb.data(), pb.data() + n, std::greater<double>());
  return (pa - pb).norm();
}

double delta2(const SpectrumReport& a, const SpectrumReport& b) {
  return delta2(a.eigenvalues, b.eigenvalues);
}

double schatten_norm(const Matrix& K, double p) {
  if (K.rows() != K.cols()) throw DimensionError("schatten_norm: matrix must be square");
  const Matrix sym = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("schatten_norm: eigensolver failed");
  const Vector mags = eig.eigenvalues().cwiseAbs();
  if (p == 1.0) return mags.sum();
  if (p == 2.0) return mags.norm();
  if (std::isinf(p)) return mags.size() > 0 ? mags.maxCoeff() : 0.0;
  throw ConfigError("schatten_norm: p must be 1, 2, or inf");
}

double loglog_decay_slope(const Vector& eigenvalues, int max_count, double floor) {
  Vector sorted = eigenvalues;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
  std::vector<double> lx, ly;
  for (Eigen::Index i = 0; i < sorted.size() && static_cast<int>(lx.size()) < max_count; ++i) {
    if (sorted[i] <= floor) break;
    lx.push_back(std::log(static_cast<double>(i + 1)));
    ly.push_back(std::log(sorted[i]));
  }
  const std::size_t m = lx.size();
  if (m < 2) throw NumericalError("loglog_decay_slope: fewer than 2 eigenvalues above floor");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (denom <= 0.0) throw NumericalError("loglog_decay_slope: degenerate rank axis");
  return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

double delta2_convergence_median(const kernels::KernelSpec& spec, const Box& box, int n,
                                 int resamples, std::uint64_t seed0) {
  if (resamples < 1) throw ConfigError("delta2_convergence_median: resamples must be >= 1");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    const auto small = empirical_spectrum(spec, box, n, seed0 + 2 * static_cast<std::uint64_t>(r));
    const auto big =
        empirical_spectrum(spec, box, 2 * n, seed0 + 2 * static_cast<std::uint64_t>(r) + 1);
    dists.push_back(delta2(small, big));
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t mid = dists.size() / 2;
  if (dists.size() % 2 == 1) return dists[mid];
  return 0.5 * (dists[mid - 1] + dists[mid]);
}

}  // namespace invbo::spectra
