#pragma once

// Empirical eigendecay diagnostics: normalized Gram spectra on sampled
// points, reduced-domain comparison spectra, the delta_2 spectral distance,
// Schatten norms, and log-log decay-slope fits.

#include "invbo/common.hpp"
#include "invbo/kernels.hpp"

#include <cstdint>
#include <string>

namespace invbo::spectra {

struct SpectrumReport {
  std::string kernel_id;  // "<family>/<mode>"
  std::string domain_id;
  int n = 0;
  Vector eigenvalues;  // K/n spectrum, nonincreasing, length n
  std::uint64_t seed = 0;
};

// Draws n iid uniform points in the box, assembles the mode's Gram (plus mode
// projects on those same points), divides by n, returns the ordered spectrum.
SpectrumReport empirical_spectrum(const kernels::KernelSpec& spec, const Box& box, int n,
                                  std::uint64_t seed);

// Sub-box with volume vol(box)/group_order: every side shrunk by
// group_order^(-1/d), anchored at the lower corner.
Box reduced_box(const Box& box, std::uint64_t group_order);

// Plain (non-invariant) spectrum of the base kernel underlying `spec` on the
// reduced box; the comparison target for invariant-mode spectra on the full box.
SpectrumReport reduced_domain_spectrum(const kernels::KernelSpec& spec, const Box& box,
                                       std::uint64_t group_order, int n, std::uint64_t seed);

// l2 distance of the two eigenvalue lists after zero-padding the shorter to
// common length and sorting both nonincreasing.
double delta2(const Vector& a, const Vector& b);
double delta2(const SpectrumReport& a, const SpectrumReport& b);

// lp norm of the eigenvalue magnitudes of (K + K^T)/2; p in {1, 2, inf}.
double schatten_norm(const Matrix& K, double p);

// Least-squares slope of log(lambda_i) against log(rank i) over the top
// max_count eigenvalues above the floor. Needs at least two usable entries.
double loglog_decay_slope(const Vector& eigenvalues, int max_count = 100,
                          double floor = 1e-12);

// Median over `resamples` independent draws of
// delta2(spectrum at n, spectrum at 2n); decreases as n grows.
double delta2_convergence_median(const kernels::KernelSpec& spec, const Box& box, int n,
                                 int resamples, std::uint64_t seed0);

}  // namespace invbo::spectra
