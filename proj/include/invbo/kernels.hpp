#pragma once

// Base kernels (RBF, Matern-3/2, Matern-5/2) and the two orbit-level
// invariant constructions: the orbit average k_avg and the max-alignment
// kernel k_max, with closed forms for the continuous groups.

#include "invbo/common.hpp"
#include "invbo/groups.hpp"

#include <optional>
#include <string>
#include <vector>

namespace invbo::kernels {

enum class Family { kRbf, kMatern32, kMatern52 };
enum class Mode { kBase, kAvg, kMax, kPlus };

Family parse_family(const std::string& s);
Mode parse_mode(const std::string& s);
std::string to_string(Family f);
std::string to_string(Mode m);

struct KernelSpec {
  Family family = Family::kRbf;
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  Mode mode = Mode::kBase;
  std::optional<groups::GroupAction> group;  // required for avg/max/plus

  KernelSpec() = default;
  KernelSpec(Family f, double l, double sv, Mode m = Mode::kBase,
             std::optional<groups::GroupAction> g = std::nullopt);
};

namespace detail {

// Exponentially scaled modified Bessel function exp(-z) I0(z). Power series
// below z = 20, asymptotic series above; relative error < 1e-10 on the switch.
double i0e(double z);

// Unit-variance radial profile kappa(r); monotone nonincreasing in r >= 0.
double radial_profile(Family family, double r, double lengthscale);

}  // namespace detail

double eval_base(const KernelSpec& spec, const Vector& x, const Vector& y);

// (1/|G|^2) sum over g,g' of k_b(gx, g'y); single sum (1/|G|) sum_g k_b(x, gy)
// for isometric groups. Rotations: lambda exp(-(r-s)^2/2l^2) e^{-rs/l^2}I0(rs/l^2)
// (RBF only). Scalings: base kernel on unit-ray features.
double eval_avg(const KernelSpec& spec, const Vector& x, const Vector& y);

// max over orbit pairings of k_b; single loop for isometric groups, kappa of
// the norm gap for rotations, base kernel on unit-ray features for scalings.
double eval_max(const KernelSpec& spec, const Vector& x, const Vector& y);

// Dispatch on spec.mode; kPlus has design-dependent state and must go through
// psd::ProjectedKernel instead.
double eval(const KernelSpec& spec, const Vector& x, const Vector& y);

// Symmetric Gram; entry (i,j) computed once per unordered pair. X rows = points.
Matrix gram(const KernelSpec& spec, const Matrix& X);

// Hyperparameter-independent pairwise orbit geometry of a fixed point set,
// letting the fitter re-evaluate Grams at many (lambda, l) cheaply. For kPlus
// the profiled Gram is the pre-projection kMax Gram.
class GramProfile {
 public:
  GramProfile(Mode mode, const std::optional<groups::GroupAction>& group, const Matrix& X);

  int size() const { return n_; }
  Mode mode() const { return mode_; }

  Matrix gram(Family family, double signal_variance, double lengthscale) const;

 private:
  Mode mode_;
  int n_ = 0;
  std::uint64_t order_ = 1;          // |G| for finite-avg normalization
  Matrix pair_dist_;                 // base: |xi-xj|; max/plus: orbit-min; scalings-avg: ray gap
  std::vector<double> orbit_dists_;  // finite avg: packed upper triangle, |G| per pair
  Vector norms_;                     // rotations avg: per-point norms
};

}  // namespace invbo::kernels
