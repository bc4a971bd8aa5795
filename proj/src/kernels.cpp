#include "invbo/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace invbo::kernels {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt5 = 2.2360679774997896964;

void check_pair(const KernelSpec& spec, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("kernel: argument dimension mismatch");
  if (!(spec.lengthscale > 0.0) || !(spec.signal_variance > 0.0)) {
    throw NumericalError("kernel: lengthscale and signal variance must be positive");
  }
}

const groups::GroupAction& require_group(const KernelSpec& spec) {
  if (!spec.group) throw UnsupportedGroupError("kernel: invariant mode requires a group");
  return *spec.group;
}

}  // namespace

Family parse_family(const std::string& s) {
  if (s == "rbf") return Family::kRbf;
  if (s == "matern32") return Family::kMatern32;
  if (s == "matern52") return Family::kMatern52;
  throw ConfigError("unknown kernel family: " + s);
}

Mode parse_mode(const std::string& s) {
  if (s == "base") return Mode::kBase;
  if (s == "avg") return Mode::kAvg;
  if (s == "max") return Mode::kMax;
  if (s == "plus") return Mode::kPlus;
  throw ConfigError("unknown kernel mode: " + s);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::kRbf: return "rbf";
    case Family::kMatern32: return "matern32";
    case Family::kMatern52: return "matern52";
  }
  return "?";
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kBase: return "base";
    case Mode::kAvg: return "avg";
    case Mode::kMax: return "max";
    case Mode::kPlus: return "plus";
  }
  return "?";
}

KernelSpec::KernelSpec(Family f, double l, double sv, Mode m, std::optional<groups::GroupAction> g)
    : family(f), lengthscale(l), signal_variance(sv), mode(m), group(std::move(g)) {
  if (!(l > 0.0)) throw ConfigError("KernelSpec: lengthscale must be positive");
  if (!(sv > 0.0)) throw ConfigError("KernelSpec: signal variance must be positive");
  if (mode != Mode::kBase && !group)
    throw ConfigError("KernelSpec: invariant modes require a group");
}

namespace detail {

double i0e(double z) {
  z = std::abs(z);
  if (z < 20.0) {
    // I0 power series, all terms positive, then scale by exp(-z).
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * static_cast<double>(k));
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::exp(-z) * sum;
  }
  // Asymptotic series: I0(z) ~ e^z / sqrt(2 pi z) * sum_k t_k with
  // t_0 = 1, t_k = t_{k-1} (2k-1)^2 / (8 k z). Truncated at the smallest term.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 30; ++k) {
    const double m = 2.0 * k - 1.0;
    const double next = term * (m * m) / (8.0 * k * z);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

double radial_profile(Family family, double r, double lengthscale) {
  switch (family) {
    case Family::kRbf: {
      const double u = r / lengthscale;
      return std::exp(-0.5 * u * u);
    }
    case Family::kMatern32: {
      const double t = kSqrt3 * r / lengthscale;
      return (1.0 + t) * std::exp(-t);
    }
    case Family::kMatern52: {
      const double t = kSqrt5 * r / lengthscale;
      return (1.0 + t + t * t / 3.0) * std::exp(-t);
    }
  }
  return 0.0;
}

}  // namespace detail

double eval_base(const KernelSpec& spec, const Vector& x, const Vector& y) {
  check_pair(spec, x, y);
  return spec.signal_variance * detail::radial_profile(spec.family, (x - y).norm(), spec.lengthscale);
}

double eval_avg(const KernelSpec& spec, const Vector& x, const Vector& y) {
  check_pair(spec, x, y);
  const auto& group = require_group(spec);
  if (static_cast<int>(x.size()) != group.dim()) {
    throw DimensionError("eval_avg: point dimension does not match the group");
  }
  switch (group.kind()) {
    case groups::GroupKind::kPlanarRotations: {
      if (spec.family != Family::kRbf) {
        throw UnsupportedGroupError("eval_avg: rotations closed form requires the RBF base");
      }
      const double r = x.norm(), s = y.norm();
      const double l2 = spec.lengthscale * spec.lengthscale;
      const double gap = (r - s) / spec.lengthscale;
      return spec.signal_variance * std::exp(-0.5 * gap * gap) * detail::i0e(r * s / l2);
    }
    case groups::GroupKind::kScalings: {
      const Vector fx = groups::canonical_feature(group, x);
      const Vector fy = groups::canonical_feature(group, y);
      return spec.signal_variance *
             detail::radial_profile(spec.family, (fx - fy).norm(), spec.lengthscale);
    }
    default: {
      if (group.isometric()) {
        std::vector<double> d2;
        groups::orbit_sq_distances(group, x, y, d2);
        double acc = 0.0;
        for (double v : d2) {
          acc += detail::radial_profile(spec.family, std::sqrt(v), spec.lengthscale);
        }
        return spec.signal_variance * acc / static_cast<double>(d2.size());
      }
      // Non-isometric finite action: full double sum over orbit pairings.
      const auto& elems = group.elements();
      const int d = group.dim();
      Vector gx(d), gy(d);
      double acc = 0.0;
      for (const auto& g : elems) {
        groups::apply_into(g, x.data(), d, gx.data());
        for (const auto& h : elems) {
          groups::apply_into(h, y.data(), d, gy.data());
          acc += detail::radial_profile(spec.family, (gx - gy).norm(), spec.lengthscale);
        }
      }
      const double m = static_cast<double>(elems.size());
      return spec.signal_variance * acc / (m * m);
    }
  }
}

double eval_max(const KernelSpec& spec, const Vector& x, const Vector& y) {
  check_pair(spec, x, y);
  const auto& group = require_group(spec);
  if (static_cast<int>(x.size()) != group.dim()) {
    throw DimensionError("eval_max: point dimension does not match the group");
  }
  switch (group.kind()) {
    case groups::GroupKind::kScalings: {
      const Vector fx = groups::canonical_feature(group, x);
      const Vector fy = groups::canonical_feature(group, y);
      return spec.signal_variance *
             detail::radial_profile(spec.family, (fx - fy).norm(), spec.lengthscale);
    }
    default: {
      // kappa is monotone nonincreasing, so the best alignment is the
      // orbit-min distance (rotations included: min gap is ||x|-|y||).
      const double d2 = groups::orbit_min_sq_distance(group, x, y);
      return spec.signal_variance *
             detail::radial_profile(spec.family, std::sqrt(d2), spec.lengthscale);
    }
  }
}

double eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  switch (spec.mode) {
    case Mode::kBase: return eval_base(spec, x, y);
    case Mode::kAvg: return eval_avg(spec, x, y);
    case Mode::kMax: return eval_max(spec, x, y);
    case Mode::kPlus:
      throw ConfigError("eval: plus mode is design-dependent; build a ProjectedKernel");
  }
  return 0.0;
}

Matrix gram(const KernelSpec& spec, const Matrix& X) {
  const int n = static_cast<int>(X.rows());
  if (n < 1) throw DimensionError("gram: need at least one point");
  Matrix K(n, n);
  for (int i = 0; i < n; ++i) {
    const Vector xi = X.row(i).transpose();
    for (int j = i; j < n; ++j) {
      const double v = eval(spec, xi, X.row(j).transpose());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

GramProfile::GramProfile(Mode mode, const std::optional<groups::GroupAction>& group,
                         const Matrix& X)
    : mode_(mode), n_(static_cast<int>(X.rows())) {
  if (n_ < 1) throw DimensionError("GramProfile: need at least one point");
  const bool invariant = mode != Mode::kBase;
  if (invariant && !group) throw ConfigError("GramProfile: invariant mode needs a group");

  if (mode == Mode::kBase) {
    pair_dist_.resize(n_, n_);
    for (int i = 0; i < n_; ++i) {
      pair_dist_(i, i) = 0.0;
      for (int j = i + 1; j < n_; ++j) {
        const double r = (X.row(i) - X.row(j)).norm();
        pair_dist_(i, j) = r;
        pair_dist_(j, i) = r;
      }
    }
    return;
  }

  const groups::GroupAction& g = *group;
  if (static_cast<int>(X.cols()) != g.dim()) {
    throw DimensionError("GramProfile: point dimension does not match the group");
  }

  if (mode == Mode::kMax || mode == Mode::kPlus) {
    pair_dist_.resize(n_, n_);
    for (int i = 0; i < n_; ++i) {
      const Vector xi = X.row(i).transpose();
      for (int j = i; j < n_; ++j) {
        const double r = std::sqrt(groups::orbit_min_sq_distance(g, xi, X.row(j).transpose()));
        pair_dist_(i, j) = r;
        pair_dist_(j, i) = r;
      }
    }
    return;
  }

  // kAvg
  switch (g.kind()) {
    case groups::GroupKind::kPlanarRotations: {
      norms_.resize(n_);
      for (int i = 0; i < n_; ++i) norms_[i] = X.row(i).norm();
      return;
    }
    case groups::GroupKind::kScalings: {
      Matrix F(n_, g.dim());
      for (int i = 0; i < n_; ++i) {
        F.row(i) = groups::canonical_feature(g, X.row(i).transpose()).transpose();
      }
      pair_dist_.resize(n_, n_);
      for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
          const double r = (F.row(i) - F.row(j)).norm();
          pair_dist_(i, j) = r;
          pair_dist_(j, i) = r;
        }
      }
      return;
    }
    default: {
      order_ = *g.cardinality();
      const std::size_t pairs = static_cast<std::size_t>(n_) * (n_ + 1) / 2;
      const std::size_t total = pairs * static_cast<std::size_t>(order_);
      if (total > std::size_t{200000000}) {
        throw NumericalError("GramProfile: orbit distance table too large");
      }
      orbit_dists_.resize(total);
      std::vector<double> scratch;
      std::size_t at = 0;
      for (int i = 0; i < n_; ++i) {
        const Vector xi = X.row(i).transpose();
        for (int j = i; j < n_; ++j) {
          groups::orbit_sq_distances(g, xi, X.row(j).transpose(), scratch);
          for (double v : scratch) orbit_dists_[at++] = std::sqrt(v);
        }
      }
      return;
    }
  }
}

Matrix GramProfile::gram(Family family, double signal_variance, double lengthscale) const {
  Matrix K(n_, n_);
  if (pair_dist_.size() > 0) {
    // base, max/plus, and the scalings average: one distance per pair.
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        const double v =
            signal_variance * detail::radial_profile(family, pair_dist_(i, j), lengthscale);
        K(i, j) = v;
        K(j, i) = v;
      }
    }
    return K;
  }
  if (norms_.size() > 0) {
    // Rotations average: RBF closed form.
    if (family != Family::kRbf) {
      throw UnsupportedGroupError("GramProfile: rotations average requires the RBF base");
    }
    const double l2 = lengthscale * lengthscale;
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        const double gap = (norms_[i] - norms_[j]) / lengthscale;
        const double v = signal_variance * std::exp(-0.5 * gap * gap) *
                         detail::i0e(norms_[i] * norms_[j] / l2);
        K(i, j) = v;
        K(j, i) = v;
      }
    }
    return K;
  }
  // Finite-group average from the packed orbit distance table.
  const double inv = 1.0 / static_cast<double>(order_);
  std::size_t at = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      double acc = 0.0;
      for (std::uint64_t k = 0; k < order_; ++k) {
        acc += detail::radial_profile(family, orbit_dists_[at + k], lengthscale);
      }
      at += static_cast<std::size_t>(order_);
      const double v = signal_variance * acc * inv;
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

}  // namespace invbo::kernels
