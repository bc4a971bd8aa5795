#pragma once

// Shared primitives: axis-aligned domains, a deterministic RNG, error types.

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace invbo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Axis-aligned box domain [lo_1,hi_1] x ... x [lo_d,hi_d].
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lo_in, Vector hi_in);

  static Box cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  double width(int i) const { return hi[i] - lo[i]; }
  // Euclidean length of the main diagonal.
  double diagonal() const { return (hi - lo).norm(); }
  double volume() const;
  bool contains(const Vector& x, double tol = 0.0) const;
  Vector clamp(const Vector& x) const;
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Operation asked of a group that cannot support it (finite-only op on a
// continuous group, unsupported base-kernel/group combination, ...).
class UnsupportedGroupError : public std::logic_error {
 public:
  explicit UnsupportedGroupError(const std::string& what) : std::logic_error(what) {}
};

// Linear system could not be factorized even after jitter escalation.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic RNG. The engine (mt19937_64) is fully pinned by the standard;
// the distribution transforms are implemented here because the standard leaves
// std::uniform_real_distribution / std::normal_distribution algorithms open,
// and traces must be reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1): 53 mantissa bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller; one spare kept.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vector uniform_in(const Box& box) {
    Vector x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i], box.hi[i]);
    return x;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace invbo
