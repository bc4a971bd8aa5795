#pragma once

// Symmetry groups acting linearly on R^d: finite signed-permutation families
// plus the two continuous actions (planar rotations, positive scalings).

#include "invbo/common.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace invbo::groups {

// y[i] = signs[i] * x[perm[i]]
struct PermSignFlip {
  std::vector<int> perm;
  std::vector<int> signs;
};

// y[i] = x[perm[i]]
struct Permutation {
  std::vector<int> perm;
};

// y[i] = signs[i] * x[i]
struct SignFlip {
  std::vector<int> signs;
};

// Rotation of R^2 by angle (radians).
struct Rotation2d {
  double angle;
};

// x -> factor * x on R^2, factor > 0.
struct Scaling2d {
  double factor;
};

using GroupElement = std::variant<PermSignFlip, Permutation, SignFlip, Rotation2d, Scaling2d>;

enum class GroupKind {
  kHyperoctahedral,    // signed permutations, |G| = 2^d d!
  kSignFlips,          // coordinate sign changes, |G| = 2^d
  kBlockPermutations,  // m blocks of size b permuted jointly, |G| = m!
  kPlanarRotations,    // SO(2), infinite
  kScalings,           // positive scalings of R^2, infinite, non-isometric
};

class GroupAction {
 public:
  static GroupAction hyperoctahedral(int dim);
  static GroupAction sign_flips(int dim);
  // Acts on R^(blocks*block_size) laid out component-major: coordinate
  // k*blocks + i is component k of block i, so permuting blocks moves the
  // tuples (x_i, y_i, ...) jointly.
  static GroupAction block_permutations(int blocks, int block_size);
  static GroupAction planar_rotations();
  static GroupAction scalings();

  // Config key -> action; "permutations" assumes blocks of size 2 (dim/2 blocks).
  static GroupAction parse(const std::string& name, int dim);

  GroupKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool finite() const;
  bool isometric() const { return kind_ != GroupKind::kScalings; }
  // Element count; nullopt for continuous groups.
  std::optional<std::uint64_t> cardinality() const;
  std::string name() const;

  int blocks() const { return blocks_; }
  int block_size() const { return block_size_; }

  // Finite groups only. Order: identity first, lexicographic in
  // (permutation, sign mask) with '+' before '-'. Built once, cached.
  const std::vector<GroupElement>& elements() const;

 private:
  GroupAction(GroupKind kind, int dim, int blocks, int block_size);

  GroupKind kind_;
  int dim_;
  int blocks_ = 0;
  int block_size_ = 0;

  struct ElementCache;
  std::shared_ptr<ElementCache> cache_;
};

Vector apply(const GroupElement& g, const Vector& x);

// No-allocation form for hot loops; out must not alias x.
void apply_into(const GroupElement& g, const double* x, int dim, double* out);

// Orbit-constant feature for the continuous actions: rotations -> [|x|_2],
// scalings -> x/|x|_2 (zero vector stays zero). Finite groups are unsupported.
Vector canonical_feature(const GroupAction& action, const Vector& x);

// min over the orbit pairing of |x - g x'|^2. Finite isometric groups reduce
// to a single loop; rotations give (|x|-|x'|)^2; scalings use the squared
// distance of the unit-ray features.
double orbit_min_sq_distance(const GroupAction& action, const Vector& x, const Vector& y);

// All |x - g_k x'|^2 in elements() order; finite isometric groups only.
void orbit_sq_distances(const GroupAction& action, const Vector& x, const Vector& y,
                        std::vector<double>& out);

}  // namespace invbo::groups
