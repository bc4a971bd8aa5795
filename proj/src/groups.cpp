#include "invbo/groups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

namespace invbo::groups {

namespace {

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// Sign masks in lexicographic order over the sign tuple, '+' before '-':
// coordinate 0 is the most significant position.
std::vector<int> mask_to_signs(std::uint64_t mask, int dim) {
  std::vector<int> signs(dim);
  for (int i = 0; i < dim; ++i) {
    signs[i] = ((mask >> (dim - 1 - i)) & 1u) ? -1 : 1;
  }
  return signs;
}

}  // namespace

struct GroupAction::ElementCache {
  std::once_flag built;
  std::vector<GroupElement> elements;
};

GroupAction::GroupAction(GroupKind kind, int dim, int blocks, int block_size)
    : kind_(kind), dim_(dim), blocks_(blocks), block_size_(block_size),
      cache_(std::make_shared<ElementCache>()) {}

GroupAction GroupAction::hyperoctahedral(int dim) {
  if (dim < 1) throw DimensionError("hyperoctahedral: dim must be >= 1");
  if (dim > 12) throw UnsupportedGroupError("hyperoctahedral: dim too large to enumerate");
  return GroupAction(GroupKind::kHyperoctahedral, dim, 0, 0);
}

GroupAction GroupAction::sign_flips(int dim) {
  if (dim < 1) throw DimensionError("sign_flips: dim must be >= 1");
  if (dim > 24) throw UnsupportedGroupError("sign_flips: dim too large to enumerate");
  return GroupAction(GroupKind::kSignFlips, dim, 0, 0);
}

GroupAction GroupAction::block_permutations(int blocks, int block_size) {
  if (blocks < 1 || block_size < 1) {
    throw DimensionError("block_permutations: blocks and block_size must be >= 1");
  }
  if (blocks > 12) throw UnsupportedGroupError("block_permutations: too many blocks to enumerate");
  return GroupAction(GroupKind::kBlockPermutations, blocks * block_size, blocks, block_size);
}

GroupAction GroupAction::planar_rotations() {
  return GroupAction(GroupKind::kPlanarRotations, 2, 0, 0);
}

GroupAction GroupAction::scalings() { return GroupAction(GroupKind::kScalings, 2, 0, 0); }

GroupAction GroupAction::parse(const std::string& name, int dim) {
  if (name == "hyperoctahedral") return hyperoctahedral(dim);
  if (name == "signflips") return sign_flips(dim);
  if (name == "permutations") {
    if (dim % 2 != 0) throw ConfigError("permutations: dim must be even (blocks of size 2)");
    return block_permutations(dim / 2, 2);
  }
  if (name == "rotations2d") {
    if (dim != 2) throw ConfigError("rotations2d: dim must be 2");
    return planar_rotations();
  }
  if (name == "scalings2d") {
    if (dim != 2) throw ConfigError("scalings2d: dim must be 2");
    return scalings();
  }
  throw ConfigError("unknown group name: " + name);
}

bool GroupAction::finite() const {
  return kind_ != GroupKind::kPlanarRotations && kind_ != GroupKind::kScalings;
}

std::optional<std::uint64_t> GroupAction::cardinality() const {
  switch (kind_) {
    case GroupKind::kHyperoctahedral:
      return (std::uint64_t{1} << dim_) * factorial(dim_);
    case GroupKind::kSignFlips:
      return std::uint64_t{1} << dim_;
    case GroupKind::kBlockPermutations:
      return factorial(blocks_);
    case GroupKind::kPlanarRotations:
    case GroupKind::kScalings:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string GroupAction::name() const {
  switch (kind_) {
    case GroupKind::kHyperoctahedral: return "hyperoctahedral";
    case GroupKind::kSignFlips: return "signflips";
    case GroupKind::kBlockPermutations: return "permutations";
    case GroupKind::kPlanarRotations: return "rotations2d";
    case GroupKind::kScalings: return "scalings2d";
  }
  return "?";
}

const std::vector<GroupElement>& GroupAction::elements() const {
  if (!finite()) {
    throw UnsupportedGroupError("elements(): " + name() + " is not finite");
  }
  std::call_once(cache_->built, [this] {
    auto& out = cache_->elements;
    switch (kind_) {
      case GroupKind::kHyperoctahedral: {
        out.reserve(static_cast<std::size_t>(*cardinality()));
        std::vector<int> perm(dim_);
        std::iota(perm.begin(), perm.end(), 0);
        const std::uint64_t n_masks = std::uint64_t{1} << dim_;
        do {
          for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
            out.push_back(PermSignFlip{perm, mask_to_signs(mask, dim_)});
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
        break;
      }
      case GroupKind::kSignFlips: {
        const std::uint64_t n_masks = std::uint64_t{1} << dim_;
        out.reserve(static_cast<std::size_t>(n_masks));
        for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
          out.push_back(SignFlip{mask_to_signs(mask, dim_)});
        }
        break;
      }
      case GroupKind::kBlockPermutations: {
        out.reserve(static_cast<std::size_t>(*cardinality()));
        std::vector<int> block_perm(blocks_);
        std::iota(block_perm.begin(), block_perm.end(), 0);
        do {
          std::vector<int> full(dim_);
          for (int k = 0; k < block_size_; ++k) {
            for (int i = 0; i < blocks_; ++i) {
              full[k * blocks_ + i] = k * blocks_ + block_perm[i];
            }
          }
          out.push_back(Permutation{std::move(full)});
        } while (std::next_permutation(block_perm.begin(), block_perm.end()));
        break;
      }
      default:
        break;
    }
  });
  return cache_->elements;
}

Vector apply(const GroupElement& g, const Vector& x) {
  Vector out(x.size());
  apply_into(g, x.data(), static_cast<int>(x.size()), out.data());
  return out;
}

void apply_into(const GroupElement& g, const double* x, int dim, double* out) {
  struct Visitor {
    const double* x;
    int dim;
    double* out;

    void operator()(const PermSignFlip& e) const {
      if (static_cast<int>(e.perm.size()) != dim) throw DimensionError("apply: dim mismatch");
      for (int i = 0; i < dim; ++i) out[i] = e.signs[i] * x[e.perm[i]];
    }
    void operator()(const Permutation& e) const {
      if (static_cast<int>(e.perm.size()) != dim) throw DimensionError("apply: dim mismatch");
      for (int i = 0; i < dim; ++i) out[i] = x[e.perm[i]];
    }
    void operator()(const SignFlip& e) const {
      if (static_cast<int>(e.signs.size()) != dim) throw DimensionError("apply: dim mismatch");
      for (int i = 0; i < dim; ++i) out[i] = e.signs[i] * x[i];
    }
    void operator()(const Rotation2d& e) const {
      if (dim != 2) throw DimensionError("apply: rotation needs dim 2");
      const double c = std::cos(e.angle), s = std::sin(e.angle);
      const double x0 = x[0], x1 = x[1];
      out[0] = c * x0 - s * x1;
      out[1] = s * x0 + c * x1;
    }
    void operator()(const Scaling2d& e) const {
      if (dim != 2) throw DimensionError("apply: scaling needs dim 2");
      out[0] = e.factor * x[0];
      out[1] = e.factor * x[1];
    }
  };
  std::visit(Visitor{x, dim, out}, g);
}

Vector canonical_feature(const GroupAction& action, const Vector& x) {
  switch (action.kind()) {
    case GroupKind::kPlanarRotations: {
      Vector f(1);
      f[0] = x.norm();
      return f;
    }
    case GroupKind::kScalings: {
      const double n = x.norm();
      if (n == 0.0) return Vector::Zero(x.size());
      return x / n;
    }
    default:
      throw UnsupportedGroupError("canonical_feature: " + action.name() +
                                  " has no canonical feature map");
  }
}

double orbit_min_sq_distance(const GroupAction& action, const Vector& x, const Vector& y) {
  if (x.size() != y.size() || static_cast<int>(x.size()) != action.dim()) {
    throw DimensionError("orbit_min_sq_distance: dimension mismatch");
  }
  switch (action.kind()) {
    case GroupKind::kPlanarRotations: {
      const double d = x.norm() - y.norm();
      return d * d;
    }
    case GroupKind::kScalings: {
      return (canonical_feature(action, x) - canonical_feature(action, y)).squaredNorm();
    }
    default: {
      const int d = action.dim();
      double best = std::numeric_limits<double>::infinity();
      double buf[64];
      std::vector<double> heap;
      double* gy = buf;
      if (d > 64) {
        heap.resize(static_cast<std::size_t>(d));
        gy = heap.data();
      }
      for (const auto& g : action.elements()) {
        apply_into(g, y.data(), d, gy);
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          const double t = x[i] - gy[i];
          s += t * t;
        }
        best = std::min(best, s);
      }
      return best;
    }
  }
}

void orbit_sq_distances(const GroupAction& action, const Vector& x, const Vector& y,
                        std::vector<double>& out) {
  if (!action.finite()) {
    throw UnsupportedGroupError("orbit_sq_distances: " + action.name() + " is not finite");
  }
  if (x.size() != y.size() || static_cast<int>(x.size()) != action.dim()) {
    throw DimensionError("orbit_sq_distances: dimension mismatch");
  }
  const int d = action.dim();
  const auto& elems = action.elements();
  out.resize(elems.size());
  double buf[64];
  std::vector<double> heap;
  double* gy = buf;
  if (d > 64) {
    heap.resize(static_cast<std::size_t>(d));
    gy = heap.data();
  }
  for (std::size_t k = 0; k < elems.size(); ++k) {
    apply_into(elems[k], y.data(), d, gy);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double t = x[i] - gy[i];
      s += t * t;
    }
    out[k] = s;
  }
}

}  // namespace invbo::groups
