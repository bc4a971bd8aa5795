#include "invbo/common.hpp"

#include <cmath>

namespace invbo {

Box::Box(Vector lo_in, Vector hi_in) : lo(std::move(lo_in)), hi(std::move(hi_in)) {
  if (lo.size() != hi.size()) throw DimensionError("Box: lo/hi dimension mismatch");
  for (int i = 0; i < dim(); ++i) {
    if (!(lo[i] <= hi[i])) throw DimensionError("Box: lo > hi in coordinate " + std::to_string(i));
  }
}

Box Box::cube(int dim, double lo, double hi) {
  return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  }
  return true;
}

Vector Box::clamp(const Vector& x) const {
  if (x.size() != lo.size()) throw DimensionError("Box::clamp: dimension mismatch");
  Vector out(x.size());
  for (int i = 0; i < dim(); ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  return out;
}

}  // namespace invbo
