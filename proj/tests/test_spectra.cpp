#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "invbo/common.hpp"
#include "invbo/groups.hpp"
#include "invbo/kernels.hpp"
#include "invbo/psd_nystrom.hpp"
#include "invbo/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

using namespace invbo;
using namespace invbo::spectra;
using invbo::groups::GroupAction;
using invbo::kernels::Family;
using invbo::kernels::KernelSpec;
using invbo::kernels::Mode;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix random_symmetric(Rng& rng, int n, double scale) {
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-scale, scale);
  return Matrix(0.5 * (A + A.transpose()));
}

Vector eigs_sorted_desc(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
  Vector v = es.eigenvalues();
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// empirical_spectrum.

TEST_CASE("single-point spectrum is the diagonal value over n") {
  KernelSpec spec(Family::kRbf, 1.0, 2.5);
  const Box box = Box::cube(2, -1.0, 1.0);
  const SpectrumReport rep = empirical_spectrum(spec, box, 1, 7);
  REQUIRE(rep.n == 1);
  REQUIRE(rep.eigenvalues.size() == 1);
  CHECK(rep.eigenvalues[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(rep.kernel_id == "rbf/base");
  CHECK(rep.seed == 7);
}

TEST_CASE("spectrum is nonincreasing, deterministic in the seed, trace-consistent") {
  KernelSpec spec(Family::kMatern52, 1.5, 1.0);
  const Box box = Box::cube(3, -2.0, 2.0);
  const SpectrumReport a = empirical_spectrum(spec, box, 40, 3);
  const SpectrumReport b = empirical_spectrum(spec, box, 40, 3);
  CHECK((a.eigenvalues - b.eigenvalues).norm() == 0.0);
  for (int i = 1; i < 40; ++i) CHECK(a.eigenvalues[i] <= a.eigenvalues[i - 1] + 1e-15);
  // Base kernels: PSD Gram, eigenvalues nonnegative; trace of K/n is the
  // mean diagonal = signal variance.
  CHECK(a.eigenvalues.minCoeff() >= -1e-10);
  CHECK(a.eigenvalues.sum() == doctest::Approx(1.0).epsilon(1e-10));
  const SpectrumReport c = empirical_spectrum(spec, box, 40, 4);
  CHECK((a.eigenvalues - c.eigenvalues).norm() > 0.0);
}

TEST_CASE("max-alignment spectrum on block permutations exhibits a negative eigenvalue") {
  // Frozen indefiniteness exhibit: the pre-projection max kernel at long
  // lengthscale on the 8-d block-permutation domain.
  const auto g = GroupAction::block_permutations(4, 2);
  KernelSpec spec(Family::kRbf, 70.0, 1.0, Mode::kMax, g);
  const Box box = Box::cube(8, -50.0, 50.0);
  const SpectrumReport rep = empirical_spectrum(spec, box, 60, 1);
  CHECK(rep.eigenvalues.minCoeff() < -1e-4);
  CHECK(rep.kernel_id == "rbf/max");
}

TEST_CASE("plus-mode spectrum clips the max-mode negatives on the same draw") {
  const auto g = GroupAction::block_permutations(4, 2);
  const Box box = Box::cube(8, -50.0, 50.0);
  KernelSpec mx(Family::kRbf, 70.0, 1.0, Mode::kMax, g);
  KernelSpec plus(Family::kRbf, 70.0, 1.0, Mode::kPlus, g);
  const SpectrumReport rm = empirical_spectrum(mx, box, 60, 1);
  const SpectrumReport rp = empirical_spectrum(plus, box, 60, 1);
  CHECK(rp.eigenvalues.minCoeff() >= -1e-12);
  // Positive part of the spectrum is untouched by clipping.
  const int keep = 10;
  for (int i = 0; i < keep; ++i)
    CHECK(rp.eigenvalues[i] == doctest::Approx(rm.eigenvalues[i]).epsilon(1e-9));
  // Clipped-away mass: plus spectrum dominates max spectrum entrywise.
  for (int i = 0; i < 60; ++i) CHECK(rp.eigenvalues[i] >= rm.eigenvalues[i] - 1e-12);
}

TEST_CASE("invariant-mode spectra concentrate mass in fewer eigenvalues") {
  // The orbit-averaged kernel on sign flips must put more of the trace into
  // its top eigenvalues than the base kernel on the same draw.
  const auto g = GroupAction::sign_flips(3);
  const Box box = Box::cube(3, -3.0, 3.0);
  KernelSpec base(Family::kRbf, 1.0, 1.0);
  KernelSpec avg(Family::kRbf, 1.0, 1.0, Mode::kAvg, g);
  const SpectrumReport rb = empirical_spectrum(base, box, 120, 5);
  const SpectrumReport ra = empirical_spectrum(avg, box, 120, 5);
  const int top = 12;
  CHECK(ra.eigenvalues.head(top).sum() / ra.eigenvalues.sum() >
        rb.eigenvalues.head(top).sum() / rb.eigenvalues.sum());
}

// ---------------------------------------------------------------------------
// reduced_box.

TEST_CASE("reduced box shrinks each side by the order root, corner anchored") {
  const Box box = Box::cube(1, -1.0, 1.0);
  const Box half = reduced_box(box, 2);
  CHECK(half.lo[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(half.hi[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const Box box2 = Box::cube(2, 0.0, 4.0);
  const Box quarter = reduced_box(box2, 4);
  // Each side scales by 4^(-1/2) = 1/2: volume 16 -> 4.
  CHECK(quarter.hi[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quarter.hi[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quarter.volume() == doctest::Approx(box2.volume() / 4.0).epsilon(1e-10));

  // Order 1: unchanged.
  const Box same = reduced_box(box2, 1);
  CHECK((same.hi - box2.hi).norm() == 0.0);
  CHECK((same.lo - box2.lo).norm() == 0.0);

  const Box b8 = Box::cube(8, -50.0, 50.0);
  const Box r24 = reduced_box(b8, 24);
  CHECK(r24.volume() == doctest::Approx(b8.volume() / 24.0).epsilon(1e-8));
  for (int j = 0; j < 8; ++j) CHECK(r24.lo[j] == -50.0);
}

TEST_CASE("reduced-domain spectrum uses the plain base kernel and tags the domain") {
  const auto g = GroupAction::sign_flips(2);
  KernelSpec avg(Family::kRbf, 1.0, 1.0, Mode::kAvg, g);
  const Box box = Box::cube(2, -2.0, 2.0);
  const SpectrumReport red = reduced_domain_spectrum(avg, box, 4, 30, 11);
  CHECK(red.kernel_id == "rbf/base");
  CHECK(red.domain_id.find("order4") != std::string::npos);
  // Matches an explicit base spectrum on the shrunken box with the same seed.
  KernelSpec base(Family::kRbf, 1.0, 1.0);
  const SpectrumReport want = empirical_spectrum(base, reduced_box(box, 4), 30, 11);
  CHECK((red.eigenvalues - want.eigenvalues).norm() <= 1e-12);
}

// ---------------------------------------------------------------------------
// delta2.

TEST_CASE("delta2 basics: identity, padding, symmetry, known values") {
  const Vector a = vec({3.0, 1.0, 0.5});
  CHECK(delta2(a, a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(delta2(vec({1.0, 0.0}), vec({0.0})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(delta2(vec({1.0}), vec({0.0, 1.0})) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  // Sorting: order of entries must not matter.
  CHECK(delta2(vec({1.0, 3.0}), vec({3.0, 1.0})) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(delta2(vec({2.0, 0.0}), vec({1.0, 1.0})) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-14));
  CHECK(delta2(a, vec({3.0, 1.0})) == doctest::Approx(0.5).epsilon(1e-14));
  // Symmetric in its arguments.
  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    Vector u(5), w(3);
    for (int i = 0; i < 5; ++i) u[i] = rng.uniform(-1.0, 2.0);
    for (int i = 0; i < 3; ++i) w[i] = rng.uniform(-1.0, 2.0);
    CHECK(delta2(u, w) == doctest::Approx(delta2(w, u)).epsilon(1e-14));
  }
}

TEST_CASE("delta2 obeys the Hoffman-Wielandt bound on matrix pairs") {
  // For symmetric A, B: delta2(spec A, spec B) <= |A - B|_F. Sorting both
  // spectra descending is exactly the optimal eigenvalue matching.
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 7.0));
    const Matrix A = random_symmetric(rng, n, 2.0);
    const Matrix B = random_symmetric(rng, n, 2.0);
    const double lhs = delta2(eigs_sorted_desc(A), eigs_sorted_desc(B));
    CHECK(lhs <= (A - B).norm() + 1e-10);
  }
}

TEST_CASE("delta2 between a spectrum and its clipped version is 1-Lipschitz") {
  // Clipping at zero moves each eigenvalue by at most its negative part, so
  // delta2(spec, clip(spec)) equals the negative tail's l2 norm.
  Rng rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    Vector s(8);
    for (int i = 0; i < 8; ++i) s[i] = rng.uniform(-1.0, 3.0);
    Vector c = s.cwiseMax(0.0);
    double neg_sq = 0.0;
    for (int i = 0; i < 8; ++i)
      if (s[i] < 0.0) neg_sq += s[i] * s[i];
    CHECK(delta2(s, c) == doctest::Approx(std::sqrt(neg_sq)).epsilon(1e-10).scale(1e-12));
  }
}

// ---------------------------------------------------------------------------
// Schatten norms.

TEST_CASE("schatten norms: identity, rank-one, and ordering") {
  const Matrix I3 = Matrix::Identity(3, 3);
  CHECK(schatten_norm(I3, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(schatten_norm(I3, 2.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(schatten_norm(I3, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Rank one vv^T with |v|^2 = 14: single eigenvalue 14.
  const Vector v = vec({1.0, 2.0, 3.0});
  const Matrix R = v * v.transpose();
  CHECK(schatten_norm(R, 1.0) == doctest::Approx(14.0).epsilon(1e-10));
  CHECK(schatten_norm(R, 2.0) == doctest::Approx(14.0).epsilon(1e-10));
  CHECK(schatten_norm(R, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(14.0).epsilon(1e-10));

  // S2 equals the Frobenius norm for symmetric matrices; Sinf <= S2 <= S1.
  Rng rng(31);
  for (int rep = 0; rep < 15; ++rep) {
    const Matrix A = random_symmetric(rng, 5, 1.5);
    CHECK(schatten_norm(A, 2.0) == doctest::Approx(A.norm()).epsilon(1e-10));
    const double s1 = schatten_norm(A, 1.0);
    const double s2 = schatten_norm(A, 2.0);
    const double si = schatten_norm(A, std::numeric_limits<double>::infinity());
    CHECK(si <= s2 + 1e-12);
    CHECK(s2 <= s1 + 1e-12);
  }
  CHECK_THROWS_AS(schatten_norm(I3, 3.0), ConfigError);
}

TEST_CASE("schatten norm symmetrizes its input") {
  Matrix K(2, 2);
  K << 1.0, 1.0, 0.0, 1.0;  // symmetrized: [[1, .5], [.5, 1]], eigs {0.5, 1.5}
  CHECK(schatten_norm(K, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(schatten_norm(K, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.5).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// Decay-slope fit.

TEST_CASE("slope fit recovers an exact power law") {
  // lambda_i = i^(-2): slope is exactly -2 in log-log.
  Vector s(50);
  for (int i = 0; i < 50; ++i) s[i] = std::pow(i + 1.0, -2.0);
  CHECK(loglog_decay_slope(s) == doctest::Approx(-2.0).epsilon(1e-10));
  // Scale invariance of the slope under lambda -> c lambda.
  CHECK(loglog_decay_slope(Vector(3600.0 * s)) == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("slope fit honors max_count and the floor") {
  // Power law for 30 entries, then junk below the floor: fit must ignore it.
  Vector s(40);
  for (int i = 0; i < 30; ++i) s[i] = std::pow(i + 1.0, -1.5);
  for (int i = 30; i < 40; ++i) s[i] = 1e-15;
  CHECK(loglog_decay_slope(s, 100, 1e-12) == doctest::Approx(-1.5).epsilon(1e-6));
  // max_count cuts the fit window.
  Vector mixed(60);
  for (int i = 0; i < 20; ++i) mixed[i] = std::pow(i + 1.0, -1.0);
  for (int i = 20; i < 60; ++i) mixed[i] = std::pow(i + 1.0, -4.0) * std::pow(21.0, 3.0);
  CHECK(loglog_decay_slope(mixed, 20, 1e-12) == doctest::Approx(-1.0).epsilon(1e-6));
  // Fewer than two usable eigenvalues: no slope to fit.
  CHECK_THROWS_AS(loglog_decay_slope(vec({1.0})), NumericalError);
  CHECK_THROWS_AS(loglog_decay_slope(vec({1.0, 1e-14, 1e-15}), 100, 1e-12), NumericalError);
}

TEST_CASE("invariant kernels decay faster than base on the same draw") {
  const auto g = GroupAction::hyperoctahedral(2);
  const Box box = Box::cube(2, -3.0, 3.0);
  KernelSpec base(Family::kRbf, 1.0, 1.0);
  KernelSpec avg(Family::kRbf, 1.0, 1.0, Mode::kAvg, g);
  const SpectrumReport rb = empirical_spectrum(base, box, 150, 13);
  const SpectrumReport ra = empirical_spectrum(avg, box, 150, 13);
  CHECK(loglog_decay_slope(ra.eigenvalues) < loglog_decay_slope(rb.eigenvalues));
}

// ---------------------------------------------------------------------------
// Convergence of the empirical spectra.

TEST_CASE("median delta2 between n and 2n shrinks as n grows") {
  KernelSpec spec(Family::kRbf, 1.0, 1.0);
  const Box box = Box::cube(2, -2.0, 2.0);
  const double d50 = delta2_convergence_median(spec, box, 50, 5, 100);
  const double d200 = delta2_convergence_median(spec, box, 200, 5, 100);
  CHECK(d50 > 0.0);
  CHECK(d200 < d50);
}

TEST_CASE("convergence median is deterministic in seed0") {
  const auto g = GroupAction::sign_flips(2);
  KernelSpec spec(Family::kRbf, 1.0, 1.0, Mode::kAvg, g);
  const Box box = Box::cube(2, -2.0, 2.0);
  const double a = delta2_convergence_median(spec, box, 30, 3, 40);
  const double b = delta2_convergence_median(spec, box, 30, 3, 40);
  CHECK(a == b);
}
