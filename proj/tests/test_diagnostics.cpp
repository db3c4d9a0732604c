#include <doctest.h>

#include <cmath>
#include <limits>

#include "anys/diagnostics.hpp"
#include "anys/nystrom.hpp"
#include "anys/random.hpp"

using namespace anys;

namespace {

Dataset tenths() {
  Dataset ds;
  ds.points.resize(11, 1);
  for (Index i = 0; i <= 10; ++i) ds.points(i, 0) = i / 10.0;
  return ds;
}

Dataset random_points(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.points.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) ds.points(i, k) = rng.uniform(-1.0, 1.0);
  return ds;
}

// Naive O(n^2 r^2) evaluation of E_r straight from its definition.
double brute_e_r(const Kernel& k, const Dataset& ds, const std::vector<Index>& s) {
  double worst = 0.0;
  for (Index x = 0; x < ds.n(); ++x)
    for (Index y = 0; y < ds.n(); ++y) {
      double best = std::numeric_limits<double>::infinity();
      for (Index u : s)
        for (Index v : s) best = std::min(best, std::abs(k(ds.row(x), ds.row(y)) - k(ds.row(u), ds.row(v))));
      worst = std::max(worst, best);
    }
  return worst;
}

// Naive evaluation of E-hat_r from its definition.
double brute_e_hat(const Kernel& k, const Dataset& ds, const std::vector<Index>& s) {
  double worst = 0.0;
  for (Index x = 0; x < ds.n(); ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (Index u : s) {
      double acc = 0.0;
      for (Index w : s) {
        const double t = k(ds.row(x), ds.row(w)) - k(ds.row(u), ds.row(w));
        acc += t * t;
      }
      best = std::min(best, std::sqrt(acc));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

const Kernel kSquaredDistance("sqdist", [](Point x, Point y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return s;
});

const KernelFamily kFamilies[] = {KernelFamily::gaussian, KernelFamily::multiquadric, KernelFamily::sigmoid,
                                  KernelFamily::thinplate};

}  // namespace

TEST_CASE("S = X gives zero marking errors") {
  const Dataset ds = random_points(20, 2, 1);
  const auto lm = landmarks_from_indices(ds, all_indices(20), "all", 20);
  const MarkingErrors me = marking_errors(ds, lm, KernelSpec{KernelFamily::multiquadric, 1.0});
  CHECK(me.e_r == 0.0);
  CHECK(me.e_hat_r == 0.0);
  CHECK(me.bound == 0.0);
}

TEST_CASE("toy problem with a single landmark") {
  const Dataset ds = tenths();
  const auto lm = landmarks_from_indices(ds, {10}, "toy", 1);
  const MarkingErrors me = marking_errors(ds, lm, kSquaredDistance);
  CHECK(me.e_hat_r == 1.0);
  CHECK(brute_e_hat(kSquaredDistance, ds, {10}) == 1.0);
}

TEST_CASE("toy problem with both end points follows the oracle") {
  const Dataset ds = tenths();
  const std::vector<Index> s{0, 10};
  const double oracle = brute_e_hat(kSquaredDistance, ds, s);
  const MarkingErrors me = marking_errors(ds, landmarks_from_indices(ds, s, "toy", 2), kSquaredDistance);
  CHECK(std::abs(me.e_hat_r - oracle) <= 1e-12);
  CHECK(std::abs(me.e_r - brute_e_r(kSquaredDistance, ds, s)) <= 1e-12);
  // The worst point is the midpoint x = 0.5: k(0.5, S) = (0.25, 0.25) against
  // (0, 1) or (1, 0), so the value is sqrt(0.25^2 + 0.75^2), not 1/(2 sqrt 2).
  CHECK(oracle == doctest::Approx(std::sqrt(0.0625 + 0.5625)).epsilon(1e-14));
  CHECK(std::abs(oracle - 1.0 / (2.0 * std::sqrt(2.0))) > 0.1);
}

TEST_CASE("optimized marking errors equal the naive definitions") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Index n = 20 + static_cast<Index>(seed) * 5;
    const Dataset ds = random_points(n, 1 + static_cast<Index>(seed % 3), seed);
    const Kernel k = KernelSpec{kFamilies[seed % 4], 0.8};
    const auto s = subsample_indices(n, 2 + static_cast<Index>(seed % 6), seed + 7);
    const MarkingErrors me = marking_errors(ds, landmarks_from_indices(ds, s, "u", static_cast<Index>(s.size())), k);
    CHECK(std::abs(me.e_r - brute_e_r(k, ds, s)) <= 1e-12);
    CHECK(std::abs(me.e_hat_r - brute_e_hat(k, ds, s)) <= 1e-12);
    CHECK(me.bound >= me.e_r);
    CHECK(me.bound == me.e_r + 2 * me.e_hat_r + me.pinv_norm * me.e_hat_r * me.e_hat_r);
  }
}

TEST_CASE("marking errors guard their inputs") {
  const Dataset ds = random_points(10, 2, 3);
  LandmarkSet centroids;
  centroids.coords = ds.points.topRows(2);
  CHECK_THROWS_AS(marking_errors(ds, centroids, KernelSpec{}), std::invalid_argument);
  const Dataset big = random_points(501, 1, 3);
  CHECK_THROWS_AS(verify_bound(big, landmarks_from_indices(big, {0}, "u", 1), KernelSpec{}), std::invalid_argument);
}

TEST_CASE("fill distance") {
  const Dataset ds = random_points(15, 3, 4);
  CHECK(fill_distance(ds, landmarks_from_indices(ds, all_indices(15), "all", 15)).delta == 0.0);

  Dataset two;
  two.points.resize(2, 1);
  two.points << 0, 1;
  CHECK(fill_distance(two, landmarks_from_indices(two, {0}, "u", 1)).delta == 1.0);

  const Dataset t = tenths();
  CHECK(fill_distance(t, landmarks_from_indices(t, {0, 10}, "u", 2)).delta == doctest::Approx(0.5).epsilon(1e-15));

  // adding a landmark never increases delta
  const Dataset big = random_points(200, 2, 5);
  const auto order = subsample_indices(200, 30, 6);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= order.size(); ++r) {
    const std::vector<Index> s(order.begin(), order.begin() + static_cast<long>(r));
    const double d = fill_distance(big, landmarks_from_indices(big, s, "u", static_cast<Index>(r))).delta;
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("lipschitz form of the bound") {
  GeometryErrors g;
  g.delta = 0.1;
  g.pinv_norm = 4.0;
  g.r = 9;
  CHECK(g.lipschitz_bound(2.0) == doctest::Approx(std::sqrt(2.0) * 0.2 + 2 * 3 * 0.2 + 4.0 * 9 * 0.04).epsilon(1e-14));
}

TEST_CASE("fixed bound instance") {
  Dataset ds;
  ds.points.resize(3, 1);
  ds.points << 0, 0.5, 1;
  const BoundCheck bc = verify_bound(ds, landmarks_from_indices(ds, {0, 2}, "u", 2), KernelSpec{KernelFamily::sigmoid, 1.0});
  CHECK(bc.holds);
  CHECK(bc.max_error <= bc.bound);
  CHECK(bc.max_error > 0.0);

  const Dataset full = random_points(12, 2, 8);
  const BoundCheck exact = verify_bound(full, landmarks_from_indices(full, all_indices(12), "all", 12),
                                        KernelSpec{KernelFamily::gaussian, 0.3});
  CHECK(exact.bound == 0.0);
  CHECK(exact.holds);
}

TEST_CASE("bound holds on random instances") {
  Rng rng(2024);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const Index n = 10 + static_cast<Index>(rng.below(60));
    const Index d = 1 + static_cast<Index>(rng.below(4));
    const Dataset ds = random_points(n, d, rng.next());
    const Kernel k = KernelSpec{kFamilies[t % 4], rng.uniform(0.3, 3.0)};
    const Index r = 2 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(std::min<Index>(n - 1, 15))));
    const auto lm = landmarks_from_indices(ds, subsample_indices(n, r, rng.next()), "u", r);
    const BoundCheck bc = verify_bound(ds, lm, k);
    CAPTURE(t);
    CHECK(bc.holds);
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("Lipschitz form of the bound with an estimated constant") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = random_points(60, 2, 100 + seed);
    const Kernel k = KernelSpec{seed % 2 ? KernelFamily::gaussian : KernelFamily::multiquadric, 0.7};
    const auto s = subsample_indices(60, 6, seed);
    const auto lm = landmarks_from_indices(ds, s, "u", 6);
    const MarkingErrors me = marking_errors(ds, lm, k);
    const GeometryErrors g = fill_distance(ds, lm, me.pinv_norm);
    const double lip = estimate_lipschitz(k, ds, 4000, seed);
    CHECK(me.e_r <= std::sqrt(2.0) * lip * g.delta);
    CHECK(me.e_hat_r <= std::sqrt(6.0) * lip * g.delta);
    CHECK(me.bound <= g.lipschitz_bound(lip) * (1 + 1e-12));
  }
}
