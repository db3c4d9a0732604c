#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "anys/kernels.hpp"
#include "anys/random.hpp"

using namespace anys;

namespace {

Dataset random_points(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.points.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) ds.points(i, k) = rng.normal();
  return ds;
}

const KernelFamily kFamilies[] = {KernelFamily::gaussian, KernelFamily::multiquadric, KernelFamily::sigmoid,
                                  KernelFamily::thinplate};

}  // namespace

TEST_CASE("kernel formulas at reference points") {
  const double x[] = {0.3, -1.2};
  const double y[] = {1.0, 0.5};
  const double zero[] = {0.0, 0.0};
  const Point px(x), py(y), pz(zero);

  CHECK(eval(KernelSpec{KernelFamily::gaussian, 0.7}, px, px) == 1.0);
  CHECK(eval(KernelSpec{KernelFamily::multiquadric, 0.7}, px, px) == 1.0);
  CHECK(eval(KernelSpec{KernelFamily::thinplate, 0.7}, px, px) == 0.0);

  // |x - y| = sigma gives ln 1 = 0 for the thin-plate spline
  const double a[] = {0.0};
  const double b[] = {2.5};
  CHECK(eval(KernelSpec{KernelFamily::thinplate, 2.5}, Point(a), Point(b)) == 0.0);

  // x.y = 0
  CHECK(eval(KernelSpec{KernelFamily::sigmoid, 1.0}, px, pz) == doctest::Approx(0.761594155955765).epsilon(1e-12));
  CHECK(eval(KernelSpec{KernelFamily::sigmoid, 1.0}, px, pz) == std::tanh(1.0));

  // direct formula check with r^2 = 0.49 + 2.89 = 3.38
  const double s = 1.3;
  const double t = 3.38 / (s * s);
  CHECK(eval(KernelSpec{KernelFamily::gaussian, s}, px, py) == doctest::Approx(std::exp(-t)).epsilon(1e-14));
  CHECK(eval(KernelSpec{KernelFamily::multiquadric, s}, px, py) == doctest::Approx(std::sqrt(t + 1)).epsilon(1e-14));
  CHECK(eval(KernelSpec{KernelFamily::thinplate, s}, px, py) == doctest::Approx(t * std::log(t)).epsilon(1e-13));
  CHECK(eval(KernelSpec{KernelFamily::sigmoid, s}, px, py) ==
        doctest::Approx(std::tanh((0.3 - 0.6) / s + 1)).epsilon(1e-14));
}

TEST_CASE("kernel validation") {
  const double x[] = {1.0, 2.0};
  const double y[] = {1.0};
  CHECK_THROWS_AS(eval(KernelSpec{}, Point(x), Point(y)), std::invalid_argument);
  CHECK_THROWS_AS(Kernel(KernelSpec{KernelFamily::gaussian, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Kernel(KernelSpec{KernelFamily::gaussian, -1.0}), std::invalid_argument);
  CHECK(parse_kernel_family("thinplate") == KernelFamily::thinplate);
  CHECK_THROWS(parse_kernel_family("laplace"));
  for (auto f : kFamilies) CHECK(parse_kernel_family(to_string(f)) == f);
  CHECK(Kernel(KernelSpec{KernelFamily::gaussian, 1}).is_spsd());
  CHECK_FALSE(Kernel(KernelSpec{KernelFamily::sigmoid, 1}).is_spsd());
}

TEST_CASE("symmetry is exact for every family") {
  const Dataset ds = random_points(40, 3, 2);
  for (auto f : kFamilies) {
    const Kernel k = KernelSpec{f, 0.9};
    const Eigen::MatrixXd g = gram_full(k, ds);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Index i = 0; i < ds.n(); ++i)
      for (Index j = 0; j < ds.n(); ++j) REQUIRE(eval(k, ds.row(i), ds.row(j)) == eval(k, ds.row(j), ds.row(i)));
  }
}

TEST_CASE("gram blocks") {
  const Dataset ds = random_points(12, 2, 3);
  const Kernel k = KernelSpec{KernelFamily::gaussian, 1.5};
  const GramBlock full = gram(k, ds, all_indices(12), all_indices(12));
  for (Index i = 0; i < 12; ++i) CHECK(full.values(i, i) == 1.0);

  const std::vector<Index> rows{3, 0, 7};
  const std::vector<Index> cols{5, 5, 11, 1};
  const GramBlock sub = gram(k, ds, rows, cols);
  CHECK(sub.values.rows() == 3);
  CHECK(sub.values.cols() == 4);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(sub.values(i, j) == eval(k, ds.row(rows[i]), ds.row(cols[j])));

  Dataset one;
  one.points.resize(1, 2);
  one.points << 0.4, -0.1;
  for (auto f : kFamilies) {
    const Kernel kf = KernelSpec{f, 0.8};
    const GramBlock b = gram(kf, one, {0}, {0});
    CHECK(b.values(0, 0) == eval(kf, one.row(0), one.row(0)));
  }

  CHECK_THROWS_AS(gram(k, ds, {12}, {0}), std::out_of_range);
  CHECK_THROWS_AS(gram(k, ds, {0}, {-1}), std::out_of_range);

  PointMatrix a = ds.points.topRows(4);
  PointMatrix b = ds.points.bottomRows(3);
  const Eigen::MatrixXd c = cross_gram(k, a, b);
  CHECK(c(2, 1) == eval(k, ds.row(2), ds.row(10)));
}

TEST_CASE("regularize") {
  const Dataset ds = random_points(6, 2, 4);
  const GramBlock g = gram(KernelSpec{KernelFamily::gaussian, 1.0}, ds, all_indices(6), all_indices(6));
  CHECK(regularize(g, 0.0).values == g.values);

  GramBlock eye;
  eye.values = Eigen::MatrixXd::Identity(2, 2);
  const GramBlock r = regularize(eye, 1e-9);
  CHECK(r.values(0, 0) == 1.0 + 1e-9);
  CHECK(r.values(1, 1) == 1.0 + 1e-9);
  CHECK(r.values(0, 1) == 0.0);

  const GramBlock shifted = regularize(g, 0.25);
  CHECK(shifted.values.trace() - g.values.trace() == doctest::Approx(0.25 * 6).epsilon(1e-14));
  Eigen::MatrixXd off = shifted.values - g.values;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);

  GramBlock rect;
  rect.values = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(regularize(rect, 1.0), std::invalid_argument);
}

TEST_CASE("gaussian is positive semi-definite on random sets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = random_points(10 + 4 * static_cast<Index>(seed), 3, 100 + seed);
    const Eigen::MatrixXd g = gram_full(KernelSpec{KernelFamily::gaussian, 1.0 + 0.2 * seed}, ds);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g, Eigen::EigenvaluesOnly).eigenvalues();
    CHECK(ev.minCoeff() >= -1e-8 * ev.maxCoeff());
  }
}

TEST_CASE("indefiniteness witnesses") {
  const Dataset ds = random_points(30, 2, 17);
  for (auto f : {KernelFamily::multiquadric, KernelFamily::sigmoid, KernelFamily::thinplate}) {
    const Eigen::MatrixXd g = gram_full(KernelSpec{f, 1.0}, ds);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g, Eigen::EigenvaluesOnly).eigenvalues();
    INFO(to_string(f));
    CHECK(ev.minCoeff() < -1e-8 * ev.cwiseAbs().maxCoeff());
  }
}
