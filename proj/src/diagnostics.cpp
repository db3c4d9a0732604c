#include "anys/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "anys/nystrom.hpp"
#include "anys/random.hpp"
#include "anys/selectors.hpp"

namespace anys {

double GeometryErrors::lipschitz_bound(double lipschitz) const {
  const double ld = lipschitz * delta;
  return std::sqrt(2.0) * ld + 2.0 * std::sqrt(static_cast<double>(r)) * ld +
         pinv_norm * static_cast<double>(r) * ld * ld;
}

double bivariate_marking_error(const Eigen::MatrixXd& k_xx, const std::vector<Index>& landmarks) {
  std::vector<double> values;
  values.reserve(landmarks.size() * landmarks.size());
  for (Index u : landmarks)
    for (Index v : landmarks) values.push_back(k_xx(u, v));
  std::sort(values.begin(), values.end());

  const Index n = k_xx.rows();
  double worst = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double k = k_xx(i, j);
      const auto it = std::lower_bound(values.begin(), values.end(), k);
      double best = std::numeric_limits<double>::infinity();
      if (it != values.end()) best = *it - k;
      if (it != values.begin()) best = std::min(best, k - *std::prev(it));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

double univariate_marking_error(const Eigen::MatrixXd& k_xs, const std::vector<Index>& landmarks) {
  const Index n = k_xs.rows();
  double worst = 0.0;
  for (Index x = 0; x < n; ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (Index u : landmarks) best = std::min(best, (k_xs.row(x) - k_xs.row(u)).squaredNorm());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

MarkingErrors marking_errors(const Dataset& ds, const LandmarkSet& lm, const Kernel& kernel) {
  if (!lm.has_indices())
    throw std::invalid_argument("marking_errors: landmarks must be dataset points (centroid sets are not supported)");
  if (ds.n() > kDenseGuard) throw std::invalid_argument("marking_errors: limited to n <= 5000");
  const Eigen::MatrixXd k_xx = gram_full(kernel, ds);
  Eigen::MatrixXd k_xs(ds.n(), lm.size());
  for (Index j = 0; j < lm.size(); ++j) k_xs.col(j) = k_xx.col(lm.indices[j]);

  MarkingErrors me;
  me.e_r = bivariate_marking_error(k_xx, lm.indices);
  me.e_hat_r = univariate_marking_error(k_xs, lm.indices);
  Eigen::MatrixXd k_ss(lm.size(), lm.size());
  for (Index j = 0; j < lm.size(); ++j) k_ss.col(j) = k_xs.col(j)(lm.indices);
  me.pinv_norm = factor_blocks(k_xs, k_ss, {}).pinv_norm;
  me.bound = me.e_r + 2.0 * me.e_hat_r + me.pinv_norm * me.e_hat_r * me.e_hat_r;
  return me;
}

GeometryErrors fill_distance(const Dataset& ds, const LandmarkSet& lm, double pinv_norm) {
  if (lm.size() < 1) throw std::invalid_argument("fill_distance: empty landmark set");
  double worst = 0.0;
  for (Index i = 0; i < ds.n(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < lm.size(); ++j) best = std::min(best, (ds.points.row(i) - lm.coords.row(j)).squaredNorm());
    worst = std::max(worst, best);
  }
  GeometryErrors g;
  g.delta = std::sqrt(worst);
  g.pinv_norm = pinv_norm;
  g.r = lm.size();
  return g;
}

BoundCheck verify_bound(const Dataset& ds, const LandmarkSet& lm, const Kernel& kernel) {
  if (ds.n() > 500) throw std::invalid_argument("verify_bound: limited to n <= 500");
  BoundCheck bc;
  bc.marking = marking_errors(ds, lm, kernel);
  const NystromFactors f = factor(ds, lm, kernel);
  bc.max_error = (gram_full(kernel, ds) - reconstruct(f)).cwiseAbs().maxCoeff();
  bc.bound = bc.marking.bound;
  bc.holds = bc.max_error <= bc.bound * (1.0 + 1e-8) + 1e-12;
  return bc;
}

double estimate_lipschitz(const Kernel& kernel, const Dataset& ds, Index samples, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<std::uint64_t>(ds.n());
  const Index d = ds.d();
  const double scale = std::max(1e-12, (ds.points.colwise().maxCoeff() - ds.points.colwise().minCoeff()).norm());
  const double h = 1e-5 * scale;
  Eigen::VectorXd xp(d), yp(d);
  double best = 0.0;
  auto quotient = [&](Point x, Point y, Point x2, Point y2) {
    double dist2 = 0.0;
    for (Index k = 0; k < d; ++k) dist2 += (x[k] - x2[k]) * (x[k] - x2[k]) + (y[k] - y2[k]) * (y[k] - y2[k]);
    if (dist2 > 0.0) best = std::max(best, std::abs(kernel(x2, y2) - kernel(x, y)) / std::sqrt(dist2));
  };
  for (Index s = 0; s < samples; ++s) {
    const Index x = static_cast<Index>(rng.below(n)), y = static_cast<Index>(rng.below(n));
    const Index x2 = static_cast<Index>(rng.below(n)), y2 = static_cast<Index>(rng.below(n));
    quotient(ds.row(x), ds.row(y), ds.row(x2), ds.row(y2));
    // local slope: small random displacement of both arguments
    for (Index k = 0; k < d; ++k) {
      xp(k) = ds.points(x, k) + h * rng.normal();
      yp(k) = ds.points(y, k) + h * rng.normal();
    }
    quotient(ds.row(x), ds.row(y), Point(xp.data(), static_cast<std::size_t>(d)),
             Point(yp.data(), static_cast<std::size_t>(d)));
  }
  return 2.0 * best;
}

}  // namespace anys
