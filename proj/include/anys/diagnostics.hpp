#pragma once

#include <cstdint>

#include "anys/kernels.hpp"
#include "anys/landmarks.hpp"

namespace anys {

/// Kernelized marking errors of a landmark subset S of X:
///   e_r     = max_{x,y in X} min_{u,v in S} |k(x,y) - k(u,v)|
///   e_hat_r = max_{x in X} min_{u in S} ||k(x,S) - k(u,S)||_2
/// and the resulting max-norm bound e_r + 2 e_hat_r + ||K_SS^+|| e_hat_r^2.
struct MarkingErrors {
  double e_r = 0.0;
  double e_hat_r = 0.0;
  double pinv_norm = 0.0;
  double bound = 0.0;
};

/// Fill distance delta = max_x min_s |x - s| and the Lipschitz form of the
/// bound, sqrt(2) L delta + 2 sqrt(r) L delta + ||K_SS^+|| r L^2 delta^2.
struct GeometryErrors {
  double delta = 0.0;
  double pinv_norm = 0.0;
  Index r = 0;

  double lipschitz_bound(double lipschitz) const;
};

/// Requires index-based landmarks and n <= 5000. `pinv_norm` is taken from an
/// unstabilized factorization of K_SS.
MarkingErrors marking_errors(const Dataset& ds, const LandmarkSet& lm, const Kernel& kernel);

/// e_r alone via sorted lookup over the r^2 landmark kernel values.
double bivariate_marking_error(const Eigen::MatrixXd& k_xx, const std::vector<Index>& landmarks);
/// e_hat_r alone by direct row-vector distances.
double univariate_marking_error(const Eigen::MatrixXd& k_xs, const std::vector<Index>& landmarks);

GeometryErrors fill_distance(const Dataset& ds, const LandmarkSet& lm, double pinv_norm = 0.0);

struct BoundCheck {
  double max_error = 0.0;
  double bound = 0.0;
  bool holds = false;
  MarkingErrors marking;
};

/// Both sides of ||K - K_XS K_SS^+ K_SX||_max <= e_r + 2 e_hat_r + ||K_SS^+|| e_hat_r^2
/// (n <= 500, unstabilized). holds = error <= bound (1 + 1e-8) + 1e-12.
BoundCheck verify_bound(const Dataset& ds, const LandmarkSet& lm, const Kernel& kernel);

/// Sampled estimate of the Lipschitz constant of k on X x X, inflated by 2.
/// This is an estimate, not a certified bound.
double estimate_lipschitz(const Kernel& kernel, const Dataset& ds, Index samples, std::uint64_t seed);

}  // namespace anys
