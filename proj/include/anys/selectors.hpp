#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "anys/kernels.hpp"
#include "anys/landmarks.hpp"

namespace anys {

enum class SelectorMethod { anchornet, uniform, kmeans, fps, rls, cholesky };

SelectorMethod parse_selector(std::string_view name);
std::string_view to_string(SelectorMethod method);
/// True for methods whose output depends on the seed beyond a start point.
bool is_stochastic(SelectorMethod method);

struct SelectorConfig {
  SelectorMethod method = SelectorMethod::uniform;
  std::uint64_t seed = 0;
  int kmeans_iterations = 5;
  double rls_gamma = 1e-3;
};

/// m distinct indices drawn uniformly without replacement.
LandmarkSet uniform_landmarks(const Dataset& ds, Index m, std::uint64_t seed);

/// Lloyd's algorithm (squared Euclidean) started from a seeded uniform sample
/// of k distinct points. Landmarks are the centroids; `indices` stays empty.
LandmarkSet kmeans_landmarks(const Dataset& ds, Index k, int iterations, std::uint64_t seed);

/// Lloyd iterations from explicit initial centroids. An empty cluster is
/// re-seeded at the data point farthest from all current centroids.
/// `energy`, when given, receives the k-means objective after each iteration
/// (entry 0 is the objective of the initial centroids).
PointMatrix lloyd(const Dataset& ds, PointMatrix centroids, int iterations,
                  std::vector<double>* energy = nullptr);

/// Farthest point sampling from a seeded uniform start point.
LandmarkSet fps_landmarks(const Dataset& ds, Index m, std::uint64_t seed);

/// Farthest point sampling from a given start index. Uses the running minimum
/// distance, so the cost is O(m n d) rather than O(m^2 n d).
std::vector<Index> farthest_point_order(const Dataset& ds, Index m, Index start);

/// Diagonal of K (K + gamma I)^{-1} for a symmetric positive semi-definite K.
Eigen::VectorXd ridge_leverage_scores(const Eigen::MatrixXd& k, double gamma);

/// m distinct indices drawn sequentially with probability proportional to
/// the remaining weights.
std::vector<Index> weighted_sample_without_replacement(const Eigen::VectorXd& weights, Index m,
                                                       std::uint64_t seed);

/// Exact ridge leverage score sampling (dense, n <= 5000, SPSD kernels only).
LandmarkSet rls_exact_landmarks(const Dataset& ds, const Kernel& kernel, double gamma, Index m,
                                std::uint64_t seed);

inline constexpr Index kDenseGuard = 5000;

}  // namespace anys
