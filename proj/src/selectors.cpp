#include "anys/selectors.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>

#include "anys/random.hpp"

namespace anys {

SelectorMethod parse_selector(std::string_view name) {
  if (name == "anchornet") return SelectorMethod::anchornet;
  if (name == "uniform") return SelectorMethod::uniform;
  if (name == "kmeans") return SelectorMethod::kmeans;
  if (name == "fps") return SelectorMethod::fps;
  if (name == "rls") return SelectorMethod::rls;
  if (name == "cholesky") return SelectorMethod::cholesky;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(SelectorMethod method) {
  switch (method) {
    case SelectorMethod::anchornet: return "anchornet";
    case SelectorMethod::uniform: return "uniform";
    case SelectorMethod::kmeans: return "kmeans";
    case SelectorMethod::fps: return "fps";
    case SelectorMethod::rls: return "rls";
    case SelectorMethod::cholesky: return "cholesky";
  }
  return "?";
}

bool is_stochastic(SelectorMethod method) {
  return method == SelectorMethod::uniform || method == SelectorMethod::kmeans || method == SelectorMethod::rls;
}

namespace {

using Clock = std::chrono::steady_clock;

double sq_dist(const PointMatrix& a, Index i, const PointMatrix& b, Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

}  // namespace

LandmarkSet uniform_landmarks(const Dataset& ds, Index m, std::uint64_t seed) {
  require_rank(m, ds.n(), "uniform");
  const auto start = Clock::now();
  LandmarkSet lm = landmarks_from_indices(ds, subsample_indices(ds.n(), m, seed), "uniform", m);
  lm.select_time = Clock::now() - start;
  return lm;
}

PointMatrix lloyd(const Dataset& ds, PointMatrix centroids, int iterations, std::vector<double>* energy) {
  if (iterations < 0) throw std::invalid_argument("lloyd: iterations must be >= 0");
  if (centroids.cols() != ds.d()) throw std::invalid_argument("lloyd: dimension mismatch");
  const Index n = ds.n();
  const Index k = centroids.rows();
  std::vector<Index> label(static_cast<std::size_t>(n));

  auto assign = [&]() {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < k; ++c) {
        const double dist = sq_dist(ds.points, i, centroids, c);
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      label[i] = best;
      total += best_d;
    }
    return total;
  };

  if (energy) energy->assign(1, assign());
  for (int it = 0; it < iterations; ++it) {
    if (!energy) assign();
    PointMatrix sums = PointMatrix::Zero(k, ds.d());
    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(label[i]) += ds.points.row(i);
      ++sizes[label[i]];
    }
    std::vector<Index> empty;
    for (Index c = 0; c < k; ++c) {
      if (sizes[c] > 0)
        centroids.row(c) = sums.row(c) / static_cast<double>(sizes[c]);
      else
        empty.push_back(c);
    }
    for (Index c : empty) {
      Index far = 0;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        double near_d = std::numeric_limits<double>::infinity();
        for (Index q = 0; q < k; ++q) near_d = std::min(near_d, sq_dist(ds.points, i, centroids, q));
        if (near_d > far_d) {
          far_d = near_d;
          far = i;
        }
      }
      centroids.row(c) = ds.points.row(far);
    }
    if (energy) energy->push_back(assign());
  }
  return centroids;
}

LandmarkSet kmeans_landmarks(const Dataset& ds, Index k, int iterations, std::uint64_t seed) {
  require_rank(k, ds.n(), "kmeans");
  const auto start = Clock::now();
  const auto init = subsample_indices(ds.n(), k, seed);
  PointMatrix centroids(k, ds.d());
  for (Index c = 0; c < k; ++c) centroids.row(c) = ds.points.row(init[c]);

  LandmarkSet lm;
  lm.coords = lloyd(ds, std::move(centroids), iterations);
  lm.method = "kmeans";
  lm.m_requested = k;
  lm.select_time = Clock::now() - start;
  return lm;
}

std::vector<Index> farthest_point_order(const Dataset& ds, Index m, Index start) {
  require_rank(m, ds.n(), "fps");
  if (start < 0 || start >= ds.n()) throw std::out_of_range("fps: start index out of range");
  const Index n = ds.n();
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  std::vector<Index> order{start};
  taken[start] = 1;
  Index last = start;
  while (static_cast<Index>(order.size()) < m) {
    Index next = -1;
    double next_d = -1.0;
    for (Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(ds.points, i, ds.points, last));
      if (!taken[i] && nearest[i] > next_d) {
        next_d = nearest[i];
        next = i;
      }
    }
    taken[next] = 1;
    order.push_back(next);
    last = next;
  }
  return order;
}

LandmarkSet fps_landmarks(const Dataset& ds, Index m, std::uint64_t seed) {
  require_rank(m, ds.n(), "fps");
  const auto start = Clock::now();
  Rng rng(seed);
  const auto first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(ds.n())));
  LandmarkSet lm = landmarks_from_indices(ds, farthest_point_order(ds, m, first), "fps", m);
  lm.select_time = Clock::now() - start;
  return lm;
}

Eigen::VectorXd ridge_leverage_scores(const Eigen::MatrixXd& k, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("ridge leverage scores: gamma must be positive");
  const Index n = k.rows();
  Eigen::MatrixXd shifted = k;
  shifted.diagonal().array() += gamma;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) throw std::runtime_error("ridge leverage scores: K + gamma I is not positive definite");
  // K (K + gamma I)^{-1} = I - gamma (K + gamma I)^{-1}; the inverse diagonal
  // is the column-wise squared norm of L^{-1}.
  Eigen::MatrixXd linv = Eigen::MatrixXd::Identity(n, n);
  llt.matrixL().solveInPlace(linv);
  return (1.0 - gamma * linv.colwise().squaredNorm().array()).matrix().transpose();
}

std::vector<Index> weighted_sample_without_replacement(const Eigen::VectorXd& weights, Index m,
                                                       std::uint64_t seed) {
  const Index n = weights.size();
  if (m < 0 || m > n) throw std::invalid_argument("weighted sample: need 0 <= m <= n");
  Eigen::VectorXd w = weights.cwiseMax(0.0);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  Rng rng(seed);
  std::vector<Index> out;
  for (Index draw = 0; draw < m; ++draw) {
    const double total = w.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (taken[i] || w(i) <= 0.0) continue;
        acc += w(i);
        pick = i;
        if (target < acc) break;
      }
    } else {
      // only zero-weight rows remain
      Index remaining = 0;
      for (Index i = 0; i < n; ++i) remaining += !taken[i];
      Index skip = static_cast<Index>(rng.below(static_cast<std::uint64_t>(remaining)));
      for (Index i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (skip-- == 0) {
          pick = i;
          break;
        }
      }
    }
    taken[pick] = 1;
    w(pick) = 0.0;
    out.push_back(pick);
  }
  return out;
}

LandmarkSet rls_exact_landmarks(const Dataset& ds, const Kernel& kernel, double gamma, Index m,
                                std::uint64_t seed) {
  require_rank(m, ds.n(), "rls");
  if (!kernel.is_spsd())
    throw std::invalid_argument("rls: ridge leverage scores require a positive semi-definite kernel, got " +
                                kernel.name());
  if (ds.n() > kDenseGuard) throw std::invalid_argument("rls: exact scores limited to n <= 5000");
  const auto start = Clock::now();
  const Eigen::VectorXd scores = ridge_leverage_scores(gram_full(kernel, ds), gamma);
  LandmarkSet lm =
      landmarks_from_indices(ds, weighted_sample_without_replacement(scores, m, seed), "RLS-exact", m);
  lm.select_time = Clock::now() - start;
  return lm;
}

}  // namespace anys
