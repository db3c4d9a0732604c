#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "anys/types.hpp"

namespace anys {

/// Closed axis-aligned box [lo, hi]. Zero-extent sides are allowed.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Index dim() const { return lo.size(); }
  double volume() const;
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  Eigen::VectorXd sides() const { return hi - lo; }
  bool contains(Point x) const;

  static Box unit(Index d);
  /// Smallest closed box containing the given rows (all rows when empty).
  static Box bounding(const PointMatrix& points, const std::vector<Index>& rows = {});
};

struct PointSet {
  PointMatrix points;
  std::string generator;  // "halton" | "adaptive-grid" | "center"
  // generator parameters
  std::vector<int> bases;
  Index start_index = 0;
  int p = 0;
  std::vector<int> composition;

  Index size() const { return points.rows(); }
};

/// Radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, int base);

std::vector<int> first_primes(int count);

/// Halton points with indices start_index .. start_index + count - 1 in [0,1)^dim.
PointSet halton(Index count, int dim, Index start_index = 1);

/// Halton points affinely mapped into a box.
PointSet halton_in_box(const Box& box, Index count, Index start_index = 1);

/// Node counts (i_1, ..., i_d) with sum p + d and every i_k >= 1. The surplus
/// p is split in proportion to the box side lengths by largest remainders,
/// ties going to the lower dimension. Zero-extent sides keep exactly one node;
/// if every side has zero extent the result is all ones.
std::vector<int> compose_budget(const Box& box, int p);

/// Tensor grid over `box` with compose_budget(box, p) nodes per dimension,
/// nodes at cell midpoints lo + (2j - 1) / (2 i_k) * (hi - lo).
PointSet adaptive_grid(const Box& box, int p);

/// Product of the composition, without building the grid.
double adaptive_grid_size(const Box& box, int p);

/// Adaptive grid with the largest p whose size does not exceed max_count.
PointSet grid_for_budget(const Box& box, Index max_count);

// ---------------------------------------------------------------------------
// Star discrepancy

struct Exact1d {};
struct Exact2d {};
struct MonteCarlo {
  Index samples = 10000;
  std::uint64_t seed = 0;
};
using DiscrepancyMethod = std::variant<Exact1d, Exact2d, MonteCarlo>;

struct DiscrepancyEstimate {
  double value = 0.0;
  bool is_lower_bound = false;
};

/// Measure of (union of boxes) intersected with anchored boxes [origin, a).
/// Exact by inclusion-exclusion for up to 20 boxes, otherwise a seeded
/// Monte-Carlo estimate from `samples` uniform points of the bounding box.
class RegionMeasure {
 public:
  RegionMeasure(std::vector<Box> boxes, Index samples = 200000, std::uint64_t seed = 0);

  const Eigen::VectorXd& origin() const { return bounds_.lo; }
  const Eigen::VectorXd& upper() const { return bounds_.hi; }
  double total() const { return total_; }
  bool exact() const { return exact_; }
  /// lambda(Omega intersect [origin, a)).
  double measure_below(const Eigen::VectorXd& a) const;

 private:
  struct Term {
    Box box;
    double sign;
  };
  Box bounds_;
  bool exact_ = true;
  std::vector<Term> terms_;
  PointMatrix samples_;  // points of Omega, Monte-Carlo mode only
  double bbox_volume_ = 0.0;
  Index sample_count_ = 0;
  double total_ = 0.0;
};

/// D*_N of the points in the unit cube [0,1)^d.
DiscrepancyEstimate star_discrepancy(const PointMatrix& points, const DiscrepancyMethod& method);

/// Generalized star discrepancy relative to the region Omega = union of boxes.
/// Anchored boxes start at the lower corner of Omega's bounding box.
DiscrepancyEstimate star_discrepancy(const PointMatrix& points, const RegionMeasure& region,
                                     const DiscrepancyMethod& method);

}  // namespace anys
