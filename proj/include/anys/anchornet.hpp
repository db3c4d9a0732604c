#pragma once

#include <string_view>
#include <vector>

#include "anys/dataio.hpp"
#include "anys/landmarks.hpp"
#include "anys/lowdisc.hpp"

namespace anys {

enum class PointGenerator { halton, adaptive_grid };

PointGenerator parse_point_generator(std::string_view name);

struct AnchorNetConfig {
  /// Tessellation size s = round(tess_multiplier * m); must lie in [2, 20].
  double tess_multiplier = 4.0;
  PointGenerator tess_generator = PointGenerator::halton;
  PointGenerator cell_generator = PointGenerator::adaptive_grid;
};

/// Two-level low-discrepancy set adapted to a dataset.
///
/// A tessellation T of the data's bounding box splits X into groups G_i by
/// l-infinity nearest tessellation point. Each nonempty group gets its tight
/// bounding box B_i and a per-box low-discrepancy set whose size follows the
/// volume-proportional allocation rule. `anchors` is the union of those sets.
struct AnchorNet {
  PointSet anchors;
  std::vector<Index> anchor_group;  // group of each anchor row
  std::vector<std::vector<Index>> groups;
  std::vector<Box> boxes;
  std::vector<double> volumes;
  std::vector<Index> allocation;  // M_i requested per group
  PointSet tessellation;
  Index requested_m = 0;

  Index group_count() const { return static_cast<Index>(groups.size()); }
};

/// M_i = ceil(m v_i / sum v) for positive volumes, 1 for zero volumes. When
/// every volume is zero the fallback weights (typically group sizes) are used
/// in place of the volumes.
std::vector<Index> allocate_sizes(const std::vector<double>& volumes, Index m,
                                  const std::vector<double>& fallback_weights = {});

AnchorNet build_anchor_net(const Dataset& ds, Index m, const AnchorNetConfig& config = {});

/// For each query, the dataset row minimizing the l-infinity distance (lowest
/// index on ties).
std::vector<Index> nearest_rows_linf(const Dataset& ds, const PointMatrix& queries);

/// Landmarks nearest (l-infinity) to the anchors of a net of size `net_size`,
/// deduplicated in anchor order.
std::vector<Index> anchor_landmarks(const Dataset& ds, Index net_size, const AnchorNetConfig& config);

/// Anchor net landmark selection with at most m distinct landmarks. The net
/// size is m itself when that yields <= m landmarks; otherwise it is reduced
/// by bisection to the largest size that does.
LandmarkSet select_landmarks(const Dataset& ds, Index m, const AnchorNetConfig& config = {});

}  // namespace anys
