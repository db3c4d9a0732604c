#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "anys/dataio.hpp"

namespace anys {

/// Landmark points S. Index-based selectors fill `indices` and copy the rows
/// into `coords`; centroid-based selectors leave `indices` empty.
struct LandmarkSet {
  std::vector<Index> indices;
  PointMatrix coords;
  std::string method;
  Index m_requested = 0;
  std::chrono::duration<double> select_time{0};

  Index size() const { return coords.rows(); }
  bool has_indices() const { return !indices.empty(); }
};

LandmarkSet landmarks_from_indices(const Dataset& ds, std::vector<Index> indices, std::string method,
                                   Index m_requested);

/// Throws std::invalid_argument unless 1 <= m <= n.
void require_rank(Index m, Index n, const char* who);

}  // namespace anys
