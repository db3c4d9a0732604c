#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace anys {

using Index = Eigen::Index;

/// Points stored one per row; row-major so that a point is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Point = std::span<const double>;

inline Point row_span(const PointMatrix& m, Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace anys
