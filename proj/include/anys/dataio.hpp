#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anys/types.hpp"

namespace anys {

/// Raised for unreadable or malformed input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  PointMatrix points;
  bool standardized = false;
  std::string source;

  Index n() const { return points.rows(); }
  Index d() const { return points.cols(); }
  Point row(Index i) const { return row_span(points, i); }
};

struct DataStats {
  Eigen::VectorXd center;
  double radius = 0.0;
  double half_radius = 0.0;
};

struct CsvOptions {
  /// Zero-based columns to keep, in the given order. Empty keeps all.
  std::vector<int> columns;
  bool skip_header = false;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void save_csv(const Dataset& ds, const std::filesystem::path& path);

/// Per-coordinate zero mean and unit population standard deviation.
/// Constant coordinates are centered (to exactly zero) and left unscaled.
Dataset standardize(const Dataset& ds);

DataStats stats(const Dataset& ds);

/// k distinct row indices of [0, n), reproducible per seed.
std::vector<Index> subsample_indices(Index n, Index k, std::uint64_t seed);

Dataset subsample(const Dataset& ds, Index k, std::uint64_t seed);

/// Rows of `ds` in the given order.
Dataset take_rows(const Dataset& ds, const std::vector<Index>& rows);

struct ClusterSpec {
  Eigen::VectorXd center;
  double spread = 0.0;  // half-width of the uniform box in every coordinate
  Index count = 0;
};

Dataset synth_clusters(const std::vector<ClusterSpec>& clusters, std::uint64_t seed);

/// A fixed highly non-uniform 2D layout inside the unit square: a few dense
/// small clusters, some sparse wide ones and a thin diagonal band. Counts are
/// scaled so that the total is n.
std::vector<ClusterSpec> nonuniform_2d_layout(Index n);

/// Parses "c1,c2,...:spread:count;..." into cluster specs.
std::vector<ClusterSpec> parse_cluster_specs(const std::string& text);

}  // namespace anys
