#include "anys/anchornet.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace anys {

PointGenerator parse_point_generator(std::string_view name) {
  if (name == "halton") return PointGenerator::halton;
  if (name == "adaptive-grid" || name == "grid") return PointGenerator::adaptive_grid;
  throw std::invalid_argument("unknown point generator '" + std::string(name) + "'");
}

std::vector<Index> allocate_sizes(const std::vector<double>& volumes, Index m,
                                  const std::vector<double>& fallback_weights) {
  if (volumes.empty()) throw std::invalid_argument("allocate_sizes: no groups");
  if (m < 1) throw std::invalid_argument("allocate_sizes: m must be >= 1");
  double sum = 0.0;
  for (double v : volumes) {
    if (!(v >= 0.0)) throw std::invalid_argument("allocate_sizes: negative volume");
    sum += v;
  }
  const std::vector<double>* weights = &volumes;
  if (sum <= 0.0 && !fallback_weights.empty()) {
    if (fallback_weights.size() != volumes.size())
      throw std::invalid_argument("allocate_sizes: fallback weight count mismatch");
    weights = &fallback_weights;
    sum = 0.0;
    for (double w : fallback_weights) sum += w;
  }
  std::vector<Index> sizes(volumes.size(), 1);
  if (sum <= 0.0) return sizes;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    const double w = (*weights)[i];
    if (w > 0.0) sizes[i] = std::max<Index>(1, static_cast<Index>(std::ceil(static_cast<double>(m) * w / sum)));
  }
  return sizes;
}

namespace {

/// Index of the row of `candidates` nearest to x in l-infinity; lowest index
/// wins ties.
Index nearest_linf(Point x, const PointMatrix& candidates) {
  const Index d = candidates.cols();
  Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < candidates.rows(); ++k) {
    const double* c = candidates.data() + k * d;
    double dist = 0.0;
    for (Index t = 0; t < d; ++t) {
      dist = std::max(dist, std::abs(x[t] - c[t]));
      if (dist >= best_dist) break;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

PointSet generate(PointGenerator gen, const Box& box, Index count) {
  if (gen == PointGenerator::halton) return halton_in_box(box, count);
  return grid_for_budget(box, count);
}

}  // namespace

AnchorNet build_anchor_net(const Dataset& ds, Index m, const AnchorNetConfig& config) {
  if (ds.n() < 1 || ds.d() < 1) throw std::invalid_argument("build_anchor_net: empty dataset");
  if (m < 1) throw std::invalid_argument("build_anchor_net: m must be >= 1");
  if (!(config.tess_multiplier >= 2.0 && config.tess_multiplier <= 20.0))
    throw std::invalid_argument("build_anchor_net: tessellation multiplier must lie in [2, 20]");

  AnchorNet net;
  net.requested_m = m;
  const Box outer = Box::bounding(ds.points);
  const Index s = std::max<Index>(1, std::llround(config.tess_multiplier * static_cast<double>(m)));
  net.tessellation = generate(config.tess_generator, outer, s);

  std::vector<std::vector<Index>> by_tile(static_cast<std::size_t>(net.tessellation.size()));
  for (Index j = 0; j < ds.n(); ++j) by_tile[nearest_linf(ds.row(j), net.tessellation.points)].push_back(j);
  for (auto& g : by_tile)
    if (!g.empty()) net.groups.push_back(std::move(g));

  std::vector<double> counts;
  for (const auto& g : net.groups) {
    net.boxes.push_back(Box::bounding(ds.points, g));
    net.volumes.push_back(net.boxes.back().volume());
    counts.push_back(static_cast<double>(g.size()));
  }
  net.allocation = allocate_sizes(net.volumes, m, counts);

  std::vector<PointSet> cells;
  Index total = 0;
  for (std::size_t i = 0; i < net.groups.size(); ++i) {
    PointSet cell = generate(config.cell_generator, net.boxes[i], net.allocation[i]);
    total += cell.size();
    cells.push_back(std::move(cell));
  }
  net.anchors.generator = config.cell_generator == PointGenerator::halton ? "halton" : "adaptive-grid";
  net.anchors.points.resize(total, ds.d());
  Index row = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    net.anchors.points.middleRows(row, cells[i].size()) = cells[i].points;
    net.anchor_group.insert(net.anchor_group.end(), static_cast<std::size_t>(cells[i].size()), static_cast<Index>(i));
    row += cells[i].size();
  }
  return net;
}

std::vector<Index> nearest_rows_linf(const Dataset& ds, const PointMatrix& queries) {
  if (queries.cols() != ds.d()) throw std::invalid_argument("nearest_rows_linf: dimension mismatch");
  std::vector<Index> out(static_cast<std::size_t>(queries.rows()));
  for (Index q = 0; q < queries.rows(); ++q) out[q] = nearest_linf(row_span(queries, q), ds.points);
  return out;
}

std::vector<Index> anchor_landmarks(const Dataset& ds, Index net_size, const AnchorNetConfig& config) {
  const AnchorNet net = build_anchor_net(ds, net_size, config);
  std::vector<Index> picked;
  std::unordered_set<Index> seen;
  for (Index idx : nearest_rows_linf(ds, net.anchors.points))
    if (seen.insert(idx).second) picked.push_back(idx);
  return picked;
}

LandmarkSet select_landmarks(const Dataset& ds, Index m, const AnchorNetConfig& config) {
  require_rank(m, ds.n(), "anchornet");
  const auto start = std::chrono::steady_clock::now();

  std::vector<Index> picked = anchor_landmarks(ds, m, config);
  if (static_cast<Index>(picked.size()) > m) {
    std::vector<Index> best;
    Index lo = 1, hi = m - 1;
    while (lo <= hi) {
      const Index mid = lo + (hi - lo) / 2;
      auto trial = anchor_landmarks(ds, mid, config);
      if (static_cast<Index>(trial.size()) <= m) {
        if (trial.size() > best.size()) best = std::move(trial);
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    if (best.empty()) {
      best = anchor_landmarks(ds, 1, config);
      best.resize(static_cast<std::size_t>(std::min<Index>(m, static_cast<Index>(best.size()))));
    }
    picked = std::move(best);
  }

  LandmarkSet lm = landmarks_from_indices(ds, std::move(picked), "anchornet", m);
  lm.select_time = std::chrono::steady_clock::now() - start;
  return lm;
}

}  // namespace anys
