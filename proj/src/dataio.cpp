#include "anys/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "anys/random.hpp"

namespace anys {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t col,
                  const std::string& where) {
  double value = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw DataError(where + ": line " + std::to_string(line_no) + ", column " +
                    std::to_string(col) + ": cannot parse '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError(where + ": line " + std::to_string(line_no) + ", column " +
                    std::to_string(col) + ": non-finite value '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  const std::string where = path.string();
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool header_pending = options.skip_header;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split(line, ',');
    if (rows == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw DataError(where + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " columns, expected " + std::to_string(width));
    }
    if (options.columns.empty()) {
      for (std::size_t c = 0; c < cells.size(); ++c)
        values.push_back(parse_cell(cells[c], line_no, c + 1, where));
    } else {
      for (int c : options.columns) {
        if (c < 0 || static_cast<std::size_t>(c) >= cells.size())
          throw DataError(where + ": column index " + std::to_string(c) + " out of range");
        values.push_back(parse_cell(cells[c], line_no, c + 1, where));
      }
    }
    ++rows;
  }
  if (rows == 0) throw DataError(where + ": no data rows");

  const std::size_t d = options.columns.empty() ? width : options.columns.size();
  Dataset ds;
  ds.points = Eigen::Map<PointMatrix>(values.data(), static_cast<Index>(rows), static_cast<Index>(d));
  ds.source = where;
  return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[32];
  for (Index i = 0; i < ds.n(); ++i) {
    for (Index k = 0; k < ds.d(); ++k) {
      if (k) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, ds.points(i, k));
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

Dataset standardize(const Dataset& ds) {
  Dataset out = ds;
  const double n = static_cast<double>(ds.n());
  for (Index k = 0; k < ds.d(); ++k) {
    auto col = out.points.col(k);
    if (col.maxCoeff() == col.minCoeff()) {
      col.setZero();
      continue;
    }
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0.0) col /= sd;
  }
  out.standardized = true;
  return out;
}

DataStats stats(const Dataset& ds) {
  DataStats s;
  s.center = ds.points.colwise().mean().transpose();
  double r2 = 0.0;
  for (Index i = 0; i < ds.n(); ++i)
    r2 = std::max(r2, (ds.points.row(i).transpose() - s.center).squaredNorm());
  s.radius = std::sqrt(r2);
  s.half_radius = s.radius / 2.0;
  return s;
}

std::vector<Index> subsample_indices(Index n, Index k, std::uint64_t seed) {
  if (k < 1 || k > n) throw std::invalid_argument("subsample: need 1 <= k <= n");
  Rng rng(seed);
  const auto drawn = rng.sample_without_replacement(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  return {drawn.begin(), drawn.end()};
}

Dataset take_rows(const Dataset& ds, const std::vector<Index>& rows) {
  Dataset out;
  out.points.resize(static_cast<Index>(rows.size()), ds.d());
  for (std::size_t i = 0; i < rows.size(); ++i) out.points.row(static_cast<Index>(i)) = ds.points.row(rows[i]);
  out.standardized = ds.standardized;
  out.source = ds.source;
  return out;
}

Dataset subsample(const Dataset& ds, Index k, std::uint64_t seed) {
  Dataset out = take_rows(ds, subsample_indices(ds.n(), k, seed));
  out.source = ds.source + " [subsample " + std::to_string(k) + "]";
  return out;
}

Dataset synth_clusters(const std::vector<ClusterSpec>& clusters, std::uint64_t seed) {
  if (clusters.empty()) throw std::invalid_argument("synth_clusters: empty cluster list");
  const Index d = clusters.front().center.size();
  Index total = 0;
  for (const auto& c : clusters) {
    if (c.center.size() != d || d < 1) throw std::invalid_argument("synth_clusters: inconsistent dimension");
    if (c.count < 1) throw std::invalid_argument("synth_clusters: counts must be >= 1");
    if (!(c.spread >= 0.0)) throw std::invalid_argument("synth_clusters: spreads must be >= 0");
    total += c.count;
  }
  Rng rng(seed);
  Dataset ds;
  ds.points.resize(total, d);
  Index row = 0;
  for (const auto& c : clusters) {
    for (Index j = 0; j < c.count; ++j, ++row) {
      for (Index k = 0; k < d; ++k) ds.points(row, k) = c.center(k) + c.spread * (2.0 * rng.uniform01() - 1.0);
    }
  }
  ds.source = "synth";
  return ds;
}

std::vector<ClusterSpec> nonuniform_2d_layout(Index n) {
  // center x, center y, spread, relative weight
  struct Piece {
    double x, y, spread, weight;
  };
  std::vector<Piece> pieces = {
      {0.40, 0.30, 0.020, 9.0}, {0.50, 0.70, 0.025, 8.0}, {0.75, 0.25, 0.015, 5.0},
      {0.20, 0.80, 0.100, 3.0}, {0.80, 0.75, 0.120, 3.0}, {0.25, 0.25, 0.150, 2.0},
      {0.60, 0.45, 0.060, 2.0}, {0.90, 0.10, 0.010, 3.0},
  };
  for (int j = 0; j < 10; ++j) {
    const double t = 0.05 + 0.09 * j;
    pieces.push_back({t, 1.0 - t, 0.012, 0.5});
  }
  double wsum = 0.0;
  for (const auto& p : pieces) wsum += p.weight;

  std::vector<ClusterSpec> out;
  Index assigned = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    ClusterSpec c;
    c.center = Eigen::Vector2d(pieces[i].x, pieces[i].y);
    c.spread = pieces[i].spread;
    c.count = std::max<Index>(1, static_cast<Index>(std::floor(n * pieces[i].weight / wsum)));
    assigned += c.count;
    out.push_back(std::move(c));
  }
  // remainder goes to the densest cluster
  out.front().count += std::max<Index>(0, n - assigned);
  return out;
}

std::vector<ClusterSpec> parse_cluster_specs(const std::string& text) {
  std::vector<ClusterSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw std::invalid_argument("cluster spec must be 'center:spread:count', got '" + item + "'");
    const auto coords = split(parts[0], ',');
    ClusterSpec c;
    c.center.resize(static_cast<Index>(coords.size()));
    for (std::size_t k = 0; k < coords.size(); ++k) c.center(static_cast<Index>(k)) = parse_cell(coords[k], 0, k + 1, "cluster spec");
    c.spread = parse_cell(parts[1], 0, 0, "cluster spec");
    c.count = static_cast<Index>(parse_cell(parts[2], 0, 0, "cluster spec"));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace anys
