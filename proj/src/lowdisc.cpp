#include "anys/lowdisc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "anys/random.hpp"

namespace anys {

double Box::volume() const {
  double v = 1.0;
  for (Index k = 0; k < dim(); ++k) v *= std::max(0.0, hi(k) - lo(k));
  return v;
}

bool Box::contains(Point x) const {
  for (Index k = 0; k < dim(); ++k)
    if (x[k] < lo(k) || x[k] > hi(k)) return false;
  return true;
}

Box Box::unit(Index d) { return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)}; }

Box Box::bounding(const PointMatrix& points, const std::vector<Index>& rows) {
  const Index d = points.cols();
  Box b{Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity()),
        Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity())};
  auto absorb = [&](Index i) {
    for (Index k = 0; k < d; ++k) {
      b.lo(k) = std::min(b.lo(k), points(i, k));
      b.hi(k) = std::max(b.hi(k), points(i, k));
    }
  };
  if (rows.empty()) {
    for (Index i = 0; i < points.rows(); ++i) absorb(i);
  } else {
    for (Index i : rows) absorb(i);
  }
  return b;
}

double radical_inverse(std::uint64_t index, int base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int c = 2; static_cast<int>(primes.size()) < count; ++c) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

PointSet halton(Index count, int dim, Index start_index) {
  if (dim < 1) throw std::invalid_argument("halton: dim must be >= 1");
  if (start_index < 1) throw std::invalid_argument("halton: start_index must be >= 1");
  PointSet ps;
  ps.generator = "halton";
  ps.bases = first_primes(dim);
  ps.start_index = start_index;
  ps.points.resize(count, dim);
  for (Index j = 0; j < count; ++j)
    for (int k = 0; k < dim; ++k)
      ps.points(j, k) = radical_inverse(static_cast<std::uint64_t>(start_index + j), ps.bases[k]);
  return ps;
}

PointSet halton_in_box(const Box& box, Index count, Index start_index) {
  PointSet ps = halton(count, static_cast<int>(box.dim()), start_index);
  const Eigen::RowVectorXd lo = box.lo.transpose();
  const Eigen::RowVectorXd side = box.sides().transpose();
  for (Index j = 0; j < count; ++j)
    ps.points.row(j) = lo.array() + ps.points.row(j).array() * side.array();
  return ps;
}

std::vector<int> compose_budget(const Box& box, int p) {
  if (box.dim() < 1) throw std::invalid_argument("compose_budget: d must be >= 1");
  if (p < 0) throw std::invalid_argument("compose_budget: p must be >= 0");
  const Index d = box.dim();
  std::vector<int> comp(static_cast<std::size_t>(d), 1);
  const Eigen::VectorXd sides = box.sides();
  double total = 0.0;
  for (Index k = 0; k < d; ++k)
    if (sides(k) > 0.0) total += sides(k);
  if (total <= 0.0 || p == 0) return comp;

  std::vector<double> frac(static_cast<std::size_t>(d), -1.0);
  int assigned = 0;
  for (Index k = 0; k < d; ++k) {
    if (!(sides(k) > 0.0)) continue;
    const double quota = p * sides(k) / total;
    const int whole = static_cast<int>(std::floor(quota));
    comp[k] += whole;
    assigned += whole;
    frac[k] = quota - whole;
  }
  std::vector<Index> order;
  for (Index k = 0; k < d; ++k)
    if (frac[k] >= 0.0) order.push_back(k);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return frac[a] > frac[b]; });
  for (std::size_t j = 0; assigned < p; ++j, ++assigned) comp[order[j % order.size()]] += 1;
  return comp;
}

double adaptive_grid_size(const Box& box, int p) {
  double size = 1.0;
  for (int c : compose_budget(box, p)) size *= c;
  return size;
}

PointSet adaptive_grid(const Box& box, int p) {
  const auto comp = compose_budget(box, p);
  const Index d = box.dim();
  Index total = 1;
  for (int c : comp) total *= c;

  PointSet ps;
  ps.generator = "adaptive-grid";
  ps.p = p;
  ps.composition = comp;
  ps.points.resize(total, d);
  std::vector<int> counter(static_cast<std::size_t>(d), 0);
  for (Index j = 0; j < total; ++j) {
    for (Index k = 0; k < d; ++k) {
      const double t = (2.0 * counter[k] + 1.0) / (2.0 * comp[k]);
      ps.points(j, k) = box.lo(k) + t * (box.hi(k) - box.lo(k));
    }
    // odometer, last dimension fastest
    for (Index k = d - 1; k >= 0; --k) {
      if (++counter[k] < comp[k]) break;
      counter[k] = 0;
    }
  }
  return ps;
}

PointSet grid_for_budget(const Box& box, Index max_count) {
  if (max_count < 1) throw std::invalid_argument("grid_for_budget: budget must be >= 1");
  int best = 0;
  // A grid with surplus p has at least p + 1 nodes unless every side is
  // degenerate, so p <= max_count - 1 bounds the search.
  if (box.volume() > 0.0 || (box.sides().array() > 0.0).any()) {
    for (int p = 1; p <= max_count - 1; ++p)
      if (adaptive_grid_size(box, p) <= static_cast<double>(max_count)) best = p;
  }
  return adaptive_grid(box, best);
}

// ---------------------------------------------------------------------------

RegionMeasure::RegionMeasure(std::vector<Box> boxes, Index samples, std::uint64_t seed) {
  if (boxes.empty()) throw std::invalid_argument("RegionMeasure: empty region");
  const Index d = boxes.front().dim();
  bounds_ = {Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity()),
             Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity())};
  std::vector<Box> solid;
  for (auto& b : boxes) {
    if (b.dim() != d) throw std::invalid_argument("RegionMeasure: inconsistent dimension");
    bounds_.lo = bounds_.lo.cwiseMin(b.lo);
    bounds_.hi = bounds_.hi.cwiseMax(b.hi);
    if (b.volume() > 0.0) solid.push_back(b);
  }
  if (solid.empty()) throw std::invalid_argument("RegionMeasure: region has zero measure");

  if (solid.size() <= 20) {
    exact_ = true;
    // Inclusion-exclusion over intersections with positive volume; any
    // superset of a null intersection is null too, so it is pruned.
    auto recurse = [&](auto&& self, const Box& current, std::size_t next, double sign) -> void {
      terms_.push_back({current, sign});
      for (std::size_t j = next; j < solid.size(); ++j) {
        Box inter{current.lo.cwiseMax(solid[j].lo), current.hi.cwiseMin(solid[j].hi)};
        if ((inter.hi.array() > inter.lo.array()).all()) self(self, inter, j + 1, -sign);
      }
    };
    for (std::size_t i = 0; i < solid.size(); ++i) recurse(recurse, solid[i], i + 1, 1.0);
    total_ = 0.0;
    for (const auto& t : terms_) total_ += t.sign * t.box.volume();
  } else {
    exact_ = false;
    Rng rng(seed);
    bbox_volume_ = bounds_.volume();
    sample_count_ = samples;
    std::vector<double> kept;
    Eigen::VectorXd x(d);
    for (Index s = 0; s < samples; ++s) {
      for (Index k = 0; k < d; ++k) x(k) = rng.uniform(bounds_.lo(k), bounds_.hi(k));
      const Point px{x.data(), static_cast<std::size_t>(d)};
      if (std::any_of(solid.begin(), solid.end(), [&](const Box& b) { return b.contains(px); }))
        kept.insert(kept.end(), x.data(), x.data() + d);
    }
    samples_ = Eigen::Map<PointMatrix>(kept.data(), static_cast<Index>(kept.size()) / d, d);
    total_ = bbox_volume_ * static_cast<double>(samples_.rows()) / static_cast<double>(samples);
    if (!(total_ > 0.0)) throw std::invalid_argument("RegionMeasure: Monte-Carlo volume is zero");
  }
}

double RegionMeasure::measure_below(const Eigen::VectorXd& a) const {
  if (exact_) {
    double m = 0.0;
    for (const auto& t : terms_) {
      double v = 1.0;
      for (Index k = 0; k < a.size() && v > 0.0; ++k) {
        const double lo = std::max(t.box.lo(k), bounds_.lo(k));
        const double hi = std::min(t.box.hi(k), a(k));
        v *= std::max(0.0, hi - lo);
      }
      m += t.sign * v;
    }
    return std::max(0.0, m);
  }
  Index count = 0;
  for (Index s = 0; s < samples_.rows(); ++s) {
    bool inside = true;
    for (Index k = 0; k < a.size() && inside; ++k) inside = samples_(s, k) < a(k);
    count += inside;
  }
  return bbox_volume_ * static_cast<double>(count) / static_cast<double>(sample_count_);
}

namespace {

DiscrepancyEstimate exact_1d(const PointMatrix& points, const RegionMeasure& region) {
  const Index n = points.rows();
  std::vector<double> xs(points.data(), points.data() + n);
  std::sort(xs.begin(), xs.end());
  const double upper = region.upper()(0);
  const double total = region.total();
  double best = 0.0;
  Eigen::VectorXd a(1);
  auto consider = [&](double coord) {
    a(0) = coord;
    const double vol = region.measure_below(a) / total;
    const auto open = std::lower_bound(xs.begin(), xs.end(), coord) - xs.begin();
    const auto closed = coord < upper ? std::upper_bound(xs.begin(), xs.end(), coord) - xs.begin() : open;
    best = std::max({best, vol - static_cast<double>(open) / n, static_cast<double>(closed) / n - vol});
  };
  for (double x : xs) consider(x);
  consider(upper);
  return {best, false};
}

DiscrepancyEstimate exact_2d(const PointMatrix& points, const RegionMeasure& region) {
  const Index n = points.rows();
  const Eigen::VectorXd upper = region.upper();
  const double total = region.total();
  std::vector<double> cx(static_cast<std::size_t>(n)), cy(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    cx[i] = points(i, 0);
    cy[i] = points(i, 1);
  }
  auto candidates = [](std::vector<double> c, double up) {
    c.push_back(up);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
  };
  const auto ax = candidates(cx, upper(0));
  const auto ay = candidates(cy, upper(1));

  double best = 0.0;
  Eigen::VectorXd a(2);
  std::vector<double> ys_open, ys_closed;
  for (double a1 : ax) {
    const bool close_x = a1 < upper(0);
    ys_open.clear();
    ys_closed.clear();
    for (Index i = 0; i < n; ++i) {
      if (cx[i] < a1) ys_open.push_back(cy[i]);
      if (close_x ? cx[i] <= a1 : cx[i] < a1) ys_closed.push_back(cy[i]);
    }
    std::sort(ys_open.begin(), ys_open.end());
    std::sort(ys_closed.begin(), ys_closed.end());
    for (double a2 : ay) {
      a << a1, a2;
      const double vol = region.measure_below(a) / total;
      const auto open = std::lower_bound(ys_open.begin(), ys_open.end(), a2) - ys_open.begin();
      const auto closed = a2 < upper(1)
                              ? std::upper_bound(ys_closed.begin(), ys_closed.end(), a2) - ys_closed.begin()
                              : std::lower_bound(ys_closed.begin(), ys_closed.end(), a2) - ys_closed.begin();
      best = std::max({best, vol - static_cast<double>(open) / n, static_cast<double>(closed) / n - vol});
    }
  }
  return {best, false};
}

DiscrepancyEstimate monte_carlo(const PointMatrix& points, const RegionMeasure& region,
                                const MonteCarlo& mc) {
  const Index n = points.rows();
  const Index d = points.cols();
  Rng rng(mc.seed);
  Eigen::VectorXd a(d);
  double best = 0.0;
  for (Index s = 0; s < mc.samples; ++s) {
    for (Index k = 0; k < d; ++k) a(k) = rng.uniform(region.origin()(k), region.upper()(k));
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      bool inside = true;
      for (Index k = 0; k < d && inside; ++k) inside = points(i, k) < a(k);
      count += inside;
    }
    const double vol = region.measure_below(a) / region.total();
    best = std::max(best, std::abs(static_cast<double>(count) / n - vol));
  }
  return {best, true};
}

}  // namespace

DiscrepancyEstimate star_discrepancy(const PointMatrix& points, const RegionMeasure& region,
                                     const DiscrepancyMethod& method) {
  if (points.rows() == 0) return {0.0, false};
  if (points.cols() != region.origin().size())
    throw std::invalid_argument("star_discrepancy: dimension mismatch");
  if (std::holds_alternative<Exact1d>(method)) {
    if (points.cols() != 1) throw std::invalid_argument("star_discrepancy: exact1d requires d = 1");
    return exact_1d(points, region);
  }
  if (std::holds_alternative<Exact2d>(method)) {
    if (points.cols() > 2) throw std::invalid_argument("star_discrepancy: exact methods require d <= 2");
    if (points.cols() == 1) return exact_1d(points, region);
    return exact_2d(points, region);
  }
  return monte_carlo(points, region, std::get<MonteCarlo>(method));
}

DiscrepancyEstimate star_discrepancy(const PointMatrix& points, const DiscrepancyMethod& method) {
  return star_discrepancy(points, RegionMeasure({Box::unit(points.cols())}), method);
}

}  // namespace anys
