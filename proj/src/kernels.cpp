#include "anys/kernels.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace anys {

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "multiquadric") return KernelFamily::multiquadric;
  if (name == "sigmoid") return KernelFamily::sigmoid;
  if (name == "thinplate") return KernelFamily::thinplate;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::multiquadric: return "multiquadric";
    case KernelFamily::sigmoid: return "sigmoid";
    case KernelFamily::thinplate: return "thinplate";
  }
  return "?";
}

namespace {

double squared_distance(Point x, Point y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = x[k] - y[k];
    s += t * t;
  }
  return s;
}

double dot(Point x, Point y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

}  // namespace

double KernelSpec::operator()(Point x, Point y) const {
  switch (family) {
    case KernelFamily::gaussian:
      return std::exp(-squared_distance(x, y) / (sigma * sigma));
    case KernelFamily::multiquadric:
      return std::sqrt(squared_distance(x, y) / (sigma * sigma) + 1.0);
    case KernelFamily::sigmoid:
      return std::tanh(dot(x, y) / sigma + 1.0);
    case KernelFamily::thinplate: {
      const double t = squared_distance(x, y) / (sigma * sigma);
      return t > 0.0 ? t * std::log(t) : 0.0;
    }
  }
  return 0.0;
}

Kernel::Kernel(KernelSpec spec)
    : spec_(spec), name_(to_string(spec.family)), spsd_(spec.is_spsd()) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma))
    throw std::invalid_argument("kernel bandwidth sigma must be positive and finite");
}

Kernel::Kernel(std::string name, Function fn, bool spsd)
    : fn_(std::move(fn)), name_(std::move(name)), spsd_(spsd) {}

double eval(const Kernel& kernel, Point x, Point y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel eval: dimension mismatch");
  return kernel(x, y);
}

GramBlock gram(const Kernel& kernel, const Dataset& ds, const std::vector<Index>& rows,
               const std::vector<Index>& cols) {
  for (Index i : rows)
    if (i < 0 || i >= ds.n()) throw std::out_of_range("gram: row index out of range");
  for (Index j : cols)
    if (j < 0 || j >= ds.n()) throw std::out_of_range("gram: column index out of range");
  GramBlock block;
  block.rows = rows;
  block.cols = cols;
  block.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index j = 0; j < block.values.cols(); ++j) {
    const Point y = ds.row(cols[j]);
    for (Index i = 0; i < block.values.rows(); ++i) block.values(i, j) = kernel(ds.row(rows[i]), y);
  }
  return block;
}

Eigen::MatrixXd gram_full(const Kernel& kernel, const Dataset& ds) {
  const Index n = ds.n();
  Eigen::MatrixXd k(n, n);
  for (Index j = 0; j < n; ++j) {
    const Point y = ds.row(j);
    for (Index i = 0; i < n; ++i) k(i, j) = kernel(ds.row(i), y);
  }
  return k;
}

Eigen::MatrixXd cross_gram(const Kernel& kernel, const PointMatrix& a, const PointMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("cross_gram: dimension mismatch");
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Index j = 0; j < b.rows(); ++j) {
    const Point y = row_span(b, j);
    for (Index i = 0; i < a.rows(); ++i) k(i, j) = kernel(row_span(a, i), y);
  }
  return k;
}

GramBlock regularize(GramBlock block, double beta) {
  if (block.values.rows() != block.values.cols())
    throw std::invalid_argument("regularize: block is not square");
  if (beta < 0.0) throw std::invalid_argument("regularize: beta must be nonnegative");
  block.values.diagonal().array() += beta;
  return block;
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

}  // namespace anys
