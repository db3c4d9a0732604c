#include "anys/nystrom.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "anys/dataio.hpp"
#include "anys/random.hpp"
#include "anys/selectors.hpp"

namespace anys {

Stabilization parse_stabilization(std::string_view name) {
  if (name == "none") return Stabilization::none;
  if (name == "pinv-eps" || name == "pinv_eps") return Stabilization::pinv_eps;
  if (name == "qr-eps" || name == "qr_eps") return Stabilization::qr_eps;
  throw std::invalid_argument("unknown stabilization '" + std::string(name) + "'");
}

std::string_view to_string(Stabilization mode) {
  switch (mode) {
    case Stabilization::none: return "none";
    case Stabilization::pinv_eps: return "pinv-eps";
    case Stabilization::qr_eps: return "qr-eps";
  }
  return "?";
}

NormKind parse_norm(std::string_view name) {
  if (name == "two") return NormKind::two;
  if (name == "fro") return NormKind::fro;
  if (name == "max") return NormKind::max;
  throw std::invalid_argument("unknown norm '" + std::string(name) + "'");
}

std::string_view to_string(NormKind norm) {
  switch (norm) {
    case NormKind::two: return "two";
    case NormKind::fro: return "fro";
    case NormKind::max: return "max";
  }
  return "?";
}

namespace {

/// Pseudoinverse over the singular values s >= cutoff (s > cutoff when
/// strict), kept as the pair V_k diag(1/s_k) and U_k^T. Multiplying those
/// into K_XS and K_SX separately avoids the cancellation that forming
/// V diag(1/s) U^T explicitly causes once small singular values are kept.
struct TruncatedInverse {
  Eigen::MatrixXd left;   // r x k
  Eigen::MatrixXd right;  // k x r
  double norm = 0.0;
  Index retained = 0;
};

TruncatedInverse truncated_pinv(const Eigen::BDCSVD<Eigen::MatrixXd>& svd, double cutoff, bool strict) {
  const Eigen::VectorXd& s = svd.singularValues();
  TruncatedInverse out;
  // singular values are sorted, so the kept ones form a prefix
  while (out.retained < s.size()) {
    const double v = s(out.retained);
    if (!(strict ? v > cutoff : v >= cutoff) || v <= 0.0) break;
    ++out.retained;
  }
  const Index k = out.retained;
  if (k > 0) out.norm = 1.0 / s(k - 1);
  out.left = svd.matrixV().leftCols(k) * s.head(k).cwiseInverse().asDiagonal();
  out.right = svd.matrixU().leftCols(k).transpose();
  return out;
}

}  // namespace

NystromFactors factor_blocks(Eigen::MatrixXd k_xs, const Eigen::MatrixXd& k_ss, StabilizationSpec stab) {
  const Index r = k_ss.rows();
  if (r < 1 || k_ss.cols() != r || k_xs.cols() != r) throw std::invalid_argument("factor: inconsistent block sizes");
  if (!k_xs.allFinite() || !k_ss.allFinite()) throw std::domain_error("factor: non-finite kernel values");
  if (stab.mode != Stabilization::none && !(stab.eps >= 0.0))
    throw std::invalid_argument("factor: truncation threshold must be nonnegative");

  NystromFactors f;
  f.stabilization = stab;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(k_ss, Eigen::ComputeFullU | Eigen::ComputeFullV);
  f.max_sv = svd.singularValues()(0);
  f.min_sv = svd.singularValues()(r - 1);

  TruncatedInverse ti;
  switch (stab.mode) {
    case Stabilization::none: {
      const double cutoff = static_cast<double>(r) * std::numeric_limits<double>::epsilon() * f.max_sv;
      ti = truncated_pinv(svd, cutoff, true);
      break;
    }
    case Stabilization::pinv_eps:
      ti = truncated_pinv(svd, stab.eps, false);
      break;
    case Stabilization::qr_eps: {
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(k_ss);
      const Eigen::MatrixXd q = qr.householderQ();
      const Eigen::MatrixXd upper = qr.matrixQR().triangularView<Eigen::Upper>();
      const Eigen::BDCSVD<Eigen::MatrixXd> rsvd(upper, Eigen::ComputeFullU | Eigen::ComputeFullV);
      ti = truncated_pinv(rsvd, stab.eps, false);
      ti.right *= q.transpose();
      break;
    }
  }
  f.core = std::move(ti.left);
  f.q_t = std::move(ti.right);
  f.pinv_norm = ti.norm;
  f.retained = ti.retained;
  f.k_xs = std::move(k_xs);
  return f;
}

NystromFactors factor(const Dataset& ds, const LandmarkSet& lm, const Kernel& kernel, StabilizationSpec stab,
                      double beta) {
  if (lm.size() < 1) throw std::invalid_argument("factor: empty landmark set");
  if (!lm.coords.allFinite()) throw std::invalid_argument("factor: non-finite landmark coordinates");
  if (beta < 0.0) throw std::invalid_argument("factor: beta must be nonnegative");
  Eigen::MatrixXd k_xs = cross_gram(kernel, ds.points, lm.coords);
  Eigen::MatrixXd k_ss = cross_gram(kernel, lm.coords, lm.coords);
  if (beta > 0.0 && lm.has_indices()) {
    for (std::size_t j = 0; j < lm.indices.size(); ++j) k_xs(lm.indices[j], static_cast<Index>(j)) += beta;
    k_ss.diagonal().array() += beta;
  }
  return factor_blocks(std::move(k_xs), k_ss, stab);
}

namespace {

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<Index>& idx) {
  if (idx.empty()) return m;
  Eigen::MatrixXd out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
  return out;
}

/// Left (|I| x r) and right (r x |I|) factors of the approximation on rows I.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split_factors(const NystromFactors& f, const std::vector<Index>& idx) {
  const Eigen::MatrixXd kx = rows_of(f.k_xs, idx);
  Eigen::MatrixXd left = kx * f.core;
  Eigen::MatrixXd right = f.q_t.size() ? Eigen::MatrixXd(f.q_t * kx.transpose()) : Eigen::MatrixXd(kx.transpose());
  return {std::move(left), std::move(right)};
}

}  // namespace

Eigen::VectorXd apply(const NystromFactors& f, const Eigen::VectorXd& v) {
  if (v.size() != f.n()) throw std::invalid_argument("apply: dimension mismatch");
  Eigen::VectorXd t = f.k_xs.transpose() * v;
  if (f.q_t.size()) t = f.q_t * t;
  return f.k_xs * (f.core * t);
}

Eigen::MatrixXd reconstruct(const NystromFactors& f, const std::vector<Index>& idx) {
  const auto [left, right] = split_factors(f, idx);
  return left * right;
}

// ---------------------------------------------------------------------------

double lanczos_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op, Index n, double tol,
                    Index max_iter) {
  if (n == 0) return 0.0;
  const Index kmax = std::min(n, max_iter);
  Eigen::MatrixXd basis(n, kmax);
  std::vector<double> alpha, beta;
  Rng rng(0x1a2b3c4dULL);
  Eigen::VectorXd q(n);
  for (Index i = 0; i < n; ++i) q(i) = rng.normal();
  q.normalize();

  double theta = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  for (Index j = 0; j < kmax; ++j) {
    basis.col(j) = q;
    Eigen::VectorXd w = op(q);
    alpha.push_back(q.dot(w));
    // two passes of full reorthogonalization
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = basis.leftCols(j + 1).transpose() * w;
      w -= basis.leftCols(j + 1) * c;
    }
    const double b = w.norm();

    const Index m = j + 1;
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max<Index>(m - 1, 0));
    for (Index i = 0; i + 1 < m; ++i) sub(i) = beta[i];
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd& ev = tri.eigenvalues();
    const Index top = std::abs(ev(0)) > std::abs(ev(m - 1)) ? 0 : m - 1;
    theta = std::abs(ev(top));
    const double residual = b * std::abs(tri.eigenvectors()(m - 1, top));
    if (b <= 1e-14 * std::max(theta, 1e-300) || residual <= tol * theta || theta == 0.0) break;
    beta.push_back(b);
    q = w / b;
  }
  return theta;
}

double spectral_norm(const Eigen::MatrixXd& a, bool symmetric) {
  if (a.size() == 0) return 0.0;
  if (a.rows() <= 600) {
    if (symmetric && a.rows() == a.cols()) {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
  }
  if (symmetric && a.rows() == a.cols())
    return lanczos_norm([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a * v); }, a.rows());
  return std::sqrt(
      lanczos_norm([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a.transpose() * (a * v)); }, a.cols()));
}

double matrix_norm(const Eigen::MatrixXd& a, NormKind norm, bool symmetric) {
  switch (norm) {
    case NormKind::two: return spectral_norm(a, symmetric);
    case NormKind::fro: return a.norm();
    case NormKind::max: return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  }
  return 0.0;
}

ErrorEvaluator::ErrorEvaluator(const Dataset& ds, const Kernel& kernel, NormKind norm,
                               std::optional<EvalSubset> subset, double beta)
    : kernel_(kernel), beta_(beta), norm_(norm) {
  if (beta < 0.0) throw std::invalid_argument("approx_error: beta must be nonnegative");
  if (subset && subset->size < ds.n()) {
    rows_ = subsample_indices(ds.n(), subset->size, subset->seed);
  } else {
    rows_ = all_indices(ds.n());
  }
  const Index m = static_cast<Index>(rows_.size());
  if (norm == NormKind::two && m > kDenseGuard) {
    throw std::invalid_argument("approx_error: two-norm over " + std::to_string(m) +
                                " points exceeds the dense limit of 5000; use an evaluation subset");
  }
  points_ = take_rows(ds, rows_).points;
  if (m <= kDenseGuard) {
    target_ = target_columns(0, m);
    target_norm_ = matrix_norm(target_, norm_, true);
  } else {
    double sumsq = 0.0, maxabs = 0.0;
    for (Index c = 0; c < m; c += 256) {
      const Eigen::MatrixXd blk = target_columns(c, std::min<Index>(256, m - c));
      sumsq += blk.squaredNorm();
      maxabs = std::max(maxabs, blk.cwiseAbs().maxCoeff());
    }
    target_norm_ = norm_ == NormKind::fro ? std::sqrt(sumsq) : maxabs;
  }
}

Eigen::MatrixXd ErrorEvaluator::target_columns(Index first, Index count) const {
  const Index m = points_.rows();
  Eigen::MatrixXd out(m, count);
  for (Index j = 0; j < count; ++j) {
    const Point y = row_span(points_, first + j);
    for (Index i = 0; i < m; ++i) out(i, j) = kernel_(row_span(points_, i), y);
    out(first + j, j) += beta_;
  }
  return out;
}

ErrorReport ErrorEvaluator::evaluate(const NystromFactors& f) const {
  const auto start = std::chrono::steady_clock::now();
  if (f.n() < *std::max_element(rows_.begin(), rows_.end()) + 1)
    throw std::invalid_argument("approx_error: factors do not match the dataset");
  const bool all_rows = rows_.size() == static_cast<std::size_t>(f.n());
  const auto [left, right] = split_factors(f, all_rows ? std::vector<Index>{} : rows_);
  const Index m = static_cast<Index>(rows_.size());

  ErrorReport rep;
  rep.norm = norm_;
  rep.eval_size = m;
  if (norm_ == NormKind::two && m > 600) {
    auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return target_ * v - left * (right * v); };
    auto residual_t = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return target_.transpose() * v - right.transpose() * (left.transpose() * v);
    };
    rep.value = f.symmetric()
                    ? lanczos_norm(residual, m)
                    : std::sqrt(lanczos_norm([&](const Eigen::VectorXd& v) { return residual_t(residual(v)); }, m));
  } else if (norm_ == NormKind::two) {
    rep.value = spectral_norm(target_ - left * right, f.symmetric());
  } else {
    // column blocks, fixed accumulation order
    constexpr Index kBlock = 256;
    double sumsq = 0.0, maxabs = 0.0;
    for (Index c = 0; c < m; c += kBlock) {
      const Index w = std::min(kBlock, m - c);
      const Eigen::MatrixXd blk = target_.size() ? Eigen::MatrixXd(target_.middleCols(c, w)) : target_columns(c, w);
      const Eigen::MatrixXd e = blk - left * right.middleCols(c, w);
      sumsq += e.squaredNorm();
      maxabs = std::max(maxabs, e.cwiseAbs().maxCoeff());
    }
    rep.value = norm_ == NormKind::fro ? std::sqrt(sumsq) : maxabs;
  }
  rep.relative = target_norm_ > 0.0 ? rep.value / target_norm_ : rep.value;
  rep.t_eval_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ErrorReport approx_error(const Dataset& ds, const NystromFactors& f, const Kernel& kernel, NormKind norm,
                         std::optional<EvalSubset> subset, double beta) {
  return ErrorEvaluator(ds, kernel, norm, subset, beta).evaluate(f);
}

// ---------------------------------------------------------------------------

PivotedCholesky pivoted_cholesky(const Eigen::VectorXd& diag,
                                 const std::function<void(Index, Eigen::Ref<Eigen::VectorXd>)>& column,
                                 Index rank) {
  const Index n = diag.size();
  if (rank < 1 || rank > n) throw std::invalid_argument("pivoted_cholesky: need 1 <= rank <= n");
  PivotedCholesky pc;
  pc.factor = Eigen::MatrixXd::Zero(n, rank);
  pc.residual_diag = diag;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd col(n);
  Index k = 0;
  for (; k < rank; ++k) {
    Index piv = -1;
    double best = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (!used[i] && pc.residual_diag(i) > best) {
        best = pc.residual_diag(i);
        piv = i;
      }
    }
    if (piv < 0) break;  // residual exhausted
    column(piv, col);
    col -= pc.factor.leftCols(k) * pc.factor.row(piv).head(k).transpose();
    const double root = std::sqrt(best);
    pc.factor.col(k) = col / root;
    for (Index p : pc.pivots) pc.factor(p, k) = 0.0;
    pc.factor(piv, k) = root;
    pc.residual_diag -= pc.factor.col(k).cwiseAbs2();
    pc.residual_diag(piv) = 0.0;
    used[piv] = 1;
    pc.pivots.push_back(piv);
    pc.residual_trace.push_back(pc.residual_diag.sum());
  }
  pc.factor.conservativeResize(Eigen::NoChange, k);
  return pc;
}

NystromFactors pivoted_cholesky_factors(const Dataset& ds, const Kernel& kernel, Index rank, double beta,
                                        std::vector<Index>* pivots) {
  if (!kernel.is_spsd())
    throw std::invalid_argument("pivoted Cholesky requires a positive semi-definite kernel, got " + kernel.name());
  require_rank(rank, ds.n(), "cholesky");
  const Index n = ds.n();
  Eigen::VectorXd diag(n);
  for (Index i = 0; i < n; ++i) diag(i) = kernel(ds.row(i), ds.row(i)) + beta;
  auto column = [&](Index p, Eigen::Ref<Eigen::VectorXd> out) {
    const Point y = ds.row(p);
    for (Index i = 0; i < n; ++i) out(i) = kernel(ds.row(i), y);
    out(p) += beta;
  };
  PivotedCholesky pc = pivoted_cholesky(diag, column, rank);

  NystromFactors f;
  const Index r = pc.factor.cols();
  f.core = Eigen::MatrixXd::Identity(r, r);
  f.retained = r;
  if (r > 0) {
    Eigen::MatrixXd ls(r, r);
    for (Index j = 0; j < r; ++j) ls.row(j) = pc.factor.row(pc.pivots[j]);
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(ls);
    f.max_sv = svd.singularValues()(0) * svd.singularValues()(0);
    f.min_sv = svd.singularValues()(r - 1) * svd.singularValues()(r - 1);
    f.pinv_norm = f.min_sv > 0.0 ? 1.0 / f.min_sv : 0.0;
  }
  f.k_xs = std::move(pc.factor);
  if (pivots) *pivots = pc.pivots;
  return f;
}

}  // namespace anys
