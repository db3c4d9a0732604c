#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "anys/kernels.hpp"
#include "anys/landmarks.hpp"

namespace anys {

enum class Stabilization { none, pinv_eps, qr_eps };

struct StabilizationSpec {
  Stabilization mode = Stabilization::none;
  double eps = 0.0;
};

Stabilization parse_stabilization(std::string_view name);
std::string_view to_string(Stabilization mode);

/// K ~ (K_XS * core) * (q_t * K_SX). The product core * q_t is K_SS^+ (none),
/// the epsilon pseudoinverse (pinv_eps) or R_eps^+ Q^T (qr_eps), stored split
/// along the retained singular triplets: core = V_k diag(1/s_k) and q_t = U_k^T
/// (times Q^T for qr_eps). An empty q_t stands for the identity.
struct NystromFactors {
  Eigen::MatrixXd k_xs;
  Eigen::MatrixXd core;
  Eigen::MatrixXd q_t;
  StabilizationSpec stabilization;
  double pinv_norm = 0.0;  // ||core * q_t||_2
  double min_sv = 0.0;     // of K_SS
  double max_sv = 0.0;
  Index retained = 0;  // singular values kept by the truncation

  Index rank() const { return k_xs.cols(); }
  Index n() const { return k_xs.rows(); }
  bool symmetric() const { return stabilization.mode != Stabilization::qr_eps; }
};

/// Builds the factors from K_XS and K_SS directly.
NystromFactors factor_blocks(Eigen::MatrixXd k_xs, const Eigen::MatrixXd& k_ss, StabilizationSpec stab);

/// Nystrom factors for landmarks `lm`. With beta > 0 the target is K + beta I;
/// when the landmarks are dataset rows, K_SS and the matching entries of K_XS
/// carry the shift too. Throws on non-finite kernel values.
NystromFactors factor(const Dataset& ds, const LandmarkSet& lm, const Kernel& kernel,
                      StabilizationSpec stab = {}, double beta = 0.0);

/// Approximation times v without forming the n x n matrix.
Eigen::VectorXd apply(const NystromFactors& f, const Eigen::VectorXd& v);

/// Dense approximation restricted to rows/cols `idx` (all when empty).
Eigen::MatrixXd reconstruct(const NystromFactors& f, const std::vector<Index>& idx = {});

// ---------------------------------------------------------------------------
// Error measurement

enum class NormKind { two, fro, max };

NormKind parse_norm(std::string_view name);
std::string_view to_string(NormKind norm);

struct EvalSubset {
  Index size = 10000;
  std::uint64_t seed = 0;
};

struct ErrorReport {
  NormKind norm = NormKind::two;
  double value = 0.0;
  double relative = 0.0;
  Index eval_size = 0;
  double t_select_ms = 0.0;
  double t_factor_ms = 0.0;
  double t_eval_ms = 0.0;
};

/// Largest |eigenvalue| of a symmetric operator by Lanczos with full
/// reorthogonalization. Deterministic (fixed start vector seed).
double lanczos_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op, Index n,
                    double tol = 1e-10, Index max_iter = 300);

/// ||A||_2; exact through a dense decomposition up to 600 rows, Lanczos above.
double spectral_norm(const Eigen::MatrixXd& a, bool symmetric);

double matrix_norm(const Eigen::MatrixXd& a, NormKind norm, bool symmetric = true);

/// Scores factorizations against the target K (or K + beta I) restricted to
/// the evaluation rows. The target block is cached when it has at most 5000
/// rows; larger Frobenius/max evaluations rebuild it blockwise on each call.
/// The two-norm is refused above 5000 rows.
class ErrorEvaluator {
 public:
  ErrorEvaluator(const Dataset& ds, const Kernel& kernel, NormKind norm,
                 std::optional<EvalSubset> subset = std::nullopt, double beta = 0.0);

  ErrorReport evaluate(const NystromFactors& f) const;

  const std::vector<Index>& rows() const { return rows_; }
  /// Cached target; empty for large evaluation sets.
  const Eigen::MatrixXd& target() const { return target_; }
  double target_norm() const { return target_norm_; }
  NormKind norm() const { return norm_; }

 private:
  Eigen::MatrixXd target_columns(Index first, Index count) const;

  std::vector<Index> rows_;
  PointMatrix points_;  // evaluation rows
  Kernel kernel_;
  double beta_ = 0.0;
  Eigen::MatrixXd target_;
  NormKind norm_;
  double target_norm_ = 0.0;
};

ErrorReport approx_error(const Dataset& ds, const NystromFactors& f, const Kernel& kernel, NormKind norm,
                         std::optional<EvalSubset> subset = std::nullopt, double beta = 0.0);

// ---------------------------------------------------------------------------
// Pivoted Cholesky

struct PivotedCholesky {
  Eigen::MatrixXd factor;  // n x r, K ~ L L^T
  std::vector<Index> pivots;
  Eigen::VectorXd residual_diag;
  std::vector<double> residual_trace;  // trace of the residual after each step
};

/// Greedy diagonal pivoting on an implicit SPSD matrix given by its diagonal
/// and a column oracle. Stops early when the residual diagonal is exhausted.
PivotedCholesky pivoted_cholesky(const Eigen::VectorXd& diag,
                                 const std::function<void(Index, Eigen::Ref<Eigen::VectorXd>)>& column,
                                 Index rank);

/// Rank-r pivoted Cholesky of K (+ beta I), returned as Nystrom-compatible
/// factors (k_xs = L, core = I).
NystromFactors pivoted_cholesky_factors(const Dataset& ds, const Kernel& kernel, Index rank, double beta = 0.0,
                                        std::vector<Index>* pivots = nullptr);

}  // namespace anys
