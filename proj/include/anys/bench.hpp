#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anys/anchornet.hpp"
#include "anys/kernels.hpp"
#include "anys/nystrom.hpp"
#include "anys/selectors.hpp"

namespace anys {

struct SigmaRule {
  enum class Kind { absolute, half_radius, fraction };
  Kind kind = Kind::half_radius;
  double value = 0.0;
};

/// "2.3" | "half-radius" | "frac:F"
SigmaRule parse_sigma_rule(const std::string& text);

/// Relative rules need a standardized dataset; the result must be positive.
double resolve_sigma(const SigmaRule& rule, const Dataset& ds);

struct SweepConfig {
  std::string data_path;
  std::vector<int> columns;
  bool header = false;
  bool standardize = false;
  /// Used when data_path is empty: "nonuniform2d:N" or a cluster list
  /// "c1,c2:spread:count;...".
  std::string synth;

  KernelFamily kernel = KernelFamily::gaussian;
  SigmaRule sigma;
  std::vector<SelectorMethod> methods{SelectorMethod::anchornet, SelectorMethod::uniform};
  std::vector<Index> ranks{50, 100};
  int runs = 10;
  StabilizationSpec stabilization;
  double beta = 0.0;
  std::optional<NormKind> norm;  // default: two for n <= 5000, else fro on a subset
  Index eval_sample = 10000;
  std::uint64_t seed = 0;
  double tess_mult = 4.0;
  int kmeans_iters = 5;
  double rls_gamma = 1e-3;
  bool timings = true;  // false writes zero timings so reruns are byte-identical
  std::string out;
};

/// Key/value pairs from a flat "key = value" file; '#' starts a comment.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

/// Builds and validates a config from key/value pairs (unknown keys rejected).
SweepConfig parse_sweep_config(const std::map<std::string, std::string>& kv);

void validate(const SweepConfig& cfg);

Dataset load_sweep_data(const SweepConfig& cfg);

struct ResultRow {
  std::string method;
  std::string kernel;
  double sigma = 0.0;
  Index m_requested = 0;
  Index m_actual = 0;
  int run = 0;
  std::uint64_t seed = 0;
  double err_value = 0.0;
  std::string err_norm_kind;
  double relative_err = 0.0;
  double t_select_ms = 0.0;
  double t_factor_ms = 0.0;
  double t_eval_ms = 0.0;
  double min_sv = 0.0;
  double max_sv = 0.0;
  double pinv_norm = 0.0;
  /// Non-empty for cells that could not run; written as "skip:<reason>" in
  /// the err_norm_kind column with NaN numeric fields.
  std::string skip_reason;

  bool skipped() const { return !skip_reason.empty(); }
};

inline constexpr const char* kResultHeader =
    "method,kernel,sigma,m_requested,m_actual,run,seed,err_value,err_norm_kind,relative_err,"
    "t_select_ms,t_factor_ms,t_eval_ms,min_sv,max_sv,pinv_norm";

/// Seed of run `run` under master seed `master`.
std::uint64_t run_seed(std::uint64_t master, int run);

/// Runs one (method, rank, run) cell against a prepared evaluator.
ResultRow run_cell(const Dataset& ds, const Kernel& kernel, const ErrorEvaluator& evaluator,
                   const SweepConfig& cfg, SelectorMethod method, Index rank, int run);

/// Every (method, rank, run) cell; rows sorted by (method, rank, run).
std::vector<ResultRow> run_sweep(const SweepConfig& cfg);
std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const Dataset& ds);

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool timings = true);
void write_rows_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows, bool timings = true);
std::vector<ResultRow> read_rows_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::map<std::string, std::string> key;
  Index runs = 0;
  double mean_err = 0.0;
  double mean_relative_err = 0.0;
  double mean_m_actual = 0.0;
  double mean_t_select_ms = 0.0;
  double mean_t_factor_ms = 0.0;
  double mean_t_eval_ms = 0.0;
};

/// Mean over runs per group. Keys are any of method, kernel, sigma,
/// m_requested. Skipped rows keep their group but contribute no values.
/// Throws if the non-skipped rows mix norm kinds.
std::vector<SummaryRow> report(const std::vector<ResultRow>& rows,
                               const std::vector<std::string>& keys = {"method", "m_requested"});

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, const std::vector<std::string>& keys);

std::string format_double(double v);

}  // namespace anys
