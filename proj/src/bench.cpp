#include "anys/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <tuple>

#include "anys/random.hpp"

namespace anys {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw std::invalid_argument(what + ": not a number: '" + text + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& text, const std::string& what) {
  Int v{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw std::invalid_argument(what + ": not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw std::invalid_argument(what + ": not a boolean: '" + text + "'");
}

template <class T, class F>
std::vector<T> parse_list(const std::string& text, F&& item) {
  std::vector<T> out;
  for (auto& tok : split(text, ',')) {
    if (tok.empty()) continue;
    out.push_back(item(tok));
  }
  return out;
}

// RLS rows carry the label of the exact desk-scale variant.
std::string method_label(SelectorMethod method) {
  return method == SelectorMethod::rls ? "RLS-exact" : std::string(to_string(method));
}

ResultRow skip_row(const SweepConfig& cfg, double sigma, SelectorMethod method, Index rank, int run,
                   std::string reason) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ResultRow row;
  row.method = method_label(method);
  row.kernel = std::string(to_string(cfg.kernel));
  row.sigma = sigma;
  row.m_requested = rank;
  row.m_actual = 0;
  row.run = run;
  row.seed = run_seed(cfg.seed, run);
  row.err_value = row.relative_err = nan;
  row.t_select_ms = row.t_factor_ms = row.t_eval_ms = nan;
  row.min_sv = row.max_sv = row.pinv_norm = nan;
  for (auto& c : reason)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  row.skip_reason = std::move(reason);
  return row;
}

NormKind default_norm(const SweepConfig& cfg, Index n) {
  if (cfg.norm) return *cfg.norm;
  return n <= kDenseGuard ? NormKind::two : NormKind::fro;
}

std::optional<EvalSubset> eval_subset(const SweepConfig& cfg, Index n) {
  if (n <= cfg.eval_sample) return std::nullopt;
  return EvalSubset{cfg.eval_sample, derive_seed(cfg.seed, 0x5EED'E7A1ULL)};
}

}  // namespace

SigmaRule parse_sigma_rule(const std::string& text) {
  const std::string t = trim(text);
  if (t == "half-radius") return {SigmaRule::Kind::half_radius, 0.5};
  if (t.rfind("frac:", 0) == 0) {
    const double f = parse_double(t.substr(5), "sigma fraction");
    if (!(f > 0.0)) throw std::invalid_argument("sigma fraction must be positive");
    return {SigmaRule::Kind::fraction, f};
  }
  return {SigmaRule::Kind::absolute, parse_double(t, "sigma")};
}

double resolve_sigma(const SigmaRule& rule, const Dataset& ds) {
  double sigma = rule.value;
  if (rule.kind != SigmaRule::Kind::absolute) {
    if (!ds.standardized) throw std::invalid_argument("relative sigma rules need a standardized dataset");
    const DataStats st = stats(ds);
    sigma = rule.kind == SigmaRule::Kind::half_radius ? st.half_radius : rule.value * st.radius;
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("resolved sigma must be positive, got " + format_double(sigma));
  return sigma;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw DataError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

SweepConfig parse_sweep_config(const std::map<std::string, std::string>& kv) {
  SweepConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "data") cfg.data_path = value;
    else if (key == "cols")
      cfg.columns = parse_list<int>(value, [](const std::string& s) { return parse_int<int>(s, "cols"); });
    else if (key == "header") cfg.header = parse_bool(value, key);
    else if (key == "standardize") cfg.standardize = parse_bool(value, key);
    else if (key == "synth") cfg.synth = value;
    else if (key == "kernel") cfg.kernel = parse_kernel_family(value);
    else if (key == "sigma") cfg.sigma = parse_sigma_rule(value);
    else if (key == "methods" || key == "method")
      cfg.methods = parse_list<SelectorMethod>(value, [](const std::string& s) { return parse_selector(s); });
    else if (key == "ranks" || key == "rank")
      cfg.ranks = parse_list<Index>(value, [](const std::string& s) { return parse_int<Index>(s, "ranks"); });
    else if (key == "runs") cfg.runs = parse_int<int>(value, key);
    else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(value, key);
    else if (key == "stabilize") cfg.stabilization.mode = parse_stabilization(value);
    else if (key == "eps") cfg.stabilization.eps = parse_double(value, key);
    else if (key == "beta") cfg.beta = parse_double(value, key);
    else if (key == "norm") cfg.norm = value == "auto" ? std::nullopt : std::optional(parse_norm(value));
    else if (key == "eval-sample") cfg.eval_sample = parse_int<Index>(value, key);
    else if (key == "tess-mult") cfg.tess_mult = parse_double(value, key);
    else if (key == "kmeans-iters") cfg.kmeans_iters = parse_int<int>(value, key);
    else if (key == "rls-gamma") cfg.rls_gamma = parse_double(value, key);
    else if (key == "timings") cfg.timings = parse_bool(value, key);
    else if (key == "out") cfg.out = value;
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  validate(cfg);
  return cfg;
}

void validate(const SweepConfig& cfg) {
  if (cfg.methods.empty()) throw std::invalid_argument("no methods given");
  if (cfg.ranks.empty()) throw std::invalid_argument("no ranks given");
  for (std::size_t i = 0; i < cfg.ranks.size(); ++i) {
    if (cfg.ranks[i] < 1) throw std::invalid_argument("ranks must be positive");
    if (i > 0 && cfg.ranks[i] <= cfg.ranks[i - 1]) throw std::invalid_argument("ranks must be strictly increasing");
  }
  if (std::set<SelectorMethod>(cfg.methods.begin(), cfg.methods.end()).size() != cfg.methods.size())
    throw std::invalid_argument("duplicate method in list");
  if (cfg.runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (cfg.stabilization.mode != Stabilization::none && !(cfg.stabilization.eps > 0.0))
    throw std::invalid_argument("stabilization needs eps > 0");
  if (cfg.beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  if (cfg.eval_sample < 1) throw std::invalid_argument("eval-sample must be positive");
  if (cfg.tess_mult < 2.0 || cfg.tess_mult > 20.0) throw std::invalid_argument("tess-mult must lie in [2, 20]");
  if (cfg.kmeans_iters < 0) throw std::invalid_argument("kmeans-iters must be nonnegative");
  if (!(cfg.rls_gamma > 0.0)) throw std::invalid_argument("rls-gamma must be positive");
  if (cfg.data_path.empty() == cfg.synth.empty()) throw std::invalid_argument("give exactly one of data or synth");
}

Dataset load_sweep_data(const SweepConfig& cfg) {
  Dataset ds;
  if (!cfg.data_path.empty()) {
    ds = load_csv(cfg.data_path, CsvOptions{cfg.columns, cfg.header});
  } else if (cfg.synth.rfind("nonuniform2d:", 0) == 0) {
    const auto n = parse_int<Index>(cfg.synth.substr(13), "synth size");
    ds = synth_clusters(nonuniform_2d_layout(n), derive_seed(cfg.seed, 0xDA7AULL));
  } else {
    ds = synth_clusters(parse_cluster_specs(cfg.synth), derive_seed(cfg.seed, 0xDA7AULL));
  }
  if (cfg.standardize) ds = standardize(ds);
  return ds;
}

std::uint64_t run_seed(std::uint64_t master, int run) {
  return derive_seed(master, static_cast<std::uint64_t>(run) + 1);
}

ResultRow run_cell(const Dataset& ds, const Kernel& kernel, const ErrorEvaluator& evaluator,
                   const SweepConfig& cfg, SelectorMethod method, Index rank, int run) {
  const double sigma = kernel.spec() ? kernel.spec()->sigma : 0.0;
  if (rank > ds.n()) return skip_row(cfg, sigma, method, rank, run, "rank exceeds n");
  const bool needs_spsd = method == SelectorMethod::rls || method == SelectorMethod::cholesky;
  if (needs_spsd && !kernel.is_spsd())
    return skip_row(cfg, sigma, method, rank, run, "indefinite kernel");
  if (method == SelectorMethod::rls && ds.n() > kDenseGuard)
    return skip_row(cfg, sigma, method, rank, run, "exact rls needs n <= 5000");

  const std::uint64_t seed = run_seed(cfg.seed, run);
  ResultRow row;
  row.method = method_label(method);
  row.kernel = kernel.name();
  row.sigma = sigma;
  row.m_requested = rank;
  row.run = run;
  row.seed = seed;

  try {
    NystromFactors f;
    auto t0 = Clock::now();
    if (method == SelectorMethod::cholesky) {
      f = pivoted_cholesky_factors(ds, kernel, rank, cfg.beta);
      row.t_select_ms = 0.0;
      row.t_factor_ms = elapsed_ms(t0);
    } else {
      LandmarkSet lm;
      switch (method) {
        case SelectorMethod::anchornet: {
          AnchorNetConfig ac;
          ac.tess_multiplier = cfg.tess_mult;
          lm = select_landmarks(ds, rank, ac);
          break;
        }
        case SelectorMethod::uniform: lm = uniform_landmarks(ds, rank, seed); break;
        case SelectorMethod::kmeans: lm = kmeans_landmarks(ds, rank, cfg.kmeans_iters, seed); break;
        case SelectorMethod::fps: lm = fps_landmarks(ds, rank, seed); break;
        case SelectorMethod::rls: lm = rls_exact_landmarks(ds, kernel, cfg.rls_gamma, rank, seed); break;
        case SelectorMethod::cholesky: break;
      }
      row.t_select_ms = elapsed_ms(t0);
      t0 = Clock::now();
      f = factor(ds, lm, kernel, cfg.stabilization, cfg.beta);
      row.t_factor_ms = elapsed_ms(t0);
    }
    row.m_actual = f.rank();
    t0 = Clock::now();
    const ErrorReport rep = evaluator.evaluate(f);
    row.t_eval_ms = elapsed_ms(t0);
    row.err_value = rep.value;
    row.err_norm_kind = std::string(to_string(rep.norm));
    row.relative_err = rep.relative;
    row.min_sv = f.min_sv;
    row.max_sv = f.max_sv;
    row.pinv_norm = f.pinv_norm;
  } catch (const std::exception& e) {
    return skip_row(cfg, sigma, method, rank, run, std::string("failed: ") + e.what());
  }
  return row;
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const Dataset ds = load_sweep_data(cfg);
  auto rows = run_sweep(cfg, ds);
  if (!cfg.out.empty()) write_rows_csv(cfg.out, rows, cfg.timings);
  return rows;
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const Dataset& ds) {
  if (cfg.methods.empty() || cfg.ranks.empty() || cfg.runs < 1) throw std::invalid_argument("invalid sweep config");
  const Kernel kernel = KernelSpec{cfg.kernel, resolve_sigma(cfg.sigma, ds)};
  const ErrorEvaluator evaluator(ds, kernel, default_norm(cfg, ds.n()), eval_subset(cfg, ds.n()), cfg.beta);

  std::vector<ResultRow> rows;
  for (const auto method : cfg.methods) {
    const int runs = is_stochastic(method) ? cfg.runs : 1;
    for (const Index rank : cfg.ranks)
      for (int run = 0; run < runs; ++run) rows.push_back(run_cell(ds, kernel, evaluator, cfg, method, rank, run));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.method, a.m_requested, a.run) < std::tie(b.method, b.m_requested, b.run);
  });
  if (!cfg.timings)
    for (auto& r : rows)
      if (!r.skipped()) r.t_select_ms = r.t_factor_ms = r.t_eval_ms = 0.0;
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool timings) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    const auto t = [&](double v) { return timings || r.skipped() ? format_double(v) : std::string("0"); };
    out << r.method << ',' << r.kernel << ',' << format_double(r.sigma) << ',' << r.m_requested << ','
        << r.m_actual << ',' << r.run << ',' << r.seed << ',' << format_double(r.err_value) << ','
        << (r.skipped() ? "skip:" + r.skip_reason : r.err_norm_kind) << ',' << format_double(r.relative_err) << ','
        << t(r.t_select_ms) << ',' << t(r.t_factor_ms) << ',' << t(r.t_eval_ms) << ',' << format_double(r.min_sv)
        << ',' << format_double(r.max_sv) << ',' << format_double(r.pinv_norm) << '\n';
  }
}

void write_rows_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows, bool timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_rows_csv(out, rows, timings);
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

double parse_csv_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_double(s, "result field");
}

}  // namespace

std::vector<ResultRow> read_rows_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultHeader) throw DataError(path.string() + ": unexpected header");
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 16) throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 16 fields");
    try {
      ResultRow r;
      r.method = f[0];
      r.kernel = f[1];
      r.sigma = parse_csv_double(f[2]);
      r.m_requested = parse_int<Index>(f[3], "m_requested");
      r.m_actual = parse_int<Index>(f[4], "m_actual");
      r.run = parse_int<int>(f[5], "run");
      r.seed = parse_int<std::uint64_t>(f[6], "seed");
      r.err_value = parse_csv_double(f[7]);
      if (f[8].rfind("skip:", 0) == 0) r.skip_reason = f[8].substr(5);
      else r.err_norm_kind = f[8];
      r.relative_err = parse_csv_double(f[9]);
      r.t_select_ms = parse_csv_double(f[10]);
      r.t_factor_ms = parse_csv_double(f[11]);
      r.t_eval_ms = parse_csv_double(f[12]);
      r.min_sv = parse_csv_double(f[13]);
      r.max_sv = parse_csv_double(f[14]);
      r.pinv_norm = parse_csv_double(f[15]);
      rows.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<SummaryRow> report(const std::vector<ResultRow>& rows, const std::vector<std::string>& keys) {
  static const std::set<std::string> allowed{"method", "kernel", "sigma", "m_requested"};
  for (const auto& k : keys)
    if (!allowed.count(k)) throw std::invalid_argument("unknown group key '" + k + "'");

  std::string norm;
  for (const auto& r : rows) {
    if (r.skipped()) continue;
    if (norm.empty()) norm = r.err_norm_kind;
    else if (norm != r.err_norm_kind) throw std::invalid_argument("rows mix norm kinds " + norm + " and " + r.err_norm_kind);
  }

  const auto key_of = [&](const ResultRow& r) {
    std::map<std::string, std::string> key;
    for (const auto& k : keys) {
      if (k == "method") key[k] = r.method;
      else if (k == "kernel") key[k] = r.kernel;
      else if (k == "sigma") key[k] = format_double(r.sigma);
      else key[k] = std::to_string(r.m_requested);
    }
    return key;
  };

  // Groups keep first-appearance order; means are accumulated in row order.
  std::vector<SummaryRow> out;
  std::map<std::map<std::string, std::string>, std::size_t> where;
  for (const auto& r : rows) {
    auto key = key_of(r);
    auto [it, inserted] = where.try_emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.key = std::move(key);
      out.push_back(std::move(s));
    }
    if (r.skipped()) continue;
    SummaryRow& s = out[it->second];
    ++s.runs;
    s.mean_err += r.err_value;
    s.mean_relative_err += r.relative_err;
    s.mean_m_actual += static_cast<double>(r.m_actual);
    s.mean_t_select_ms += r.t_select_ms;
    s.mean_t_factor_ms += r.t_factor_ms;
    s.mean_t_eval_ms += r.t_eval_ms;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& s : out) {
    if (s.runs == 0) {
      s.mean_err = s.mean_relative_err = s.mean_m_actual = nan;
      s.mean_t_select_ms = s.mean_t_factor_ms = s.mean_t_eval_ms = nan;
      continue;
    }
    const double c = static_cast<double>(s.runs);
    s.mean_err /= c;
    s.mean_relative_err /= c;
    s.mean_m_actual /= c;
    s.mean_t_select_ms /= c;
    s.mean_t_factor_ms /= c;
    s.mean_t_eval_ms /= c;
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, const std::vector<std::string>& keys) {
  for (const auto& k : keys) out << k << ',';
  out << "runs,mean_err,mean_relative_err,mean_m_actual,mean_t_select_ms,mean_t_factor_ms,mean_t_eval_ms\n";
  for (const auto& s : rows) {
    for (const auto& k : keys) out << s.key.at(k) << ',';
    out << s.runs << ',' << format_double(s.mean_err) << ',' << format_double(s.mean_relative_err) << ','
        << format_double(s.mean_m_actual) << ',' << format_double(s.mean_t_select_ms) << ','
        << format_double(s.mean_t_factor_ms) << ',' << format_double(s.mean_t_eval_ms) << '\n';
  }
}

}  // namespace anys
