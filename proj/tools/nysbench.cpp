// nysbench: landmark selection, Nystrom factorization and benchmark sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "anys/anchornet.hpp"
#include "anys/bench.hpp"
#include "anys/diagnostics.hpp"
#include "anys/lowdisc.hpp"
#include "anys/selectors.hpp"

namespace {

using KeyValues = std::map<std::string, std::string>;

// Every option lands in a key/value map; the library parses and validates it,
// so a config file and the command line share one code path.
void add_kv(CLI::App* app, KeyValues& kv, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(flag, [&kv, key](const std::string& v) { kv[key] = v; }, help);
}

void add_kv_flag(CLI::App* app, KeyValues& kv, const std::string& flag, const std::string& key,
                 const std::string& help) {
  app->add_flag_callback(flag, [&kv, key] { kv[key] = "true"; }, help);
}

void add_data_options(CLI::App* app, KeyValues& kv) {
  add_kv(app, kv, "--data", "data", "CSV file of points");
  add_kv(app, kv, "--cols", "cols", "zero-based columns to keep, comma separated");
  add_kv_flag(app, kv, "--header", "header", "skip the first CSV line");
  add_kv_flag(app, kv, "--standardize", "standardize", "zero mean, unit variance per column");
  add_kv(app, kv, "--synth", "synth", "synthetic data: nonuniform2d:N or c1,c2:spread:count;...");
  add_kv(app, kv, "--seed", "seed", "master seed");
}

void add_kernel_options(CLI::App* app, KeyValues& kv) {
  add_kv(app, kv, "--kernel", "kernel", "gaussian|multiquadric|sigmoid|thinplate");
  add_kv(app, kv, "--sigma", "sigma", "V|half-radius|frac:F");
}

void add_factor_options(CLI::App* app, KeyValues& kv) {
  add_kv(app, kv, "--method", "method", "anchornet|uniform|kmeans|fps|rls|cholesky");
  add_kv(app, kv, "--tess-mult", "tess-mult", "anchor net tessellation multiplier");
  add_kv(app, kv, "--kmeans-iters", "kmeans-iters", "Lloyd iterations");
  add_kv(app, kv, "--rls-gamma", "rls-gamma", "ridge parameter for leverage scores");
  add_kv(app, kv, "--stabilize", "stabilize", "none|pinv-eps|qr-eps");
  add_kv(app, kv, "--eps", "eps", "truncation threshold");
  add_kv(app, kv, "--beta", "beta", "diagonal shift");
  add_kv(app, kv, "--norm", "norm", "two|fro|max|auto");
  add_kv(app, kv, "--eval-sample", "eval-sample", "evaluation subset size");
}

anys::SweepConfig config_from(KeyValues kv, const KeyValues& defaults = {}) {
  for (const auto& [k, v] : defaults) kv.try_emplace(k, v);
  return anys::parse_sweep_config(kv);
}

std::ostream& open_out(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
  if (path.empty() || path == "-") return std::cout;
  holder = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*holder) throw anys::DataError("cannot write " + path);
  return *holder;
}

anys::Kernel kernel_for(const anys::SweepConfig& cfg, const anys::Dataset& ds) {
  return anys::KernelSpec{cfg.kernel, anys::resolve_sigma(cfg.sigma, ds)};
}

anys::LandmarkSet select(const anys::SweepConfig& cfg, const anys::Dataset& ds, anys::Index m) {
  using anys::SelectorMethod;
  const auto seed = anys::run_seed(cfg.seed, 0);
  switch (cfg.methods.front()) {
    case SelectorMethod::anchornet: {
      anys::AnchorNetConfig ac;
      ac.tess_multiplier = cfg.tess_mult;
      return anys::select_landmarks(ds, m, ac);
    }
    case SelectorMethod::uniform: return anys::uniform_landmarks(ds, m, seed);
    case SelectorMethod::kmeans: return anys::kmeans_landmarks(ds, m, cfg.kmeans_iters, seed);
    case SelectorMethod::fps: return anys::fps_landmarks(ds, m, seed);
    case SelectorMethod::rls: return anys::rls_exact_landmarks(ds, kernel_for(cfg, ds), cfg.rls_gamma, m, seed);
    case SelectorMethod::cholesky: break;
  }
  std::vector<anys::Index> pivots;
  anys::pivoted_cholesky_factors(ds, kernel_for(cfg, ds), m, cfg.beta, &pivots);
  return anys::landmarks_from_indices(ds, pivots, "cholesky", m);
}

const KeyValues kSingleDefaults{{"method", "anchornet"}, {"rank", "50"}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchor-net Nystrom benchmark tool"};
  app.require_subcommand(1);

  KeyValues kv;
  std::string out_path;
  std::string config_path;

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV");
  std::string synth_spec;
  std::uint64_t synth_seed = 0;
  synth->add_option("--synth", synth_spec, "nonuniform2d:N or c1,c2:spread:count;...")->required();
  synth->add_option("--seed", synth_seed, "seed");
  synth->add_option("--out", out_path, "output CSV")->required();

  // select
  auto* sel = app.add_subcommand("select", "select landmarks and print them as CSV");
  add_data_options(sel, kv);
  add_kernel_options(sel, kv);
  add_factor_options(sel, kv);
  add_kv(sel, kv, "--rank", "rank", "number of landmarks");
  sel->add_option("--out", out_path, "output CSV (default stdout)");

  // approximate
  auto* approx = app.add_subcommand("approximate", "factor and score one configuration");
  add_data_options(approx, kv);
  add_kernel_options(approx, kv);
  add_factor_options(approx, kv);
  add_kv(approx, kv, "--rank", "rank", "number of landmarks");
  approx->add_option("--out", out_path, "output CSV (default stdout)");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "marking errors, fill distance and the error bound");
  add_data_options(diag, kv);
  add_kernel_options(diag, kv);
  add_factor_options(diag, kv);
  add_kv(diag, kv, "--rank", "rank", "number of landmarks");
  anys::Index lipschitz_samples = 2000;
  diag->add_option("--lipschitz-samples", lipschitz_samples, "pairs used to estimate the Lipschitz constant");

  // discrepancy
  auto* disc = app.add_subcommand("discrepancy", "star discrepancy of a point set in the unit cube");
  std::string disc_data;
  anys::Index halton_n = 0;
  int halton_dim = 2;
  std::string disc_method = "auto";
  anys::Index mc_samples = 100000;
  std::uint64_t mc_seed = 0;
  disc->add_option("--data", disc_data, "CSV of points in [0,1]^d");
  disc->add_option("--halton", halton_n, "use the first N Halton points instead");
  disc->add_option("--dim", halton_dim, "Halton dimension");
  disc->add_option("--method", disc_method, "auto|exact|mc")->check(CLI::IsMember({"auto", "exact", "mc"}));
  disc->add_option("--samples", mc_samples, "Monte-Carlo boxes");
  disc->add_option("--seed", mc_seed, "Monte-Carlo seed");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a method x rank x run sweep");
  sweep->add_option("--config", config_path, "key = value file; flags override it");
  add_data_options(sweep, kv);
  add_kernel_options(sweep, kv);
  add_factor_options(sweep, kv);
  add_kv(sweep, kv, "--methods", "methods", "comma separated methods");
  add_kv(sweep, kv, "--ranks", "ranks", "strictly increasing ranks, comma separated");
  add_kv(sweep, kv, "--runs", "runs", "runs per stochastic method");
  add_kv(sweep, kv, "--out", "out", "output CSV");
  add_kv_flag(sweep, kv, "--no-timing", "timings", "write zero timings for byte-identical reruns");

  // report
  auto* rep = app.add_subcommand("report", "mean over runs per group");
  std::string rep_in;
  std::string rep_keys = "method,m_requested";
  rep->add_option("--in", rep_in, "sweep CSV")->required();
  rep->add_option("--group", rep_keys, "group keys: method,kernel,sigma,m_requested");
  rep->add_option("--out", out_path, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::unique_ptr<std::ofstream> holder;
    if (*synth) {
      anys::SweepConfig cfg;
      std::vector<anys::ClusterSpec> specs;
      if (synth_spec.rfind("nonuniform2d:", 0) == 0) specs = anys::nonuniform_2d_layout(std::stol(synth_spec.substr(13)));
      else specs = anys::parse_cluster_specs(synth_spec);
      anys::save_csv(anys::synth_clusters(specs, synth_seed), out_path);
    } else if (*sel) {
      const auto cfg = config_from(kv, kSingleDefaults);
      const auto ds = anys::load_sweep_data(cfg);
      const auto lm = select(cfg, ds, cfg.ranks.front());
      auto& out = open_out(out_path, holder);
      out << "index";
      for (anys::Index j = 0; j < ds.d(); ++j) out << ",x" << j;
      out << '\n';
      for (anys::Index i = 0; i < lm.size(); ++i) {
        out << (lm.has_indices() ? lm.indices[i] : -1);
        for (anys::Index j = 0; j < ds.d(); ++j) out << ',' << anys::format_double(lm.coords(i, j));
        out << '\n';
      }
    } else if (*approx) {
      auto cfg = config_from(kv, kSingleDefaults);
      const auto ds = anys::load_sweep_data(cfg);
      cfg.runs = 1;
      cfg.methods.resize(1);
      cfg.ranks.resize(1);
      const auto rows = anys::run_sweep(cfg, ds);
      anys::write_rows_csv(open_out(out_path, holder), rows);
    } else if (*diag) {
      const auto cfg = config_from(kv, kSingleDefaults);
      const auto ds = anys::load_sweep_data(cfg);
      const auto kernel = kernel_for(cfg, ds);
      const auto lm = select(cfg, ds, cfg.ranks.front());
      std::cout << "n," << ds.n() << "\nr," << lm.size() << '\n';
      double pinv = 0.0;
      if (lm.has_indices() && ds.n() <= anys::kDenseGuard) {
        const auto me = anys::marking_errors(ds, lm, kernel);
        pinv = me.pinv_norm;
        std::cout << "e_r," << anys::format_double(me.e_r) << "\ne_hat_r," << anys::format_double(me.e_hat_r)
                  << "\npinv_norm," << anys::format_double(me.pinv_norm) << "\nmarking_bound,"
                  << anys::format_double(me.bound) << '\n';
        if (ds.n() <= 500) {
          const auto bc = anys::verify_bound(ds, lm, kernel);
          std::cout << "max_error," << anys::format_double(bc.max_error) << "\nbound_holds,"
                    << (bc.holds ? "true" : "false") << '\n';
        }
      }
      const auto geo = anys::fill_distance(ds, lm, pinv);
      const double lip = anys::estimate_lipschitz(kernel, ds, lipschitz_samples, anys::run_seed(cfg.seed, 0));
      std::cout << "fill_distance," << anys::format_double(geo.delta) << "\nlipschitz_estimate,"
                << anys::format_double(lip) << '\n';
      if (pinv > 0.0) std::cout << "lipschitz_bound," << anys::format_double(geo.lipschitz_bound(lip)) << '\n';
    } else if (*disc) {
      anys::PointMatrix pts;
      if (!disc_data.empty()) pts = anys::load_csv(disc_data).points;
      else if (halton_n > 0) pts = anys::halton(halton_n, halton_dim).points;
      else throw std::invalid_argument("give --data or --halton");
      anys::DiscrepancyMethod method = anys::MonteCarlo{mc_samples, mc_seed};
      if (disc_method != "mc" && pts.cols() == 1) method = anys::Exact1d{};
      else if (disc_method != "mc" && pts.cols() == 2) method = anys::Exact2d{};
      else if (disc_method == "exact") throw std::invalid_argument("exact discrepancy needs d <= 2");
      const auto est = anys::star_discrepancy(pts, method);
      std::cout << "star_discrepancy," << anys::format_double(est.value) << "\nlower_bound,"
                << (est.is_lower_bound ? "true" : "false") << '\n';
    } else if (*sweep) {
      KeyValues merged = config_path.empty() ? KeyValues{} : anys::read_key_value_file(config_path);
      for (const auto& [k, v] : kv) {
        // singular and plural spellings name the same key; the flag wins
        if (k == "method") merged.erase("methods");
        if (k == "methods") merged.erase("method");
        if (k == "rank") merged.erase("ranks");
        if (k == "ranks") merged.erase("rank");
        merged[k] = v;
      }
      if (kv.count("timings")) merged["timings"] = "false";
      const auto cfg = anys::parse_sweep_config(merged);
      const auto rows = anys::run_sweep(cfg);
      if (cfg.out.empty()) anys::write_rows_csv(std::cout, rows, cfg.timings);
    } else if (*rep) {
      std::vector<std::string> keys;
      std::string item;
      for (char c : rep_keys + ",") {
        if (c == ',') {
          if (!item.empty()) keys.push_back(item);
          item.clear();
        } else {
          item += c;
        }
      }
      const auto summary = anys::report(anys::read_rows_csv(rep_in), keys);
      anys::write_summary_csv(open_out(out_path, holder), summary, keys);
    }
  } catch (const std::exception& e) {
    std::cerr << "nysbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
