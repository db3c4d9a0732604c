#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "anys/bench.hpp"

using namespace anys;
namespace fs = std::filesystem;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.synth = "0,0:0.5:60;3,1:1:60";
  cfg.kernel = KernelFamily::gaussian;
  cfg.sigma = parse_sigma_rule("1.0");
  cfg.methods = {SelectorMethod::uniform, SelectorMethod::kmeans};
  cfg.ranks = {5, 10, 20};
  cfg.runs = 10;
  cfg.seed = 42;
  cfg.timings = false;
  return cfg;
}

std::string csv_of(const std::vector<ResultRow>& rows, bool timings = false) {
  std::ostringstream os;
  write_rows_csv(os, rows, timings);
  return os.str();
}

ResultRow row(const std::string& method, Index m, double err, const std::string& norm = "two") {
  ResultRow r;
  r.method = method;
  r.kernel = "gaussian";
  r.m_requested = m;
  r.m_actual = m;
  r.err_value = err;
  r.relative_err = err / 10;
  r.err_norm_kind = norm;
  return r;
}

}  // namespace

TEST_CASE("sigma rules") {
  Dataset ds;
  ds.points.resize(2, 1);
  ds.points << -1, 1;
  ds.standardized = true;
  CHECK(resolve_sigma(parse_sigma_rule("half-radius"), ds) == 0.5);
  CHECK(resolve_sigma(parse_sigma_rule("2.3"), ds) == 2.3);
  CHECK(resolve_sigma(parse_sigma_rule("frac:0.1"), ds) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(resolve_sigma(parse_sigma_rule("0"), ds), std::invalid_argument);
  CHECK_THROWS_AS(resolve_sigma(parse_sigma_rule("-1"), ds), std::invalid_argument);
  CHECK_THROWS(parse_sigma_rule("frac:-2"));
  CHECK_THROWS(parse_sigma_rule("wide"));

  Dataset raw = ds;
  raw.standardized = false;
  CHECK_THROWS_AS(resolve_sigma(parse_sigma_rule("half-radius"), raw), std::invalid_argument);
  CHECK(resolve_sigma(parse_sigma_rule("1.5"), raw) == 1.5);

  Dataset point;
  point.points = PointMatrix::Zero(1, 2);
  point.standardized = true;
  CHECK_THROWS_AS(resolve_sigma(parse_sigma_rule("half-radius"), point), std::invalid_argument);
}

TEST_CASE("config parsing and validation") {
  const SweepConfig cfg = parse_sweep_config({{"synth", "nonuniform2d:200"},
                                              {"kernel", "sigmoid"},
                                              {"sigma", "frac:0.25"},
                                              {"methods", "anchornet, uniform,fps"},
                                              {"ranks", "10,20,40"},
                                              {"runs", "3"},
                                              {"seed", "18446744073709551615"},
                                              {"stabilize", "pinv-eps"},
                                              {"eps", "1e-8"},
                                              {"norm", "max"},
                                              {"timings", "false"}});
  CHECK(cfg.kernel == KernelFamily::sigmoid);
  CHECK(cfg.sigma.kind == SigmaRule::Kind::fraction);
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.ranks == std::vector<Index>{10, 20, 40});
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK(cfg.stabilization.mode == Stabilization::pinv_eps);
  CHECK(cfg.stabilization.eps == 1e-8);
  CHECK(cfg.norm == NormKind::max);
  CHECK_FALSE(cfg.timings);

  const std::map<std::string, std::string> base{{"synth", "0:1:10"}};
  auto with = [&](const std::string& k, const std::string& v) {
    auto kv = base;
    kv[k] = v;
    return kv;
  };
  CHECK_THROWS(parse_sweep_config(with("ranks", "10,10")));
  CHECK_THROWS(parse_sweep_config(with("ranks", "20,10")));
  CHECK_THROWS(parse_sweep_config(with("runs", "0")));
  CHECK_THROWS(parse_sweep_config(with("bogus", "1")));
  CHECK_THROWS(parse_sweep_config(with("methods", "uniform,uniform")));
  CHECK_THROWS(parse_sweep_config(with("stabilize", "qr-eps")));  // no eps
  CHECK_THROWS(parse_sweep_config(with("data", "x.csv")));       // both sources
  CHECK_THROWS(parse_sweep_config({}));
  CHECK_NOTHROW(parse_sweep_config(base));
}

TEST_CASE("key/value config file") {
  const fs::path p = fs::temp_directory_path() / "anys_bench_cfg.txt";
  std::ofstream(p) << "# sweep\nsynth = 0:1:10\n\nranks=2, 4  # trailing comment\nkernel = \"gaussian\"\n";
  const auto kv = read_key_value_file(p);
  CHECK(kv.at("synth") == "0:1:10");
  CHECK(kv.at("ranks") == "2, 4");
  CHECK(kv.at("kernel") == "gaussian");
  std::ofstream(p) << "novalue\n";
  CHECK_THROWS_AS(read_key_value_file(p), DataError);
}

TEST_CASE("sweep cardinality and determinism") {
  const SweepConfig cfg = small_config();
  const auto rows = run_sweep(cfg);
  CHECK(rows.size() == 60);
  std::set<std::tuple<std::string, Index, int>> cells;
  for (const auto& r : rows) {
    cells.insert({r.method, r.m_requested, r.run});
    CHECK(r.m_actual == r.m_requested);
    CHECK(r.err_norm_kind == "two");
    CHECK(r.err_value >= 0.0);
  }
  CHECK(cells.size() == 60);
  CHECK(csv_of(rows) == csv_of(run_sweep(cfg)));

  // seeds depend on the run index only
  for (const auto& r : rows) CHECK(r.seed == run_seed(cfg.seed, r.run));
  // canonical order
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::tie(rows[i - 1].method, rows[i - 1].m_requested, rows[i - 1].run) <
          std::tie(rows[i].method, rows[i].m_requested, rows[i].run));
}

TEST_CASE("deterministic methods run once; skips are explicit") {
  SweepConfig cfg = small_config();
  cfg.kernel = KernelFamily::sigmoid;
  cfg.methods = {SelectorMethod::anchornet, SelectorMethod::fps, SelectorMethod::cholesky, SelectorMethod::rls,
                 SelectorMethod::uniform};
  cfg.runs = 3;
  cfg.ranks = {5, 10, 200};
  const auto rows = run_sweep(cfg);
  // anchornet, fps, cholesky once; rls and uniform three times
  CHECK(rows.size() == 3 * 3 + 2 * 3 * 3);
  std::set<std::pair<std::string, Index>> seen;
  for (const auto& r : rows) {
    seen.insert({r.method, r.m_requested});
    if (r.m_requested == 200) {
      CHECK(r.skipped());
      continue;
    }
    if (r.method == "cholesky" || r.method == "RLS-exact") {
      CHECK(r.skipped());
      CHECK(std::isnan(r.err_value));
      CHECK(r.m_actual == 0);
    } else {
      CHECK_FALSE(r.skipped());
      if (r.method == "anchornet") CHECK(r.m_actual <= r.m_requested);
      else CHECK(r.m_actual == r.m_requested);
    }
  }
  CHECK(seen.size() == 15);
  const std::string csv = csv_of(rows);
  CHECK(csv.find("skip:indefinite kernel") != std::string::npos);
  CHECK(csv.find("skip:rank exceeds n") != std::string::npos);
}

TEST_CASE("CSV layout and round trip") {
  SweepConfig cfg = small_config();
  cfg.methods = {SelectorMethod::anchornet, SelectorMethod::uniform};
  cfg.runs = 2;
  cfg.out = (fs::temp_directory_path() / "anys_bench_rows.csv").string();
  const auto rows = run_sweep(cfg);
  std::ifstream in(cfg.out);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "method,kernel,sigma,m_requested,m_actual,run,seed,err_value,err_norm_kind,relative_err,"
        "t_select_ms,t_factor_ms,t_eval_ms,min_sv,max_sv,pinv_norm");
  const auto back = read_rows_csv(cfg.out);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].err_value == rows[i].err_value);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].min_sv == rows[i].min_sv);
  }
  CHECK(csv_of(back) == csv_of(rows));
}

TEST_CASE("timings are recorded when enabled") {
  SweepConfig cfg = small_config();
  cfg.methods = {SelectorMethod::uniform};
  cfg.runs = 1;
  cfg.timings = true;
  const auto rows = run_sweep(cfg);
  for (const auto& r : rows) {
    CHECK(r.t_factor_ms > 0.0);
    CHECK(r.t_eval_ms > 0.0);
  }
}

TEST_CASE("default norm switches to a Frobenius subset for large n") {
  SweepConfig cfg;
  cfg.synth = "0,0:1:5200";
  cfg.sigma = parse_sigma_rule("1");
  cfg.methods = {SelectorMethod::uniform};
  cfg.ranks = {5};
  cfg.runs = 1;
  cfg.eval_sample = 300;
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].err_norm_kind == "fro");
}

TEST_CASE("report means") {
  const std::vector<ResultRow> single{row("uniform", 10, 4.0)};
  const auto s1 = report(single);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].mean_err == 4.0);

  std::vector<ResultRow> rows{row("uniform", 10, 1.0), row("uniform", 10, 3.0), row("anchornet", 10, 0.5),
                              row("uniform", 20, 2.0), row("anchornet", 20, 0.25)};
  const auto s = report(rows);
  CHECK(s.size() == 4);  // 2 methods x 2 ranks
  CHECK(s[0].key.at("method") == "uniform");
  CHECK(s[0].mean_err == 2.0);
  CHECK(s[0].mean_relative_err == doctest::Approx(0.2));
  CHECK(s[0].runs == 2);

  const auto by_method = report(rows, {"method"});
  CHECK(by_method.size() == 2);

  rows.push_back(row("fps", 10, 1.0, "fro"));
  CHECK_THROWS_AS(report(rows), std::invalid_argument);
  CHECK_THROWS_AS(report(single, {"colour"}), std::invalid_argument);

  ResultRow skipped = row("RLS-exact", 10, std::nan(""));
  skipped.skip_reason = "indefinite kernel";
  skipped.err_norm_kind.clear();
  const auto with_skip = report({row("uniform", 10, 1.0), skipped});
  CHECK(with_skip.size() == 2);
  CHECK(with_skip[1].runs == 0);

  std::ostringstream os;
  write_summary_csv(os, s, {"method", "m_requested"});
  CHECK(os.str().rfind("method,m_requested,runs,mean_err", 0) == 0);
}
