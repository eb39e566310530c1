#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rsrl/csv.hpp"
#include "rsrl/harness.hpp"
#include "rsrl/mdp_io.hpp"
#include "rsrl/rate_fit.hpp"

using namespace rsrl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rsrl_test_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fit_loglog on synthetic curves") {
  std::vector<std::size_t> n;
  for (std::size_t k = 1; k <= 1u << 20; k *= 2) n.push_back(k);
  std::vector<double> e1, e2;
  for (auto k : n) {
    e1.push_back(std::pow(double(k), -0.5));
    e2.push_back(3.0 * std::pow(double(k), -0.3));
  }
  const auto f1 = fit_loglog(n, e1);
  CHECK(f1.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(f1.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f1.num_points == n.size());
  const auto f2 = fit_loglog(n, e2);
  CHECK(f2.slope == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(f2.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  std::mt19937_64 eng(5);
  std::normal_distribution<double> jitter(0.0, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> m;
    std::vector<double> e;
    for (std::size_t k = 100; k <= 1'000'000; k = k * 5 / 4) {
      m.push_back(k);
      e.push_back(std::pow(double(k), -0.45) * std::exp(jitter(eng)));
    }
    CHECK(std::abs(fit_loglog(m, e).slope + 0.45) <= 0.05);
  }

  const auto w = fit_loglog(n, e1, {1e3, 1e5});
  CHECK(w.num_points == 7);  // 1024 .. 65536
  CHECK_THROWS_AS(fit_loglog(n, e1, {1e3, 1e4}), FitError);
  std::vector<double> zeros(n.size(), 0.0);
  CHECK_THROWS_AS(fit_loglog(n, zeros), FitError);
}

TEST_CASE("csv number formatting round-trips") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, 4.9e-324}) CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(parse_double("inf")));
  CHECK(split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
}

TEST_CASE("trace csv round-trips exactly") {
  LearnerTrace a, b;
  a.steps = {1, 2, 4};
  a.error = {1.0 / 3.0, 0.2, 1e-17};
  a.g_track_error = {2.5, std::nextafter(1.0, 2.0), 0.0};
  a.seed = 7;
  b = a;
  b.seed = 8;
  b.error[1] = 123456.789;
  const std::vector<LearnerTrace> traces{a, b};

  std::ostringstream out;
  write_trace_csv(out, TraceKind::two_timescale, traces);
  CHECK(out.str().rfind("n,linf_err_q,g_track_err,seed\n", 0) == 0);
  std::istringstream in(out.str());
  TraceKind kind = TraceKind::one_timescale;
  const auto rows = read_trace_csv(in, &kind);
  CHECK(kind == TraceKind::two_timescale);
  auto expected = trace_rows(a);
  for (const auto& r : trace_rows(b)) expected.push_back(r);
  CHECK(rows == expected);

  LearnerTrace c;
  c.steps = {1, 8};
  c.error = {0.5, 0.125};
  c.seed = 3;
  std::ostringstream o1;
  write_trace_csv(o1, TraceKind::one_timescale, std::vector<LearnerTrace>{c});
  CHECK(o1.str().rfind("n,suplog_err_x,seed\n", 0) == 0);
  std::istringstream i1(o1.str());
  CHECK(read_trace_csv(i1, &kind) == trace_rows(c));
  CHECK(kind == TraceKind::one_timescale);
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("1,2,5-9") == std::vector<std::uint64_t>{1, 2, 5, 6, 7, 8, 9});
  CHECK(parse_seed_list("0") == std::vector<std::uint64_t>{0});
  CHECK(parse_seed_list("").empty());
  CHECK_THROWS_AS(parse_seed_list("x"), ConfigurationError);
  CHECK_THROWS_AS(parse_seed_list("9-5"), ConfigurationError);
}

TEST_CASE("config overlay") {
  ExperimentConfig cfg;
  apply_config_json(cfg, nlohmann::json::parse(R"({"steps": 500, "seeds": [4, 5], "schedules": [[0.8, 0.55]],
    "sampler": {"mode": "markovian"}, "scalar": {"noise": 0.1}, "oracle": {"count": 3}})"));
  CHECK(cfg.steps == 500);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(cfg.schedules.front() == std::pair<double, double>{0.8, 0.55});
  CHECK(cfg.sampler.mode == SamplingMode::markovian);
  CHECK(cfg.sampler.behavior == BehaviorKind::epsilon_greedy);
  CHECK(cfg.sampler.epsilon == kDefaultEpsilon);
  CHECK(cfg.scalar.noise == 0.1);
  CHECK(cfg.oracle.count == 3);
  CHECK(cfg.alpha_1ts == 0.7);

  CHECK_THROWS_AS(apply_config_json(cfg, nlohmann::json::parse(R"({"stepz": 1})")), ConfigurationError);
  CHECK_THROWS_AS(apply_config_json(cfg, nlohmann::json::parse(R"({"steps": "many"})")), ConfigurationError);
  CHECK_THROWS_AS(apply_config_json(cfg, nlohmann::json::parse(R"({"scalar": {"c": 1}})")), ConfigurationError);

  // echo and reload give the same configuration
  ExperimentConfig back;
  apply_config_json(back, config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("config file resolves relative MDP paths") {
  const auto dir = scratch_dir("cfg");
  save_mdp(random_mdp(2, 2, {-1, 1}, 0.9, 0.2, 3), dir / "m.json");
  std::ofstream(dir / "c.json") << R"({"mdp": {"file": "m.json"}, "seed": 9})";
  const auto cfg = load_config(dir / "c.json");
  CHECK(cfg.seed == 9);
  CHECK(resolve_mdp(cfg.mdp) == random_mdp(2, 2, {-1, 1}, 0.9, 0.2, 3));
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigurationError);
  CHECK_THROWS_AS(resolve_mdp(nlohmann::json{{"file", (dir / "nope.json").string()}}), ConfigurationError);
  CHECK_THROWS_AS(resolve_mdp("grid"), ConfigurationError);
  const auto r = resolve_mdp(nlohmann::json::parse(R"({"random": {"num_states": 4, "seed": 2}})"));
  CHECK(r.num_states == 4);
}

TEST_CASE("resolve_mdp rejects invalid inline models") {
  auto j = mdp_to_json(two_state_risky_fixture());
  j["discount"] = 1.0;
  CHECK_THROWS_AS(resolve_mdp(nlohmann::json{{"inline", j}}), ConfigurationError);
}

TEST_CASE("example report") {
  const auto rep = run_example();
  CHECK(rep.opposite_actions);
  CHECK(rep.values_match);
  CHECK(rep.passed());
  CHECK(rep.table.find("risk") != std::string::npos);
}

TEST_CASE("oracle check") {
  SUBCASE("empty sweep passes vacuously") {
    OracleCheckConfig c;
    c.count = 0;
    const auto rep = run_oracle_check(c, 42);
    CHECK(rep.ok());
    CHECK(rep.cases.empty());
  }
  SUBCASE("small sweep includes the low-discount edge") {
    OracleCheckConfig c;
    c.count = 12;
    const auto rep = run_oracle_check(c, 42);
    CHECK(rep.passed == 12);
    CHECK(rep.cases[0].mdp.discount == c.gamma_min);
    CHECK(rep.cases[10].mdp.discount == c.gamma_min);
    CHECK(oracle_sweep_mdp(c, 42, 3) == rep.cases[3].mdp);
  }
  SUBCASE("failing MDP is dumped and reproduces from file") {
    // an unattainable tolerance forces every case to fail
    OracleCheckConfig c;
    c.count = 2;
    c.utility_tol = -1.0;
    const auto dir = scratch_dir("dump");
    const auto rep = run_oracle_check(c, 42, dir);
    CHECK(rep.failed == 2);
    REQUIRE(rep.dumped.size() == 2);
    CHECK(rep.dumped[1] == dir / "oracle_failure_1.json");
    const auto replayed = load_mdp(rep.dumped[1]);
    CHECK(replayed == rep.cases[1].mdp);
    CHECK(!oracle_check_case(replayed, c).passed);
    CHECK(oracle_check_case(replayed, OracleCheckConfig{}).passed);
  }
  SUBCASE("bad caps are configuration errors") {
    OracleCheckConfig c;
    c.max_states = 20;
    CHECK_THROWS_AS(run_oracle_check(c, 1), ConfigurationError);
    c = {};
    c.gamma_max = 1.0;
    CHECK_THROWS_AS(run_oracle_check(c, 1), ConfigurationError);
  }
}

TEST_CASE("rate study outputs") {
  SUBCASE("empty seed list is rejected before any run") {
    ExperimentConfig cfg;
    cfg.task = "learn-2ts";
    cfg.seeds.clear();
    cfg.out_dir = scratch_dir("empty");
    CHECK_THROWS_AS(run_rate_study(cfg), ConfigurationError);
    CHECK(fs::is_empty(cfg.out_dir));
  }
  SUBCASE("two-timescale writes traces, summary and metadata") {
    ExperimentConfig cfg;
    cfg.task = "learn-2ts";
    cfg.seeds = {1, 2, 3};
    cfg.steps = 20000;
    cfg.window = {100, 20000};
    cfg.log_transitions = 5;
    cfg.out_dir = scratch_dir("2ts");
    const auto res = run_rate_study(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].violations == 0);
    CHECK(res.rows[0].g_fit.has_value());
    CHECK(fs::exists(cfg.out_dir / "summary.csv"));
    CHECK(fs::exists(cfg.out_dir / "long.csv"));
    const auto meta = nlohmann::json::parse(slurp(cfg.out_dir / "metadata.json"));
    CHECK(meta["mdp_hash"] == mdp_content_hash(two_state_risky_fixture()));
    CHECK(meta["config"]["steps"] == 20000);

    bool found_trace = false;
    for (const auto& p : res.files) {
      if (p.filename().string().rfind("trace_2ts_", 0) != 0) continue;
      found_trace = true;
      std::ifstream in(p);
      TraceKind kind;
      const auto rows = read_trace_csv(in, &kind);
      CHECK(kind == TraceKind::two_timescale);
      CHECK(rows.size() == 3 * geometric_grid(20000).size());
    }
    CHECK(found_trace);

    // identical config, identical bytes
    auto again = cfg;
    again.out_dir = scratch_dir("2ts_again");
    run_rate_study(again);
    for (const auto& p : res.files)
      if (p.extension() == ".csv") CHECK(slurp(p) == slurp(again.out_dir / p.filename()));
  }
  SUBCASE("scalar study reports the clamping") {
    ExperimentConfig cfg;
    cfg.task = "scalar-rate";
    cfg.seeds = {1, 2, 3, 4};
    cfg.steps = 100000;
    cfg.window = {1e3, 1e5};
    cfg.out_dir = scratch_dir("scalar");
    const auto res = run_rate_study(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].envelope_violations == 0);
    const auto meta = nlohmann::json::parse(slurp(cfg.out_dir / "metadata.json"));
    CHECK(meta.contains("scalar_noise"));
  }
  SUBCASE("noiseless scalar recursion beats n^-1") {
    // wide box: C1 small, so the deterministic drift contracts fast in the window
    ExperimentConfig cfg;
    cfg.task = "scalar-rate";
    cfg.seeds = {1};
    cfg.steps = 1'000'000;
    cfg.scalar.c_ell = 0.1;
    cfg.scalar.c_u = 10.0;
    cfg.scalar.noise = 0.0;
    cfg.out_dir.clear();
    const auto res = run_rate_study(cfg);
    CHECK(res.rows[0].fit.slope <= -1.0);
  }
}

TEST_CASE("solve writes both scales") {
  ExperimentConfig cfg;
  cfg.task = "solve";
  cfg.out_dir = scratch_dir("solve");
  const auto rep = run_solve(cfg);
  CHECK(rep.x_star.converged);
  CHECK(rep.greedy.actions()[fixture::kS] == fixture::kSafe);
  std::ostringstream out;
  write_solution_csv(out, two_state_risky_fixture(), rep);
  CHECK(out.str().rfind("s,a,x,log_x,q,greedy\n", 0) == 0);

  cfg.mdp = nlohmann::json::parse(R"({"random": {"num_states": 3, "reward_lo": -600, "reward_hi": 600,
    "discount": 0.9, "risk": 0.5, "seed": 1}})");
  const auto big = run_solve(cfg);
  std::ostringstream o2;
  write_solution_csv(o2, resolve_mdp(cfg.mdp), big);
  CHECK(o2.str().find("inf") != std::string::npos);
}
