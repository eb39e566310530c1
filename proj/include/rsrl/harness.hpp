#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsrl/learners.hpp"
#include "rsrl/mdp.hpp"
#include "rsrl/rate_fit.hpp"
#include "rsrl/sampler.hpp"
#include "rsrl/solvers.hpp"

namespace rsrl {

/// Random-MDP sweep used by oracle-check. gamma is drawn from
/// [gamma_min, gamma_max]; every tenth instance (i % 10 == 0) pins gamma to
/// gamma_min so the low-discount edge is always exercised.
struct OracleCheckConfig {
  std::size_t count = 50;
  std::size_t max_states = 4;
  std::size_t max_actions = 3;
  double gamma_min = 0.1;
  double gamma_max = 0.95;
  double risk_min = 0.05;
  double risk_max = 1.0;
  RewardRange rewards{-1.0, 1.0};
  double utility_tol = 1e-7;    // sup-log agreement of greedy and brute-force utilities
  double dominance_slack = 1e-7;  // ln x* <= ln X_pi + slack
  SolverOptions solver{1e-12, 1'000'000};
};

struct ExperimentConfig {
  std::string task;                           // solve | learn-2ts | learn-1ts | scalar-rate | oracle-check | example
  nlohmann::json mdp = "fixture";             // "fixture" | {"file": p} | {"inline": {...}} | {"random": {...}}
  std::uint64_t seed = 42;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t steps = 1'000'000;
  std::vector<std::pair<double, double>> schedules{{0.9, 0.6}};  // (alpha, beta) exponents for learn-2ts
  double alpha_1ts = 0.7;
  SamplerConfig sampler;                      // seed field ignored; set per run
  bool sampler_given = false;
  SolverOptions solver;
  FitWindow window{1e3, 1e6};
  double slope_band = 0.15;
  ScalarRecursionParams scalar;
  OracleCheckConfig oracle;
  std::size_t log_transitions = 0;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> replay;  // oracle-check: re-run one dumped MDP
};

/// Overlays the keys present in `j` onto `cfg`. Throws ConfigurationError on
/// unknown keys or bad values.
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Resolves the MDP source and validates the result.
TabularMdp resolve_mdp(const nlohmann::json& source);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// ---------------------------------------------------------------------------

struct ExampleReport {
  QVector q_risk_neutral;
  QVector q_risk_sensitive;
  StationaryPolicy greedy_risk_neutral;
  StationaryPolicy greedy_risk_sensitive;
  bool opposite_actions = false;
  bool values_match = false;  // published values within 5e-3 (risk-neutral) / 1e-2 (risk-sensitive)
  bool passed() const { return opposite_actions && values_match; }
  std::string table;
};

ExampleReport run_example();

struct OracleCase {
  std::size_t index = 0;
  TabularMdp mdp;
  bool passed = false;
  double greedy_vs_star = 0.0;       // d(X_greedy, x*)
  double brute_vs_star = 0.0;        // d(X_brute, x*)
  double worst_dominance_gap = 0.0;  // max over pi, (s,a) of ln x* - ln X_pi
  std::size_t num_policies = 0;
  std::string failure;
};

/// Optimality check on one MDP: greedy and brute-force utilities against x*.
OracleCase oracle_check_case(const TabularMdp& mdp, const OracleCheckConfig& cfg);

/// Generates instance i of the sweep (deterministic in (seed, i)).
TabularMdp oracle_sweep_mdp(const OracleCheckConfig& cfg, std::uint64_t seed, std::size_t index);

struct OracleReport {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<OracleCase> cases;
  std::vector<std::filesystem::path> dumped;
  bool ok() const { return failed == 0; }
};

/// Runs the sweep; failing MDPs are written to `dump_dir` as
/// oracle_failure_<i>.json when dump_dir is non-empty.
OracleReport run_oracle_check(const OracleCheckConfig& cfg, std::uint64_t seed,
                              const std::filesystem::path& dump_dir = {});

struct RateStudyRow {
  std::string task;
  double alpha = 0.0;
  double beta = 0.0;
  RateFit fit;
  double expected_slope = 0.0;
  bool in_band = false;
  std::optional<RateFit> g_fit;  // two-timescale only
  double final_median_error = 0.0;
  std::size_t violations = 0;
  std::size_t envelope_violations = 0;  // scalar-rate only
};

struct RateStudyResult {
  std::vector<RateStudyRow> rows;
  std::vector<std::filesystem::path> files;
};

/// task: "learn-2ts" or "scalar-rate". Writes CSVs when cfg.out_dir is
/// non-empty. Throws ConfigurationError on an empty seed list.
RateStudyResult run_rate_study(const ExperimentConfig& cfg);

struct LearnSummary {
  std::vector<std::size_t> steps;
  std::vector<double> median_error;
  double final_median_error = 0.0;
  std::size_t violations = 0;
  std::vector<std::filesystem::path> files;
};

LearnSummary run_learn_1ts(const ExperimentConfig& cfg);

struct SolveReport {
  UtilityFixedPoint x_star;
  FixedPointResult<QVector> q_star;
  QVector q_from_x;
  StationaryPolicy greedy;
  std::vector<std::filesystem::path> files;
};

SolveReport run_solve(const ExperimentConfig& cfg);

/// Columns s,a,x,log_x,q,greedy; x is printed as "inf" when it overflows.
void write_solution_csv(std::ostream& out, const TabularMdp& mdp, const SolveReport& rep);

/// Config echo plus the MDP content hash and disclosure flags.
nlohmann::json run_metadata(const ExperimentConfig& cfg, const TabularMdp& mdp);

}  // namespace rsrl
