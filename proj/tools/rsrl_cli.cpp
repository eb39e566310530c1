// rsrl: command-line front end for the exponential-utility toolkit.
//
//   rsrl example
//   rsrl solve        --mdp model.json --out results/
//   rsrl learn-2ts    --config study.json --seeds 1-10
//   rsrl learn-1ts    --steps 100000 --seed 3
//   rsrl scalar-rate  --seeds 0-99
//   rsrl oracle-check --count 50 --seed 42
//
// Exit codes: 0 success, 1 assertion/acceptance failure, 2 configuration error.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rsrl/harness.hpp"
#include "rsrl/mdp_io.hpp"

namespace {

using namespace rsrl;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string mdp;
  std::optional<std::size_t> steps;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::size_t> count;
  std::string replay;
  std::optional<std::size_t> log_transitions;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--seeds", f.seeds, "seed list, e.g. 1,2,5-9");
  cmd->add_option("--mdp", f.mdp, "MDP JSON file (default: the two-state fixture)");
}

// flag > file > default
ExperimentConfig build_config(const std::string& task, const CommonFlags& f) {
  ExperimentConfig cfg;
  cfg.task = task;
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  cfg.task = task;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.seeds.empty()) cfg.seeds = parse_seed_list(f.seeds);
  if (!f.mdp.empty()) cfg.mdp = nlohmann::json{{"file", f.mdp}};
  if (f.steps) cfg.steps = *f.steps;
  if (f.alpha || f.beta) {
    auto [a, b] = cfg.schedules.front();
    if (task == "learn-1ts") {
      if (f.alpha) cfg.alpha_1ts = *f.alpha;
    } else {
      cfg.schedules = {{f.alpha.value_or(a), f.beta.value_or(b)}};
    }
  }
  if (f.count) cfg.oracle.count = *f.count;
  if (!f.replay.empty()) cfg.replay = f.replay;
  if (f.log_transitions) cfg.log_transitions = *f.log_transitions;
  return cfg;
}

void print_vector(const char* name, const std::vector<double>& v, std::size_t A) {
  std::cout << name << '\n';
  for (std::size_t i = 0; i < v.size(); ++i)
    std::cout << "  (" << i / A << "," << i % A << ")  " << std::setprecision(12) << v[i] << '\n';
}

int cmd_example() {
  const auto rep = run_example();
  std::cout << rep.table;
  std::cout << "opposite greedy actions at s: " << (rep.opposite_actions ? "yes" : "NO") << '\n';
  std::cout << "published values reproduced: " << (rep.values_match ? "yes" : "NO") << '\n';
  return rep.passed() ? kOk : kFailure;
}

int cmd_solve(const ExperimentConfig& cfg) {
  const auto mdp = resolve_mdp(cfg.mdp);
  const auto rep = run_solve(cfg);
  print_vector("x* (log scale)", rep.x_star.log_solution, mdp.num_actions);
  print_vector("Q*", rep.q_star.solution.values, mdp.num_actions);
  std::cout << "greedy policy:";
  for (auto a : rep.greedy.actions()) std::cout << ' ' << a;
  std::cout << "\niterations F: " << rep.x_star.iterations << ", T: " << rep.q_star.iterations << '\n';
  for (const auto& p : rep.files) std::cout << "wrote " << p.string() << '\n';
  return rep.x_star.converged && rep.q_star.converged ? kOk : kFailure;
}

int cmd_rate(const ExperimentConfig& cfg) {
  const auto res = run_rate_study(cfg);
  for (const auto& r : res.rows) {
    std::cout << r.task;
    if (r.task == "learn-2ts") std::cout << " alpha=" << r.alpha << " beta=" << r.beta;
    std::cout << " slope=" << r.fit.slope << " (expected " << r.expected_slope << ", " << (r.in_band ? "in" : "out")
              << " of band) r2=" << r.fit.r_squared << " final=" << r.final_median_error;
    if (r.g_fit) std::cout << " g_slope=" << r.g_fit->slope;
    if (r.task == "scalar-rate") std::cout << " envelope_violations=" << r.envelope_violations;
    std::cout << '\n';
  }
  for (const auto& p : res.files) std::cout << "wrote " << p.string() << '\n';
  return kOk;
}

int cmd_learn_1ts(const ExperimentConfig& cfg) {
  const auto sum = run_learn_1ts(cfg);
  std::cout << "n,median_suplog_err_x\n";
  for (std::size_t k = 0; k < sum.steps.size(); ++k) std::cout << sum.steps[k] << ',' << sum.median_error[k] << '\n';
  for (const auto& p : sum.files) std::cout << "wrote " << p.string() << '\n';
  return kOk;
}

int cmd_oracle(const ExperimentConfig& cfg) {
  if (cfg.replay) {
    const auto c = oracle_check_case(load_mdp(*cfg.replay), cfg.oracle);
    std::cout << (c.passed ? "PASS " : "FAIL ") << cfg.replay->string() << ' ' << c.failure << '\n';
    return c.passed ? kOk : kFailure;
  }
  const auto rep = run_oracle_check(cfg.oracle, cfg.seed, cfg.out_dir);
  for (const auto& c : rep.cases) {
    std::cout << (c.passed ? "PASS" : "FAIL") << " #" << c.index << " S=" << c.mdp.num_states
              << " A=" << c.mdp.num_actions << " gamma=" << c.mdp.discount << " policies=" << c.num_policies
              << " d(greedy,x*)=" << c.greedy_vs_star << " gap=" << c.worst_dominance_gap;
    if (!c.passed) std::cout << "  " << c.failure;
    std::cout << '\n';
  }
  std::cout << rep.passed << "/" << rep.cases.size() << " passed\n";
  for (const auto& p : rep.dumped) std::cout << "dumped " << p.string() << '\n';
  return rep.ok() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential-utility Bellman operators, solvers and learners"};
  app.require_subcommand(1);

  CommonFlags f;
  auto* example = app.add_subcommand("example", "reproduce the two-state safe/risk example");
  auto* solve = app.add_subcommand("solve", "fixed points of F and T and the greedy policy");
  auto* learn2 = app.add_subcommand("learn-2ts", "two-timescale learner and rate study");
  auto* learn1 = app.add_subcommand("learn-1ts", "one-timescale learner");
  auto* scalar = app.add_subcommand("scalar-rate", "scalar recursion rate study");
  auto* oracle = app.add_subcommand("oracle-check", "brute-force optimality sweep on random MDPs");

  for (auto* cmd : {example, solve, learn2, learn1, scalar, oracle}) add_common(cmd, f);
  for (auto* cmd : {learn2, learn1, scalar}) {
    cmd->add_option("--steps", f.steps, "number of learner steps");
    cmd->add_option("--log-transitions", f.log_transitions, "write the first N transitions per seed");
  }
  for (auto* cmd : {learn2, learn1}) cmd->add_option("--alpha", f.alpha, "alpha step exponent");
  learn2->add_option("--beta", f.beta, "beta step exponent");
  oracle->add_option("--count", f.count, "number of random MDPs");
  oracle->add_option("--replay", f.replay, "re-run the check on one dumped MDP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (example->parsed()) return cmd_example();
    if (solve->parsed()) return cmd_solve(build_config("solve", f));
    if (learn2->parsed()) return cmd_rate(build_config("learn-2ts", f));
    if (scalar->parsed()) return cmd_rate(build_config("scalar-rate", f));
    if (learn1->parsed()) return cmd_learn_1ts(build_config("learn-1ts", f));
    if (oracle->parsed()) return cmd_oracle(build_config("oracle-check", f));
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kConfigError;
}
