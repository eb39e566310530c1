#include "rsrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "rsrl/csv.hpp"
#include "rsrl/mdp_io.hpp"
#include "rsrl/operators.hpp"

namespace rsrl {

using nlohmann::json;

namespace {

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigurationError(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigurationError("unknown key '" + k + "' in " + where);
}

SamplerConfig sampler_from_json(const json& j) {
  check_keys(j, {"mode", "behavior", "epsilon", "nu"}, "sampler");
  SamplerConfig c;
  const auto mode = j.value("mode", std::string("generative"));
  if (mode == "generative" || mode == "generative_iid") c.mode = SamplingMode::generative_iid;
  else if (mode == "markovian") c.mode = SamplingMode::markovian;
  else throw ConfigurationError("sampler.mode must be 'generative' or 'markovian'");
  // epsilon-greedy is the markovian default
  const auto behavior =
      j.value("behavior", std::string(c.mode == SamplingMode::markovian ? "epsilon_greedy" : "uniform"));
  if (behavior == "uniform" || behavior == "uniform_random") c.behavior = BehaviorKind::uniform_random;
  else if (behavior == "epsilon_greedy") c.behavior = BehaviorKind::epsilon_greedy;
  else throw ConfigurationError("sampler.behavior must be 'uniform' or 'epsilon_greedy'");
  if (j.contains("epsilon")) c.epsilon = get_as<double>(j["epsilon"], "sampler.epsilon");
  if (j.contains("nu")) c.nu = get_as<std::vector<double>>(j["nu"], "sampler.nu");
  return c;
}

json sampler_to_json(const SamplerConfig& c) {
  json j;
  j["mode"] = c.mode == SamplingMode::generative_iid ? "generative" : "markovian";
  j["behavior"] = c.behavior == BehaviorKind::uniform_random ? "uniform" : "epsilon_greedy";
  j["epsilon"] = c.epsilon;
  if (!c.nu.empty()) j["nu"] = c.nu;
  return j;
}

SamplerConfig default_sampler(const ExperimentConfig& cfg) {
  if (cfg.sampler_given) return cfg.sampler;
  if (cfg.task == "learn-1ts") return SamplerConfig::markovian_epsilon_greedy(0, kDefaultEpsilon);
  return SamplerConfig::generative(0);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

std::string fmt_exp(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void require_seeds(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigurationError("seed list is empty");
}

}  // namespace

void apply_config_json(ExperimentConfig& cfg, const json& j) {
  check_keys(j,
             {"task", "mdp", "seed", "seeds", "steps", "schedules", "alpha", "beta", "alpha_1ts", "sampler", "tol",
              "max_iter", "window", "slope_band", "scalar", "oracle", "log_transitions", "out", "replay"},
             "config");
  if (j.contains("task")) cfg.task = get_as<std::string>(j["task"], "task");
  if (j.contains("mdp")) cfg.mdp = j["mdp"];
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("seeds")) cfg.seeds = get_as<std::vector<std::uint64_t>>(j["seeds"], "seeds");
  if (j.contains("steps")) cfg.steps = get_as<std::size_t>(j["steps"], "steps");
  if (j.contains("schedules")) {
    cfg.schedules.clear();
    for (const auto& p : j["schedules"]) {
      auto v = get_as<std::vector<double>>(p, "schedules");
      if (v.size() != 2) throw ConfigurationError("schedules entries must be [alpha, beta] pairs");
      cfg.schedules.emplace_back(v[0], v[1]);
    }
  }
  if (j.contains("alpha") || j.contains("beta")) {
    const double a = j.contains("alpha") ? get_as<double>(j["alpha"], "alpha") : cfg.schedules.front().first;
    const double b = j.contains("beta") ? get_as<double>(j["beta"], "beta") : cfg.schedules.front().second;
    cfg.schedules = {{a, b}};
  }
  if (j.contains("alpha_1ts")) cfg.alpha_1ts = get_as<double>(j["alpha_1ts"], "alpha_1ts");
  if (j.contains("sampler")) {
    cfg.sampler = sampler_from_json(j["sampler"]);
    cfg.sampler_given = true;
  }
  if (j.contains("tol")) cfg.solver.tol = get_as<double>(j["tol"], "tol");
  if (j.contains("max_iter")) cfg.solver.max_iter = get_as<std::size_t>(j["max_iter"], "max_iter");
  if (j.contains("window")) {
    auto w = get_as<std::vector<double>>(j["window"], "window");
    if (w.size() != 2 || !(w[0] <= w[1])) throw ConfigurationError("window must be [n_min, n_max]");
    cfg.window = {w[0], w[1]};
  }
  if (j.contains("slope_band")) cfg.slope_band = get_as<double>(j["slope_band"], "slope_band");
  if (j.contains("scalar")) {
    const auto& s = j["scalar"];
    check_keys(s, {"c_ell", "c_u", "x_star", "gamma", "noise", "x0"}, "scalar");
    if (s.contains("c_ell")) cfg.scalar.c_ell = get_as<double>(s["c_ell"], "scalar.c_ell");
    if (s.contains("c_u")) cfg.scalar.c_u = get_as<double>(s["c_u"], "scalar.c_u");
    if (s.contains("x_star")) cfg.scalar.x_star = get_as<double>(s["x_star"], "scalar.x_star");
    if (s.contains("gamma")) cfg.scalar.gamma = get_as<double>(s["gamma"], "scalar.gamma");
    if (s.contains("noise")) cfg.scalar.noise = get_as<double>(s["noise"], "scalar.noise");
    if (s.contains("x0")) cfg.scalar.x0 = get_as<double>(s["x0"], "scalar.x0");
  }
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    check_keys(o,
               {"count", "max_states", "max_actions", "gamma_min", "gamma_max", "risk_min", "risk_max", "reward_lo",
                "reward_hi", "utility_tol", "dominance_slack"},
               "oracle");
    auto& c = cfg.oracle;
    if (o.contains("count")) c.count = get_as<std::size_t>(o["count"], "oracle.count");
    if (o.contains("max_states")) c.max_states = get_as<std::size_t>(o["max_states"], "oracle.max_states");
    if (o.contains("max_actions")) c.max_actions = get_as<std::size_t>(o["max_actions"], "oracle.max_actions");
    if (o.contains("gamma_min")) c.gamma_min = get_as<double>(o["gamma_min"], "oracle.gamma_min");
    if (o.contains("gamma_max")) c.gamma_max = get_as<double>(o["gamma_max"], "oracle.gamma_max");
    if (o.contains("risk_min")) c.risk_min = get_as<double>(o["risk_min"], "oracle.risk_min");
    if (o.contains("risk_max")) c.risk_max = get_as<double>(o["risk_max"], "oracle.risk_max");
    if (o.contains("reward_lo")) c.rewards.lo = get_as<double>(o["reward_lo"], "oracle.reward_lo");
    if (o.contains("reward_hi")) c.rewards.hi = get_as<double>(o["reward_hi"], "oracle.reward_hi");
    if (o.contains("utility_tol")) c.utility_tol = get_as<double>(o["utility_tol"], "oracle.utility_tol");
    if (o.contains("dominance_slack"))
      c.dominance_slack = get_as<double>(o["dominance_slack"], "oracle.dominance_slack");
  }
  if (j.contains("log_transitions"))
    cfg.log_transitions = get_as<std::size_t>(j["log_transitions"], "log_transitions");
  if (j.contains("out")) cfg.out_dir = get_as<std::string>(j["out"], "out");
  if (j.contains("replay")) cfg.replay = get_as<std::string>(j["replay"], "replay");
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigurationError("config " + path.string() + ": " + e.what());
  }
  // relative MDP paths resolve against the config file's directory
  if (j.contains("mdp") && j["mdp"].is_object() && j["mdp"].contains("file")) {
    std::filesystem::path p = j["mdp"]["file"].get<std::string>();
    if (p.is_relative()) j["mdp"]["file"] = (path.parent_path() / p).string();
  }
  apply_config_json(base, j);
  return base;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["task"] = cfg.task;
  j["mdp"] = cfg.mdp;
  j["seed"] = cfg.seed;
  j["seeds"] = cfg.seeds;
  j["steps"] = cfg.steps;
  json sched = json::array();
  for (auto [a, b] : cfg.schedules) sched.push_back({a, b});
  j["schedules"] = sched;
  j["alpha_1ts"] = cfg.alpha_1ts;
  j["sampler"] = sampler_to_json(default_sampler(cfg));
  j["tol"] = cfg.solver.tol;
  j["max_iter"] = cfg.solver.max_iter;
  j["window"] = {cfg.window.n_min, cfg.window.n_max};
  j["slope_band"] = cfg.slope_band;
  json s{{"c_ell", cfg.scalar.c_ell},
         {"c_u", cfg.scalar.c_u},
         {"x_star", cfg.scalar.x_star},
         {"gamma", cfg.scalar.gamma},
         {"noise", cfg.scalar.noise}};
  if (cfg.scalar.x0) s["x0"] = *cfg.scalar.x0;
  j["scalar"] = s;
  const auto& o = cfg.oracle;
  j["oracle"] = {{"count", o.count},         {"max_states", o.max_states}, {"max_actions", o.max_actions},
                 {"gamma_min", o.gamma_min}, {"gamma_max", o.gamma_max},   {"risk_min", o.risk_min},
                 {"risk_max", o.risk_max},   {"reward_lo", o.rewards.lo},  {"reward_hi", o.rewards.hi},
                 {"utility_tol", o.utility_tol}, {"dominance_slack", o.dominance_slack}};
  j["log_transitions"] = cfg.log_transitions;
  j["out"] = cfg.out_dir.string();
  if (cfg.replay) j["replay"] = cfg.replay->string();
  return j;
}

TabularMdp resolve_mdp(const json& source) {
  TabularMdp mdp;
  if (source.is_string()) {
    if (source.get<std::string>() != "fixture") throw ConfigurationError("mdp source string must be \"fixture\"");
    mdp = two_state_risky_fixture();
  } else if (source.is_object() && source.contains("file")) {
    mdp = load_mdp(source["file"].get<std::string>());
  } else if (source.is_object() && source.contains("inline")) {
    mdp = mdp_from_json(source["inline"]);
  } else if (source.is_object() && source.contains("random")) {
    const auto& r = source["random"];
    check_keys(r, {"num_states", "num_actions", "reward_lo", "reward_hi", "discount", "risk", "seed"}, "mdp.random");
    try {
      mdp = random_mdp(r.value("num_states", std::size_t{3}), r.value("num_actions", std::size_t{2}),
                       RewardRange{r.value("reward_lo", -1.0), r.value("reward_hi", 1.0)}, r.value("discount", 0.9),
                       r.value("risk", 0.1), r.value("seed", std::uint64_t{0}));
    } catch (const std::domain_error& e) {
      throw ConfigurationError(e.what());
    }
  } else {
    throw ConfigurationError("mdp source must be \"fixture\", {\"file\":...}, {\"inline\":...} or {\"random\":...}");
  }
  require_valid(mdp);
  return mdp;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw ConfigurationError("bad seed range '" + item + "'");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(item));
      }
    } catch (const std::logic_error&) {
      throw ConfigurationError("bad seed '" + item + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ExampleReport run_example() {
  using namespace fixture;
  const auto mdp = two_state_risky_fixture();
  ExampleReport rep;
  rep.q_risk_neutral = fixed_point_risk_neutral(mdp).solution;
  rep.q_risk_sensitive = fixed_point_T(mdp).solution;
  rep.greedy_risk_neutral = greedy_policy_from_q(mdp.num_actions, rep.q_risk_neutral);
  rep.greedy_risk_sensitive = greedy_policy_from_q(mdp.num_actions, rep.q_risk_sensitive);
  rep.opposite_actions = rep.greedy_risk_neutral(kS, kRisk) == 1.0 && rep.greedy_risk_sensitive(kS, kSafe) == 1.0;

  const auto& rn = rep.q_risk_neutral;
  const auto& rs = rep.q_risk_sensitive;
  const auto at = [&](std::size_t s, std::size_t a) { return mdp.pair(s, a); };
  rep.values_match = std::abs(rn[at(kSBar, 0)] + 100.0) <= 5e-3 && std::abs(rn[at(kSBar, 1)] + 100.0) <= 5e-3 &&
                     std::abs(rn[at(kS, kSafe)] - 0.826) <= 5e-3 && std::abs(rn[at(kS, kRisk)] - 0.917) <= 5e-3 &&
                     std::abs(rs[at(kSBar, 0)] + 100.0) <= 1e-2 && std::abs(rs[at(kSBar, 1)] + 100.0) <= 1e-2 &&
                     std::abs(rs[at(kS, kSafe)]) <= 1e-2 && std::abs(rs[at(kS, kRisk)] + 47.59) <= 1e-2;

  std::ostringstream t;
  t << std::fixed << std::setprecision(6);
  t << "pair          risk-neutral Q    risk-sensitive Q\n";
  const char* names[] = {"(s, safe)  ", "(s, risk)  ", "(s_bar, a) ", "(s_bar, a')"};
  for (std::size_t i = 0; i < 4; ++i)
    t << names[i] << "  " << std::setw(16) << rn[i] << "  " << std::setw(16) << rs[i] << '\n';
  const auto act = [](const StationaryPolicy& p) { return p(kS, kSafe) == 1.0 ? "safe" : "risk"; };
  t << "greedy at s   " << std::setw(16) << act(rep.greedy_risk_neutral) << "  " << std::setw(16)
    << act(rep.greedy_risk_sensitive) << '\n';
  rep.table = t.str();
  return rep;
}

TabularMdp oracle_sweep_mdp(const OracleCheckConfig& cfg, std::uint64_t seed, std::size_t index) {
  CounterRng rng(seed, index + 1);
  const std::size_t S = 1 + static_cast<std::size_t>(rng.below(cfg.max_states));
  const std::size_t A = 1 + static_cast<std::size_t>(rng.below(cfg.max_actions));
  const double u_gamma = rng.uniform();
  const double gamma = index % 10 == 0 ? cfg.gamma_min : cfg.gamma_min + (cfg.gamma_max - cfg.gamma_min) * u_gamma;
  const double risk = cfg.risk_min + (cfg.risk_max - cfg.risk_min) * rng.uniform();
  return random_mdp(S, A, cfg.rewards, gamma, risk, rng.next_u64());
}

OracleCase oracle_check_case(const TabularMdp& mdp, const OracleCheckConfig& cfg) {
  OracleCase c;
  c.mdp = mdp;
  const auto star = fixed_point_F(mdp, std::nullopt, cfg.solver);
  const auto greedy = greedy_policy_from_x(mdp.num_actions, star.solution);
  const auto greedy_util = policy_utility(mdp, greedy, cfg.solver);
  const auto all = enumerate_policy_utilities(mdp, cfg.solver);
  c.num_policies = all.size();

  const auto log_dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };
  c.greedy_vs_star = log_dist(greedy_util.log_solution, star.log_solution);

  c.worst_dominance_gap = -std::numeric_limits<double>::infinity();
  for (const auto& e : all)
    for (std::size_t i = 0; i < star.log_solution.size(); ++i)
      c.worst_dominance_gap = std::max(c.worst_dominance_gap, star.log_solution[i] - e.utility.log_solution[i]);

  std::ostringstream why;
  try {
    const auto brute = brute_force_optimal(mdp, cfg.solver);
    c.brute_vs_star = log_dist(brute.utility.log_solution, star.log_solution);
  } catch (const OracleInconsistency& e) {
    why << e.what() << "; ";
    c.brute_vs_star = std::numeric_limits<double>::infinity();
  }
  if (!star.converged) why << "fixed_point_F did not converge; ";
  if (!(c.greedy_vs_star <= cfg.utility_tol)) why << "greedy utility differs from x* by " << c.greedy_vs_star << "; ";
  if (!(c.brute_vs_star <= cfg.utility_tol)) why << "brute-force optimum differs from x* by " << c.brute_vs_star << "; ";
  if (!(c.worst_dominance_gap <= cfg.dominance_slack))
    why << "x* exceeds some X_pi by " << c.worst_dominance_gap << " in log scale; ";
  c.failure = why.str();
  c.passed = c.failure.empty();
  return c;
}

OracleReport run_oracle_check(const OracleCheckConfig& cfg, std::uint64_t seed,
                              const std::filesystem::path& dump_dir) {
  if (cfg.max_states == 0 || cfg.max_actions == 0) throw ConfigurationError("oracle: size caps must be positive");
  if (!count_deterministic_policies(cfg.max_states, cfg.max_actions, kDefaultEnumerationCap))
    throw ConfigurationError("oracle: size caps exceed the brute-force enumeration limit");
  if (!(cfg.gamma_min > 0.0 && cfg.gamma_min <= cfg.gamma_max && cfg.gamma_max < 1.0))
    throw ConfigurationError("oracle: need 0 < gamma_min <= gamma_max < 1");
  if (!(cfg.risk_min > 0.0 && cfg.risk_min <= cfg.risk_max)) throw ConfigurationError("oracle: need 0 < risk_min <= risk_max");

  OracleReport rep;
  rep.cases.resize(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    rep.cases[i] = oracle_check_case(oracle_sweep_mdp(cfg, seed, i), cfg);
    rep.cases[i].index = i;
  }
  for (const auto& c : rep.cases) {
    if (c.passed) {
      ++rep.passed;
      continue;
    }
    ++rep.failed;
    if (!dump_dir.empty()) {
      std::filesystem::create_directories(dump_dir);
      auto path = dump_dir / ("oracle_failure_" + std::to_string(c.index) + ".json");
      save_mdp(c.mdp, path);
      rep.dumped.push_back(path);
    }
  }
  return rep;
}

json run_metadata(const ExperimentConfig& cfg, const TabularMdp& mdp) {
  json j;
  j["config"] = config_to_json(cfg);
  j["mdp_hash"] = mdp_content_hash(mdp);
  j["mdp"] = mdp_to_json(mdp);
  j["derived"] = {{"theta_hat", mdp.theta_hat()},
                  {"c_max", derived_constants(mdp).c_max},
                  {"log_c_u", derived_constants(mdp).log_c_u}};
  if (cfg.task == "scalar-rate")
    j["scalar_noise"] = "zeta ~ Uniform[-noise, noise]; iterates clamped to [c_ell, c_u] after every step";
  return j;
}

RateStudyResult run_rate_study(const ExperimentConfig& cfg) {
  require_seeds(cfg);
  RateStudyResult res;
  const bool write = !cfg.out_dir.empty();
  if (write) std::filesystem::create_directories(cfg.out_dir);
  std::vector<LongRow> long_rows;

  if (cfg.task == "learn-2ts") {
    const auto mdp = resolve_mdp(cfg.mdp);
    const auto ref = fixed_point_T(mdp, std::nullopt, cfg.solver);
    if (!ref.converged) throw std::runtime_error("reference fixed point of T did not converge");
    const auto sampler = default_sampler(cfg);
    for (auto [a, b] : cfg.schedules) {
      if (!(0.5 < b && b < a && a < 1.0))
        throw ConfigurationError("rate study schedules need 1/2 < beta < alpha < 1 (got alpha=" + fmt_exp(a) +
                                 ", beta=" + fmt_exp(b) + ")");
      TwoTimescaleOptions opts;
      opts.alpha = StepSchedule::power_law(a);
      opts.beta = StepSchedule::power_law(b);
      opts.num_steps = cfg.steps;
      opts.reference = ref.solution;
      opts.trace.log_transitions = cfg.log_transitions;
      const auto runs = two_timescale_runs(mdp, sampler, opts, cfg.seeds);

      std::vector<LearnerTrace> traces;
      RateStudyRow row;
      for (const auto& r : runs) {
        traces.push_back(r.trace);
        row.violations += r.trace.violations;
      }
      const auto med = median_error(traces);
      const auto med_g = median_g_track_error(traces);
      const auto& steps = traces.front().steps;
      row.task = cfg.task;
      row.alpha = a;
      row.beta = b;
      row.fit = fit_loglog(steps, med, cfg.window);
      row.g_fit = fit_loglog(steps, med_g, cfg.window);
      row.expected_slope = -b / 2.0;
      row.in_band = std::abs(row.fit.slope - row.expected_slope) <= cfg.slope_band;
      row.final_median_error = med.back();
      res.rows.push_back(row);

      const std::string tag = "a" + fmt_exp(a) + "_b" + fmt_exp(b);
      for (std::size_t k = 0; k < steps.size(); ++k) {
        long_rows.push_back({"2ts_" + tag, 0, steps[k], "median_linf_err_q", med[k]});
        long_rows.push_back({"2ts_" + tag, 0, steps[k], "median_g_track_err", med_g[k]});
      }
      if (write) {
        std::ostringstream csv;
        write_trace_csv(csv, TraceKind::two_timescale, traces);
        auto path = cfg.out_dir / ("trace_2ts_" + tag + ".csv");
        write_file(path, csv.str());
        res.files.push_back(path);
        if (cfg.log_transitions > 0) {
          for (const auto& t : traces) {
            std::ostringstream tl;
            write_transition_log(tl, t.transitions);
            auto tp = cfg.out_dir / ("transitions_2ts_" + tag + "_seed" + std::to_string(t.seed) + ".csv");
            write_file(tp, tl.str());
            res.files.push_back(tp);
          }
        }
      }
    }
    if (write) {
      write_file(cfg.out_dir / "metadata.json", run_metadata(cfg, mdp).dump(2) + "\n");
      res.files.push_back(cfg.out_dir / "metadata.json");
    }
  } else if (cfg.task == "scalar-rate") {
    const auto& p = cfg.scalar;
    validate_scalar_params(p);
    const double c1 = compute_C1(p.c_ell, p.x_star, p.gamma);
    const double c2 = compute_C2_tilde(p.c_u, p.x_star, p.gamma, c1);
    const auto grid = geometric_grid(cfg.steps);

    std::vector<ScalarTrace> traces(cfg.seeds.size());
    const auto n = static_cast<std::ptrdiff_t>(cfg.seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      traces[static_cast<std::size_t>(i)] = scalar_recursion_run(p, cfg.steps, cfg.seeds[static_cast<std::size_t>(i)], grid);

    std::vector<double> mean(grid.size(), 0.0);
    for (const auto& t : traces)
      for (std::size_t k = 0; k < grid.size(); ++k) mean[k] += t.abs_rel_error[k];
    for (auto& m : mean) m /= static_cast<double>(traces.size());

    RateStudyRow row;
    row.task = cfg.task;
    row.expected_slope = -0.5;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double nn = static_cast<double>(grid[k]);
      if (grid[k] >= 100 && mean[k] > std::sqrt(c2 * (1.0 + std::log(nn)) / nn)) ++row.envelope_violations;
      long_rows.push_back({"scalar", 0, grid[k], "mean_abs_rel_err", mean[k]});
      long_rows.push_back({"scalar", 0, grid[k], "envelope", std::sqrt(c2 * (1.0 + std::log(nn)) / nn)});
    }
    // a noiseless run converges deterministically; report the slope without a band
    row.fit = fit_loglog(grid, mean, cfg.window);
    row.in_band = std::abs(row.fit.slope - row.expected_slope) <= cfg.slope_band;
    row.final_median_error = mean.back();
    res.rows.push_back(row);

    if (write) {
      std::ostringstream csv;
      csv << "n,abs_rel_err,seed\n";
      for (const auto& t : traces)
        for (std::size_t k = 0; k < t.steps.size(); ++k)
          csv << t.steps[k] << ',' << format_double(t.abs_rel_error[k]) << ',' << t.seed << '\n';
      write_file(cfg.out_dir / "trace_scalar.csv", csv.str());
      res.files.push_back(cfg.out_dir / "trace_scalar.csv");
      auto meta = run_metadata(cfg, single_state_mdp(0.0, p.gamma, 1.0));
      meta.erase("mdp");
      meta.erase("mdp_hash");
      meta.erase("derived");
      meta["C1"] = c1;
      meta["C2_tilde"] = c2;
      write_file(cfg.out_dir / "metadata.json", meta.dump(2) + "\n");
      res.files.push_back(cfg.out_dir / "metadata.json");
    }
  } else {
    throw ConfigurationError("rate study task must be learn-2ts or scalar-rate");
  }

  if (write) {
    std::ostringstream sum;
    sum << "task,alpha,beta,slope,intercept,r_squared,expected_slope,in_band,g_slope,final_error,violations,"
           "envelope_violations\n";
    for (const auto& r : res.rows) {
      sum << r.task << ',' << format_double(r.alpha) << ',' << format_double(r.beta) << ','
          << format_double(r.fit.slope) << ',' << format_double(r.fit.intercept) << ','
          << format_double(r.fit.r_squared) << ',' << format_double(r.expected_slope) << ','
          << (r.in_band ? "in" : "out") << ',' << (r.g_fit ? format_double(r.g_fit->slope) : "") << ','
          << format_double(r.final_median_error) << ',' << r.violations << ',' << r.envelope_violations << '\n';
    }
    write_file(cfg.out_dir / "summary.csv", sum.str());
    res.files.push_back(cfg.out_dir / "summary.csv");
    std::ostringstream lc;
    write_long_csv(lc, long_rows);
    write_file(cfg.out_dir / "long.csv", lc.str());
    res.files.push_back(cfg.out_dir / "long.csv");
  }
  return res;
}

LearnSummary run_learn_1ts(const ExperimentConfig& cfg) {
  require_seeds(cfg);
  const auto mdp = resolve_mdp(cfg.mdp);
  const auto ref = fixed_point_F(mdp, std::nullopt, cfg.solver);
  if (!ref.converged) throw std::runtime_error("reference fixed point of F did not converge");
  OneTimescaleOptions opts;
  opts.alpha = StepSchedule::power_law(cfg.alpha_1ts);
  opts.num_steps = cfg.steps;
  opts.reference = ref.solution;
  opts.trace.log_transitions = cfg.log_transitions;
  const auto runs = one_timescale_runs(mdp, default_sampler(cfg), opts, cfg.seeds);

  LearnSummary sum;
  std::vector<LearnerTrace> traces;
  for (const auto& r : runs) {
    traces.push_back(r.trace);
    sum.violations += r.trace.violations;
  }
  sum.steps = traces.front().steps;
  sum.median_error = median_error(traces);
  sum.final_median_error = sum.median_error.empty() ? 0.0 : sum.median_error.back();

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream csv;
    write_trace_csv(csv, TraceKind::one_timescale, traces);
    write_file(cfg.out_dir / "trace_1ts.csv", csv.str());
    sum.files.push_back(cfg.out_dir / "trace_1ts.csv");
    std::vector<LongRow> rows;
    for (std::size_t k = 0; k < sum.steps.size(); ++k)
      rows.push_back({"1ts", 0, sum.steps[k], "median_suplog_err_x", sum.median_error[k]});
    std::ostringstream lc;
    write_long_csv(lc, rows);
    write_file(cfg.out_dir / "long.csv", lc.str());
    sum.files.push_back(cfg.out_dir / "long.csv");
    if (cfg.log_transitions > 0) {
      for (const auto& t : traces) {
        std::ostringstream tl;
        write_transition_log(tl, t.transitions);
        auto tp = cfg.out_dir / ("transitions_1ts_seed" + std::to_string(t.seed) + ".csv");
        write_file(tp, tl.str());
        sum.files.push_back(tp);
      }
    }
    write_file(cfg.out_dir / "metadata.json", run_metadata(cfg, mdp).dump(2) + "\n");
    sum.files.push_back(cfg.out_dir / "metadata.json");
  }
  return sum;
}

SolveReport run_solve(const ExperimentConfig& cfg) {
  const auto mdp = resolve_mdp(cfg.mdp);
  SolveReport rep;
  rep.x_star = fixed_point_F(mdp, std::nullopt, cfg.solver);
  rep.q_star = fixed_point_T(mdp, std::nullopt, cfg.solver);
  rep.q_from_x.values.resize(mdp.num_pairs());
  for (std::size_t i = 0; i < mdp.num_pairs(); ++i)
    rep.q_from_x[i] = -(mdp.discount / mdp.risk) * rep.x_star.log_solution[i];
  rep.greedy = greedy_policy_from_q(mdp.num_actions, rep.q_from_x);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream csv;
    write_solution_csv(csv, mdp, rep);
    write_file(cfg.out_dir / "solution.csv", csv.str());
    write_file(cfg.out_dir / "metadata.json", run_metadata(cfg, mdp).dump(2) + "\n");
    rep.files = {cfg.out_dir / "solution.csv", cfg.out_dir / "metadata.json"};
  }
  return rep;
}

void write_solution_csv(std::ostream& out, const TabularMdp& mdp, const SolveReport& rep) {
  out << "s,a,x,log_x,q,greedy\n";
  for (std::size_t s = 0; s < mdp.num_states; ++s) {
    for (std::size_t a = 0; a < mdp.num_actions; ++a) {
      const auto i = mdp.pair(s, a);
      out << s << ',' << a << ',' << format_double(rep.x_star.solution[i]) << ','
          << format_double(rep.x_star.log_solution[i]) << ',' << format_double(rep.q_star.solution[i]) << ','
          << (rep.greedy(s, a) == 1.0 ? 1 : 0) << '\n';
    }
  }
}

}  // namespace rsrl
