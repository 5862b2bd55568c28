#include "cournotlre/capi.h"

#include <cmath>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "cournotlre/aggregative.hpp"
#include "cournotlre/config.hpp"
#include "cournotlre/dynamics.hpp"
#include "cournotlre/lre.hpp"
#include "cournotlre/oligopoly.hpp"
#include "cournotlre/rules.hpp"
#include "cournotlre/util.hpp"
#include "json.hpp"

using nlohmann::json;

struct clre_run {
  cournot::RunConfig cfg;
  std::string last_error;

  explicit clre_run(cournot::RunConfig c) : cfg(std::move(c)) {}
};

namespace {

thread_local std::string g_creation_error;

// A refusal or failed verification that maps to CLRE_CHECK_FAILED.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(clre_run* run, Fn&& fn) {
  if (!run) {
    g_creation_error = "null run handle";
    return CLRE_RUNTIME_ERROR;
  }
  try {
    fn();
    run->last_error.clear();
    return CLRE_OK;
  } catch (const cournot::ConfigError& e) {
    run->last_error = e.what();
    return CLRE_CONFIG_ERROR;
  } catch (const CheckFailure& e) {
    run->last_error = e.what();
    return CLRE_CHECK_FAILED;
  } catch (const std::exception& e) {
    run->last_error = e.what();
    return CLRE_RUNTIME_ERROR;
  }
}

json quantity_json(double v) {
  json out;
  out["value"] = cournot::dec_string(v);
  if (auto r = cournot::rational_string(v)) out["rational"] = *r;
  return out;
}

json bench_report(const cournot::RunConfig& cfg) {
  using namespace cournot;
  const OligopolyModel& model = cfg.model;
  Benchmarks bench = compute_benchmarks(model, cfg.snap_tol);

  json out;
  out["model"]["n"] = model.n();
  out["model"]["grid"]["step"] = dec_string(model.grid().step);
  out["model"]["grid"]["levels"] = model.grid().levels;
  out["benchmarks"]["nash"] = quantity_json(bench.nash);
  out["benchmarks"]["walras"] = quantity_json(bench.walras);
  out["benchmarks"]["collusive"] = quantity_json(bench.collusive);
  out["benchmarks"]["nash_index"] = bench.nash_index;
  out["benchmarks"]["walras_index"] = bench.walras_index;

  json table = json::array();
  for (int i = 0; i < model.grid().size(); ++i) {
    double q = model.grid().value(i);
    AdvantageSet adv = advantage_set(model, q);
    json row;
    row["q"] = quantity_json(q);
    row["lo"] = quantity_json(adv.lo);
    row["hi"] = quantity_json(adv.hi);
    row["singleton"] = adv.singleton;
    row["grid_points"] = adv.grid_indices.size();
    table.push_back(std::move(row));
  }
  out["advantage_sets"] = std::move(table);

  if (model.n() >= 3) {
    DescentSequences seq = descent_sequences(model);
    json a = json::array(), b = json::array();
    for (double v : seq.a) a.push_back(quantity_json(v));
    for (double v : seq.b) b.push_back(quantity_json(v));
    out["descent"]["a"] = std::move(a);
    out["descent"]["b"] = std::move(b);
    out["descent"]["terminated"] = seq.terminated;
  }

  LreBounds bounds = lre_bounds(model);
  out["bounds"]["lower"] = quantity_json(bounds.lower);
  out["bounds"]["upper"] = quantity_json(bounds.upper);
  out["bounds"]["grid_fine"] = bounds.grid_fine;
  if (!bounds.diagnostic.empty())
    out["bounds"]["diagnostic"] = bounds.diagnostic;
  return out;
}

void require_sf_criteria(const cournot::RunConfig& cfg) {
  for (const auto& c : cfg.criteria) {
    if (!c.satisfies_sf())
      throw CheckFailure(
          "criterion '" + c.name() +
          "' violates the survival-of-the-fittest principle, so the "
          "resistance-tree characterization does not apply; use `simulate` "
          "to study its dynamics empirically");
  }
}

cournot::LreResult analyze_result(const cournot::RunConfig& cfg,
                                  const double* eta_override) {
  require_sf_criteria(cfg);
  double eta = eta_override ? *eta_override : cfg.noise.eta;
  if (eta < 1.0) throw cournot::ConfigError("eta", "must be >= 1");
  return cournot::compute_lre(cfg.model, eta);
}

json lre_json(const cournot::LreResult& res,
              const cournot::QuantityGrid& grid) {
  json out;
  out["eta"] = res.eta;
  out["absorbing_count"] = res.graph.size();
  out["min_tree_cost"] = res.min_tree_cost;
  json winners = json::array();
  for (const auto& node : res.lre) {
    json w;
    w["rule"] = cournot::rule_name(node.rule);
    w["quantity"] = quantity_json(grid.value(node.quantity_index));
    w["index"] = node.quantity_index;
    winners.push_back(std::move(w));
  }
  out["lre"] = std::move(winners);
  if (res.has_bounds) {
    out["im_quantity_bounds"]["lower"] = quantity_json(res.lower_bound);
    out["im_quantity_bounds"]["upper"] = quantity_json(res.upper_bound);
  }
  return out;
}

json analyze_report(const cournot::RunConfig& cfg, const double* eta_override) {
  using namespace cournot;
  LreResult res = analyze_result(cfg, eta_override);
  json out = lre_json(res, cfg.model.grid());
  LreBounds bounds = lre_bounds(cfg.model);
  out["quantity_bounds"]["lower"] = quantity_json(bounds.lower);
  out["quantity_bounds"]["upper"] = quantity_json(bounds.upper);
  return out;
}

std::string analyze_dot(const cournot::RunConfig& cfg,
                        const double* eta_override) {
  using namespace cournot;
  LreResult res = analyze_result(cfg, eta_override);
  std::ostringstream os;
  os << graph_to_dot(res.graph, cfg.model.grid());
  for (const auto& [root, tree] : res.witness_trees) {
    bool winner = false;
    for (const auto& node : res.lre)
      if (res.graph.nodes[root] == node) winner = true;
    if (!winner) continue;
    os << tree_to_dot(res.graph, cfg.model.grid(), tree, root);
  }
  return os.str();
}

json occupancy_json(const cournot::OccupancyTable& table,
                    const cournot::QuantityGrid& grid, double epsilon,
                    const cournot::NoiseConfig& noise) {
  json out;
  out["epsilon"] = epsilon;
  out["eta"] = noise.eta;
  out["periods"] = table.periods;
  out["replications"] = table.replications;
  json rows = json::array();
  for (const auto& [key, entry] : table.patterns) {
    json row;
    row["pattern"] = key.label(grid);
    row["rule"] = cournot::rule_name(key.rule);
    row["quantity"] = quantity_json(grid.value(key.quantity_index));
    row["mean"] = entry.mean;
    row["std_error"] = entry.std_error;
    rows.push_back(std::move(row));
  }
  out["occupancy"] = std::move(rows);
  out["non_monomorphic_mean"] = table.non_monomorphic_mean;
  return out;
}

std::string trajectory_csv(const cournot::RunConfig& cfg,
                           std::uint64_t seed) {
  using namespace cournot;
  if (cfg.trajectory_periods <= 0) return "";
  Rng rng(mix_seed(seed, 0x74726a));
  IndustryState state =
      cfg.sim.initial_quantity_indices.empty()
          ? random_initial_state(cfg.model, cfg.model.n(), cfg.sim.memory, rng)
          : make_initial_state(cfg.model, cfg.sim.initial_quantity_indices,
                               cfg.sim.initial_rules, cfg.sim.memory);
  std::ostringstream os;
  os << "period,firm,quantity,rule,profit,fitness,tenure\n";
  for (long t = 0; t < cfg.trajectory_periods; ++t) {
    step(state, cfg.model, cfg.criteria, cfg.noise, rng);
    ObservedPeriod obs = observe(state, cfg.model);
    for (int i = 0; i < obs.n(); ++i) {
      os << state.period << ',' << i << ',' << dec_string(obs.quantities[i])
         << ',' << rule_name(obs.rules[i]) << ',' << dec_string(obs.profits[i])
         << ',' << dec_string(obs.fitness[i]) << ',' << obs.tenures[i] << '\n';
    }
  }
  return os.str();
}

json simulate_report(const cournot::RunConfig& cfg,
                     const unsigned long long* seed_override,
                     const double* eps_sweep, size_t sweep_len) {
  using namespace cournot;
  std::vector<double> sweep;
  if (eps_sweep && sweep_len > 0) {
    sweep.assign(eps_sweep, eps_sweep + sweep_len);
  } else if (!cfg.epsilon_sweep.empty()) {
    sweep = cfg.epsilon_sweep;
  } else {
    sweep.push_back(cfg.noise.epsilon);
  }
  for (double e : sweep) {
    if (e <= 0.0 || e >= 1.0)
      throw ConfigError("epsilon_sweep", "entries must lie in (0, 1)");
  }
  SimulationParams params = cfg.sim;
  if (seed_override) params.seed = *seed_override;

  json out;
  out["seed"] = params.seed;
  json runs = json::array();
  for (double eps : sweep) {
    NoiseConfig noise = cfg.noise;
    noise.epsilon = eps;
    OccupancyTable table =
        estimate_stationary(cfg.model, cfg.criteria, noise, params);
    runs.push_back(occupancy_json(table, cfg.model.grid(), eps, noise));
  }
  out["runs"] = std::move(runs);
  return out;
}

json verify_report(const cournot::RunConfig& cfg, bool* all_pass) {
  using namespace cournot;
  json checks = json::array();
  bool ok = true;
  auto add = [&](const std::string& name, bool pass,
                 const std::string& detail) {
    json c;
    c["name"] = name;
    c["pass"] = pass;
    if (!detail.empty()) c["detail"] = detail;
    checks.push_back(std::move(c));
    ok = ok && pass;
  };

  const OligopolyModel& model = cfg.model;
  bool have_bench = false;
  Benchmarks bench;
  try {
    bench = compute_benchmarks(model, cfg.snap_tol);
    have_bench = true;
    add("benchmarks_on_grid", true,
        "q^N=" + dec_string(bench.nash) + " q^W=" + dec_string(bench.walras) +
            " q^C=" + dec_string(bench.collusive));
  } catch (const std::exception& e) {
    add("benchmarks_on_grid", false, e.what());
  }

  {
    SubstitutesReport rep = verify_strategic_substitutes(model);
    add("strategic_substitutes", rep.pass, rep.counterexample);
  }

  AggregativeGame agg = make_cournot_aggregative(model);
  {
    QsmReport rep = verify_quasi_submodularity(agg);
    add("quasi_submodularity", rep.pass, rep.counterexample);
  }
  {
    AtsResult ats = compute_ats(agg);
    bool pass = ats.exists && ats.is_unique;
    std::string detail;
    if (!ats.exists) {
      detail = "no aggregate-taking strategy on the grid";
    } else {
      detail = "s*=" + dec_string(ats.strategy);
      if (have_bench && std::abs(ats.strategy - bench.walras) > 1e-9) {
        pass = false;
        detail += " (expected q^W=" + dec_string(bench.walras) + ")";
      }
    }
    add("aggregate_taking_strategy", pass, detail);
    if (ats.exists) {
      AtsAdvantageReport rep = verify_ats_advantage(agg, ats);
      add("ats_relative_advantage", rep.pass,
          rep.pass ? "min margin " + dec_string(rep.min_margin) : rep.detail);
    }
  }
  if (have_bench) {
    try {
      int nash = nash_strategy_index(agg);
      double q = agg.strategies()[nash];
      bool pass = std::abs(q - bench.nash) <= 1e-9;
      add("nash_consistency", pass,
          "fixed-point scan gives " + dec_string(q));
    } catch (const std::exception& e) {
      add("nash_consistency", false, e.what());
    }
  }

  {
    RadiusReport rep = verify_radius_walras(model);
    add("walras_radius", rep.pass, rep.detail);
  }
  {
    RuleMistakePathReport rep = certify_rule_mistake_paths(model,
                                                           cfg.sim.memory);
    add("rule_mistake_paths", rep.pass, rep.detail);
  }

  try {
    LreResult res = compute_lre(model, cfg.noise.eta);
    LreBounds bounds = lre_bounds(model);
    bool pass = true;
    std::string detail = std::to_string(res.lre.size()) + " long-run state(s)";
    for (const auto& node : res.lre) {
      double q = model.grid().value(node.quantity_index);
      if (node.rule == Rule::IM &&
          (q < bounds.lower - 1e-9 || q > bounds.upper + 1e-9)) {
        pass = false;
        detail = "mon(" + dec_string(q) + ",IM) outside [" +
                 dec_string(bounds.lower) + ", " + dec_string(bounds.upper) +
                 "]";
        break;
      }
    }
    add("lre_within_bounds", pass, detail);
  } catch (const std::exception& e) {
    add("lre_within_bounds", false, e.what());
  }

  // Rule-principle checks, once per distinct configured criterion. A
  // criterion classified as SF-violating passes when the statistical check
  // confirms the violation.
  std::vector<CriterionSpec> distinct;
  for (const auto& c : cfg.criteria) {
    bool seen = false;
    for (const auto& d : distinct)
      if (d.kind == c.kind && d.sample_size == c.sample_size) seen = true;
    if (!seen) distinct.push_back(c);
  }
  const long kTrials = 10000;
  for (const auto& c : distinct) {
    Revisor revisor = make_revisor(c);
    Rng rng(0x9e3779b97f4a7c15ULL);
    PrincipleReport nb = check_no_birth(revisor, kTrials, rng);
    add("no_birth[" + c.name() + "]", nb.pass, nb.detail);
    PrincipleReport sf = check_survival_of_fittest(revisor, kTrials, rng);
    if (c.satisfies_sf()) {
      add("survival_of_fittest[" + c.name() + "]", sf.pass, sf.detail);
    } else {
      add("survival_of_fittest[" + c.name() + "]", !sf.pass,
          sf.pass ? "expected a violation for this criterion"
                  : "violation confirmed: " + sf.detail);
    }
  }

  json out;
  out["checks"] = std::move(checks);
  out["pass"] = ok;
  *all_pass = ok;
  return out;
}

json aggregative_report(const cournot::RunConfig& cfg,
                        const double* eta_override) {
  using namespace cournot;
  AggregativeGame game =
      cfg.aggregative ? *cfg.aggregative : make_cournot_aggregative(cfg.model);
  double eta = eta_override ? *eta_override : cfg.noise.eta;
  if (eta < 1.0) throw ConfigError("eta", "must be >= 1");

  json out;
  out["n"] = game.n();
  out["strategy_count"] = game.strategies().size();

  QsmReport qsm = verify_quasi_submodularity(game);
  out["quasi_submodular"]["pass"] = qsm.pass;
  if (!qsm.pass) out["quasi_submodular"]["counterexample"] = qsm.counterexample;

  AtsResult ats = compute_ats(game);
  out["ats"]["exists"] = ats.exists;
  if (ats.exists) {
    out["ats"]["strategy"] = quantity_json(ats.strategy);
    out["ats"]["is_unique"] = ats.is_unique;
    AtsAdvantageReport adv = verify_ats_advantage(game, ats);
    out["ats"]["relative_advantage"]["pass"] = adv.pass;
    out["ats"]["relative_advantage"]["min_margin"] = adv.min_margin;
    if (!adv.pass) out["ats"]["relative_advantage"]["detail"] = adv.detail;
  }

  int nash = nash_strategy_index(game);
  out["nash"]["strategy"] = quantity_json(game.strategies()[nash]);

  TransitionGraph graph = build_aggregative_resistances(game, eta);
  LreResult res = solve_lre(graph);
  json winners = json::array();
  for (const auto& node : res.lre) {
    json w;
    w["rule"] = rule_name(node.rule);
    w["strategy"] = quantity_json(game.strategies()[node.quantity_index]);
    winners.push_back(std::move(w));
  }
  out["lre"]["eta"] = eta;
  out["lre"]["min_tree_cost"] = res.min_tree_cost;
  out["lre"]["states"] = std::move(winners);
  // The two states stochastically stable for every eta (the aggregate-taking
  // imitation state and the Nash best-response state).
  out["lre"]["guaranteed"] = json::array(
      {json{{"rule", "IM"},
            {"strategy", quantity_json(game.strategies()[graph.walras_im])}},
       json{{"rule", "BR"},
            {"strategy", quantity_json(game.strategies()[graph.nash_im])}}});
  return out;
}

}  // namespace

extern "C" {

int clre_run_new(const char* config_json, clre_run** out) {
  if (out) *out = nullptr;
  if (!config_json || !out) {
    g_creation_error = "null argument";
    return CLRE_RUNTIME_ERROR;
  }
  try {
    cournot::RunConfig cfg = cournot::parse_config(config_json);
    *out = new clre_run(std::move(cfg));
    g_creation_error.clear();
    return CLRE_OK;
  } catch (const cournot::ConfigError& e) {
    g_creation_error = e.what();
    return CLRE_CONFIG_ERROR;
  } catch (const std::exception& e) {
    g_creation_error = e.what();
    return CLRE_RUNTIME_ERROR;
  }
}

void clre_run_free(clre_run* run) { delete run; }

const char* clre_last_error(const clre_run* run) {
  return run ? run->last_error.c_str() : g_creation_error.c_str();
}

void clre_string_free(char* s) { delete[] s; }

int clre_bench(clre_run* run, char** out_json) {
  return guarded(run, [&] {
    if (!out_json) throw std::invalid_argument("null output argument");
    *out_json = dup_string(bench_report(run->cfg).dump(2));
  });
}

int clre_analyze(clre_run* run, const double* eta_override, char** out_json) {
  return guarded(run, [&] {
    if (!out_json) throw std::invalid_argument("null output argument");
    *out_json = dup_string(analyze_report(run->cfg, eta_override).dump(2));
  });
}

int clre_analyze_dot(clre_run* run, const double* eta_override,
                     char** out_dot) {
  return guarded(run, [&] {
    if (!out_dot) throw std::invalid_argument("null output argument");
    *out_dot = dup_string(analyze_dot(run->cfg, eta_override));
  });
}

int clre_simulate(clre_run* run, const unsigned long long* seed_override,
                  const double* eps_sweep, size_t sweep_len, char** out_json,
                  char** out_trajectory_csv) {
  return guarded(run, [&] {
    if (!out_json) throw std::invalid_argument("null output argument");
    json report =
        simulate_report(run->cfg, seed_override, eps_sweep, sweep_len);
    *out_json = dup_string(report.dump(2));
    if (out_trajectory_csv) {
      std::uint64_t seed = seed_override ? *seed_override : run->cfg.sim.seed;
      *out_trajectory_csv = dup_string(trajectory_csv(run->cfg, seed));
    }
  });
}

int clre_verify(clre_run* run, char** out_json) {
  if (!run) return CLRE_RUNTIME_ERROR;
  bool all_pass = false;
  int rc = guarded(run, [&] {
    if (!out_json) throw std::invalid_argument("null output argument");
    *out_json = dup_string(verify_report(run->cfg, &all_pass).dump(2));
  });
  if (rc != CLRE_OK) return rc;
  if (!all_pass) {
    run->last_error = "one or more verification checks failed";
    return CLRE_CHECK_FAILED;
  }
  return CLRE_OK;
}

int clre_aggregative(clre_run* run, const double* eta_override,
                     char** out_json) {
  return guarded(run, [&] {
    if (!out_json) throw std::invalid_argument("null output argument");
    *out_json = dup_string(aggregative_report(run->cfg, eta_override).dump(2));
  });
}

}  // extern "C"
