#include "cournotlre/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace cournot {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(path.empty() ? key : path + "." + key, "required");
  return obj.at(key);
}

double require_number(const json& obj, const std::string& key,
                      const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number())
    throw ConfigError(path + "." + key, "must be a number");
  return v.get<double>();
}

long require_integer(const json& obj, const std::string& key,
                     const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer())
    throw ConfigError(path + "." + key, "must be an integer");
  return v.get<long>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (!obj.at(key).is_number())
    throw ConfigError(path + "." + key, "must be a number");
  return obj.at(key).get<double>();
}

long integer_or(const json& obj, const std::string& key, long fallback,
                const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer())
    throw ConfigError(path + "." + key, "must be an integer");
  return obj.at(key).get<long>();
}

Demand parse_demand(const json& d) {
  std::string type = require(d, "type", "model.demand").get<std::string>();
  if (type == "linear") {
    double intercept = require_number(d, "intercept", "model.demand");
    double slope = require_number(d, "slope", "model.demand");
    if (intercept <= 0.0)
      throw ConfigError("model.demand.intercept", "must be positive");
    if (slope <= 0.0)
      throw ConfigError("model.demand.slope", "must be positive");
    return Demand::linear(intercept, slope);
  }
  if (type == "table") {
    const json& pts = require(d, "points", "model.demand");
    if (!pts.is_array() || pts.size() < 2)
      throw ConfigError("model.demand.points", "need at least two [Q, p] rows");
    std::vector<std::pair<double, double>> points;
    for (const auto& row : pts) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
          !row[1].is_number())
        throw ConfigError("model.demand.points", "rows must be [Q, p] numbers");
      points.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return Demand::table(std::move(points));
  }
  throw ConfigError("model.demand.type", "unknown type '" + type + "'");
}

Cost parse_cost(const json& c) {
  std::string type = require(c, "type", "model.cost").get<std::string>();
  if (type != "power")
    throw ConfigError("model.cost.type", "unknown type '" + type + "'");
  double coeff = require_number(c, "coeff", "model.cost");
  double exponent = require_number(c, "exponent", "model.cost");
  if (coeff < 0.0) throw ConfigError("model.cost.coeff", "must be >= 0");
  if (exponent < 1.0) throw ConfigError("model.cost.exponent", "must be >= 1");
  return Cost(coeff, exponent);
}

OligopolyModel parse_model(const json& m) {
  long n = require_integer(m, "n", "model");
  if (n < 2) throw ConfigError("model.n", "must be >= 2");
  Demand demand = parse_demand(require(m, "demand", "model"));
  Cost cost = parse_cost(require(m, "cost", "model"));
  const json& g = require(m, "grid", "model");
  double step = require_number(g, "step", "model.grid");
  long levels = require_integer(g, "levels", "model.grid");
  if (step <= 0.0) throw ConfigError("model.grid.step", "must be positive");
  if (levels < 1) throw ConfigError("model.grid.levels", "must be >= 1");
  return OligopolyModel(static_cast<int>(n), std::move(demand), std::move(cost),
                        QuantityGrid(step, static_cast<int>(levels)));
}

CriterionSpec parse_criterion(const json& c, const std::string& path) {
  CriterionSpec spec;
  std::string name;
  if (c.is_string()) {
    name = c.get<std::string>();
  } else if (c.is_object()) {
    name = require(c, "type", path).get<std::string>();
    spec.sample_size =
        static_cast<int>(integer_or(c, "sample_size", spec.sample_size, path));
  } else {
    throw ConfigError(path, "must be a string or an object");
  }
  if (name == "imitate_best_max") {
    spec.kind = CriterionSpec::ImitateBestMax;
  } else if (name == "imitate_best_max_sampling") {
    spec.kind = CriterionSpec::ImitateBestMaxSampling;
  } else if (name == "experimental") {
    spec.kind = CriterionSpec::Experimental;
  } else if (name == "imitate_if_better") {
    spec.kind = CriterionSpec::ImitateIfBetter;
  } else {
    throw ConfigError(path, "unknown criterion '" + name + "'");
  }
  if (spec.kind == CriterionSpec::ImitateBestMaxSampling && spec.sample_size < 2)
    throw ConfigError(path + ".sample_size", "must be >= 2");
  return spec;
}

std::vector<CriterionSpec> parse_criteria(const json& root, int n) {
  if (!root.contains("criteria"))
    return std::vector<CriterionSpec>(n, CriterionSpec{});
  const json& c = root.at("criteria");
  if (c.is_array()) {
    if (static_cast<int>(c.size()) != n)
      throw ConfigError("criteria",
                        "array length must equal model.n (" +
                            std::to_string(n) + ")");
    std::vector<CriterionSpec> out;
    for (size_t i = 0; i < c.size(); ++i)
      out.push_back(
          parse_criterion(c[i], "criteria[" + std::to_string(i) + "]"));
    return out;
  }
  return std::vector<CriterionSpec>(n, parse_criterion(c, "criteria"));
}

NoiseConfig parse_noise(const json& root) {
  NoiseConfig noise;
  noise.epsilon = 0.01;
  if (root.contains("noise")) {
    const json& nz = root.at("noise");
    noise.gamma = number_or(nz, "gamma", noise.gamma, "noise");
    noise.theta = number_or(nz, "theta", noise.theta, "noise");
    noise.epsilon = number_or(nz, "epsilon", noise.epsilon, "noise");
    noise.eta = number_or(nz, "eta", noise.eta, "noise");
  }
  try {
    noise.validate();
  } catch (const std::exception& e) {
    throw ConfigError("noise", e.what());
  }
  return noise;
}

Rule parse_rule(const std::string& s, const std::string& path) {
  if (s == "BR") return Rule::BR;
  if (s == "IM") return Rule::IM;
  throw ConfigError(path, "rule must be \"BR\" or \"IM\"");
}

SimulationParams parse_sim(const json& root, const OligopolyModel& model) {
  SimulationParams sim;
  sim.memory = static_cast<int>(integer_or(root, "M", sim.memory, ""));
  if (sim.memory < 1) throw ConfigError("M", "must be >= 1");
  sim.periods = integer_or(root, "periods", sim.periods, "");
  sim.burn_in = integer_or(root, "burn_in", sim.burn_in, "");
  sim.replications =
      static_cast<int>(integer_or(root, "replications", sim.replications, ""));
  if (sim.periods < 1) throw ConfigError("periods", "must be >= 1");
  if (sim.burn_in < 0) throw ConfigError("burn_in", "must be >= 0");
  if (sim.replications < 1) throw ConfigError("replications", "must be >= 1");
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer())
      throw ConfigError("seed", "must be an integer");
    sim.seed = s.get<std::uint64_t>();
  }
  if (root.contains("initial")) {
    const json& init = root.at("initial");
    const json& qs = require(init, "quantities", "initial");
    if (!qs.is_array() || static_cast<int>(qs.size()) != model.n())
      throw ConfigError("initial.quantities",
                        "must list one quantity per firm");
    for (size_t i = 0; i < qs.size(); ++i) {
      if (!qs[i].is_number())
        throw ConfigError("initial.quantities", "entries must be numbers");
      auto idx = model.grid().index_of(qs[i].get<double>());
      if (!idx)
        throw ConfigError("initial.quantities",
                          "entry " + std::to_string(i) + " is off the grid");
      sim.initial_quantity_indices.push_back(*idx);
    }
    const json& rs = require(init, "rules", "initial");
    if (!rs.is_array() || static_cast<int>(rs.size()) != model.n())
      throw ConfigError("initial.rules", "must list one rule per firm");
    for (size_t i = 0; i < rs.size(); ++i) {
      if (!rs[i].is_string())
        throw ConfigError("initial.rules", "entries must be strings");
      sim.initial_rules.push_back(
          parse_rule(rs[i].get<std::string>(), "initial.rules"));
    }
  }
  return sim;
}

std::optional<AggregativeGame> parse_aggregative(const json& root) {
  if (!root.contains("aggregative")) return std::nullopt;
  const json& a = root.at("aggregative");
  long n = require_integer(a, "n", "aggregative");
  if (n < 2) throw ConfigError("aggregative.n", "must be >= 2");
  const json& strat = require(a, "strategies", "aggregative");
  if (!strat.is_array() || strat.empty())
    throw ConfigError("aggregative.strategies", "must be a non-empty array");
  std::vector<double> strategies;
  for (const auto& s : strat) {
    if (!s.is_number())
      throw ConfigError("aggregative.strategies", "entries must be numbers");
    strategies.push_back(s.get<double>());
  }
  std::string agg = "sum";
  if (a.contains("aggregator")) {
    if (!a.at("aggregator").is_string())
      throw ConfigError("aggregative.aggregator", "must be \"sum\" or \"mean\"");
    agg = a.at("aggregator").get<std::string>();
  }
  AggregativeGame::Aggregator aggregator;
  if (agg == "sum") {
    aggregator = AggregativeGame::Aggregator::Sum;
  } else if (agg == "mean") {
    aggregator = AggregativeGame::Aggregator::Mean;
  } else {
    throw ConfigError("aggregative.aggregator", "must be \"sum\" or \"mean\"");
  }
  const json& payoff = require(a, "payoff", "aggregative");
  std::string type = require(payoff, "type", "aggregative.payoff")
                         .get<std::string>();
  AggregativeGame::Kernel kernel;
  if (type == "cournot") {
    double intercept = require_number(payoff, "intercept", "aggregative.payoff");
    double slope = require_number(payoff, "slope", "aggregative.payoff");
    double coeff = require_number(payoff, "cost_coeff", "aggregative.payoff");
    double exponent =
        require_number(payoff, "cost_exponent", "aggregative.payoff");
    kernel = [intercept, slope, coeff, exponent](double s, double t) {
      return std::max(intercept - slope * t, 0.0) * s -
             coeff * std::pow(s, exponent);
    };
  } else if (type == "table") {
    // rows: [[s, t, payoff], ...], looked up with 1e-9 tolerance on (s, t).
    const json& rows = require(payoff, "rows", "aggregative.payoff");
    if (!rows.is_array() || rows.empty())
      throw ConfigError("aggregative.payoff.rows", "must be a non-empty array");
    auto table = std::make_shared<
        std::map<std::pair<long long, long long>, double>>();
    auto key = [](double s, double t) {
      return std::make_pair(static_cast<long long>(std::llround(s * 1e9)),
                            static_cast<long long>(std::llround(t * 1e9)));
    };
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 3 || !row[0].is_number() ||
          !row[1].is_number() || !row[2].is_number())
        throw ConfigError("aggregative.payoff.rows",
                          "rows must be [s, t, payoff] numbers");
      (*table)[key(row[0].get<double>(), row[1].get<double>())] =
          row[2].get<double>();
    }
    kernel = [table, key](double s, double t) {
      auto it = table->find(key(s, t));
      if (it == table->end())
        throw std::runtime_error("payoff table has no entry for (s=" +
                                 std::to_string(s) + ", t=" +
                                 std::to_string(t) + ")");
      return it->second;
    };
  } else {
    throw ConfigError("aggregative.payoff.type", "unknown type '" + type + "'");
  }
  return AggregativeGame(static_cast<int>(n), std::move(strategies), aggregator,
                         std::move(kernel));
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(document)", e.what());
  }
  if (!root.is_object()) throw ConfigError("(document)", "must be an object");

  OligopolyModel model = parse_model(require(root, "model", ""));
  RunConfig cfg{model,
                parse_criteria(root, model.n()),
                parse_noise(root),
                parse_sim(root, model),
                {},
                0,
                1e-9,
                parse_aggregative(root)};
  cfg.snap_tol = number_or(root, "snap_tol", cfg.snap_tol, "");
  if (cfg.snap_tol <= 0.0) throw ConfigError("snap_tol", "must be positive");
  cfg.trajectory_periods =
      integer_or(root, "trajectory_periods", cfg.trajectory_periods, "");
  if (cfg.trajectory_periods < 0)
    throw ConfigError("trajectory_periods", "must be >= 0");
  if (root.contains("epsilon_sweep")) {
    const json& sweep = root.at("epsilon_sweep");
    if (!sweep.is_array())
      throw ConfigError("epsilon_sweep", "must be an array of probabilities");
    for (const auto& e : sweep) {
      if (!e.is_number() || e.get<double>() <= 0.0 || e.get<double>() >= 1.0)
        throw ConfigError("epsilon_sweep", "entries must lie in (0, 1)");
      cfg.epsilon_sweep.push_back(e.get<double>());
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace cournot
