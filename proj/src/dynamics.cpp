#include "cournotlre/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "cournotlre/util.hpp"

namespace cournot {

void NoiseConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must be in (0,1)");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in [0,1)");
  if (!(eta >= 1.0)) throw std::invalid_argument("eta must be >= 1");
}

double NoiseConfig::rule_mistake_prob() const {
  return epsilon == 0.0 ? 0.0 : std::pow(epsilon, eta);
}

int IndustryState::effective_tenure(int firm) const {
  return static_cast<int>(std::min<long>(firms[firm].tenure, memory));
}

double IndustryState::fitness(int firm) const {
  const auto& w = firms[firm].window;
  int k = effective_tenure(firm);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += w[w.size() - 1 - i];
  return sum / k;
}

std::optional<std::pair<int, Rule>> IndustryState::monomorphic_now() const {
  int q0 = firms[0].quantity_index;
  Rule r0 = firms[0].rule;
  for (const auto& f : firms) {
    if (f.quantity_index != q0 || f.rule != r0) return std::nullopt;
  }
  return std::make_pair(q0, r0);
}

std::string PatternKey::label(const QuantityGrid& grid) const {
  return "mon(" + dec_string(grid.value(quantity_index)) + "," +
         rule_name(rule) + ")";
}

double OccupancyTable::mass(const std::vector<PatternKey>& keys) const {
  double sum = 0.0;
  for (const auto& k : keys) {
    auto it = patterns.find(k);
    if (it != patterns.end()) sum += it->second.mean;
  }
  return sum;
}

OccupancyEntry OccupancyTable::mass_stat(
    const std::vector<PatternKey>& keys) const {
  const int R = replications;
  std::vector<double> sums(static_cast<size_t>(std::max(R, 0)), 0.0);
  for (const auto& k : keys) {
    auto it = replicate_shares.find(k);
    if (it == replicate_shares.end()) continue;
    for (size_t r = 0; r < sums.size() && r < it->second.size(); ++r)
      sums[r] += it->second[r];
  }
  OccupancyEntry e;
  if (sums.empty()) return e;
  e.mean = std::accumulate(sums.begin(), sums.end(), 0.0) / R;
  double var = 0.0;
  for (double x : sums) var += (x - e.mean) * (x - e.mean);
  e.std_error = R > 1 ? std::sqrt(var / (R - 1) / R) : 0.0;
  return e;
}

namespace {

void play_and_record(IndustryState& state, const OligopolyModel& model) {
  double total = 0.0;
  for (const auto& f : state.firms) total += model.grid().value(f.quantity_index);
  PeriodTriple triple;
  for (int i = 0; i < state.n(); ++i) {
    auto& f = state.firms[i];
    double q = model.grid().value(f.quantity_index);
    f.window.push_back(model.profit(q, total));
    while (static_cast<int>(f.window.size()) > state.memory) f.window.pop_front();
    triple.quantity_indices.push_back(f.quantity_index);
    triple.rules.push_back(f.rule);
    triple.tenures.push_back(state.effective_tenure(i));
  }
  state.history.push_back(std::move(triple));
  while (static_cast<int>(state.history.size()) > state.memory)
    state.history.pop_front();
  ++state.period;
}

}  // namespace

IndustryState make_initial_state(const OligopolyModel& model,
                                 const std::vector<int>& quantity_indices,
                                 const std::vector<Rule>& rules, int memory) {
  if (memory < 1) throw std::invalid_argument("memory M must be >= 1");
  if (quantity_indices.size() != rules.size() || quantity_indices.empty())
    throw std::invalid_argument("initial profile size mismatch");
  IndustryState state;
  state.memory = memory;
  for (size_t i = 0; i < rules.size(); ++i) {
    FirmRecord f;
    f.quantity_index = quantity_indices[i];
    f.rule = rules[i];
    f.tenure = 0;
    state.firms.push_back(f);
  }
  // Warm-up: replay the profile for M periods so windows and history fill.
  for (int r = 0; r < memory; ++r) {
    for (auto& f : state.firms) ++f.tenure;
    play_and_record(state, model);
  }
  state.period = 0;
  return state;
}

IndustryState random_initial_state(const OligopolyModel& model, int n,
                                   int memory, Rng& rng) {
  std::uniform_int_distribution<int> qd(0, model.grid().levels);
  std::uniform_int_distribution<int> rd(0, 1);
  std::vector<int> qs;
  std::vector<Rule> rs;
  for (int i = 0; i < n; ++i) {
    qs.push_back(qd(rng));
    rs.push_back(rd(rng) == 0 ? Rule::BR : Rule::IM);
  }
  return make_initial_state(model, qs, rs, memory);
}

ObservedPeriod observe(const IndustryState& state,
                       const OligopolyModel& model) {
  ObservedPeriod obs;
  double total = 0.0;
  for (const auto& f : state.firms) total += model.grid().value(f.quantity_index);
  for (int i = 0; i < state.n(); ++i) {
    const auto& f = state.firms[i];
    double q = model.grid().value(f.quantity_index);
    obs.quantities.push_back(q);
    obs.profits.push_back(model.profit(q, total));
    obs.rules.push_back(f.rule);
    obs.fitness.push_back(state.fitness(i));
    obs.tenures.push_back(state.effective_tenure(i));
  }
  return obs;
}

void step(IndustryState& state, const OligopolyModel& model,
          const std::vector<CriterionSpec>& criteria, const NoiseConfig& noise,
          Rng& rng) {
  if (static_cast<int>(criteria.size()) != state.n())
    throw std::invalid_argument("one criterion per firm required");
  const ObservedPeriod obs = observe(state, model);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any_q(0, model.grid().levels);
  std::uniform_int_distribution<int> any_r(0, 1);
  const double rule_mistake = noise.rule_mistake_prob();

  for (int i = 0; i < state.n(); ++i) {
    auto& f = state.firms[i];
    bool revised = false;
    if (unit(rng) < noise.gamma) {
      revised = true;
      if (noise.epsilon > 0.0 && unit(rng) < rule_mistake) {
        f.rule = any_r(rng) == 0 ? Rule::BR : Rule::IM;
      } else {
        f.rule = rule_revise(i, criteria[i], obs, rng);
      }
    }
    // Reset applies to every exercised revision, even when the rule is kept.
    f.tenure = revised ? 1 : f.tenure + 1;

    if (unit(rng) < noise.theta) {
      if (noise.epsilon > 0.0 && unit(rng) < noise.epsilon) {
        f.quantity_index = any_q(rng);
      } else {
        double q = action_revise(i, f.rule, obs, model, rng);
        auto idx = model.grid().index_of(q);
        if (!idx) throw std::runtime_error("revised quantity off grid");
        f.quantity_index = *idx;
      }
    }
  }
  play_and_record(state, model);
}

AbsorbingDescriptor find_absorbing(IndustryState state,
                                   const OligopolyModel& model,
                                   const std::vector<CriterionSpec>& criteria,
                                   const NoiseConfig& noise, long max_periods,
                                   Rng& rng) {
  NoiseConfig quiet = noise;
  quiet.epsilon = 0.0;
  AbsorbingDescriptor out;
  std::optional<std::pair<int, Rule>> run_pattern;
  int run_length = 0;
  for (long t = 0; t < max_periods; ++t) {
    step(state, model, criteria, quiet, rng);
    auto pattern = state.monomorphic_now();
    if (pattern && run_pattern == pattern) {
      ++run_length;
    } else {
      run_pattern = pattern;
      run_length = pattern ? 1 : 0;
    }
    if (run_length >= state.memory) {
      out.absorbed = true;
      out.quantity_index = pattern->first;
      out.rule = pattern->second;
      out.periods_taken = t + 1;
      return out;
    }
  }
  out.diagnostic = "not absorbed within " + std::to_string(max_periods) +
                   " periods";
  return out;
}

OccupancyTable estimate_stationary(const OligopolyModel& model,
                                   const std::vector<CriterionSpec>& criteria,
                                   const NoiseConfig& noise,
                                   const SimulationParams& params) {
  noise.validate();
  if (noise.epsilon <= 0.0)
    throw std::invalid_argument(
        "estimate_stationary requires epsilon > 0 (perturbed chain)");
  if (params.replications < 1)
    throw std::invalid_argument("replications must be >= 1");

  const int n = static_cast<int>(criteria.size());
  std::map<PatternKey, std::vector<double>> shares;
  std::vector<double> other_shares;

  for (int rep = 0; rep < params.replications; ++rep) {
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(rep)));
    IndustryState state =
        params.initial_quantity_indices.empty()
            ? random_initial_state(model, n, params.memory, rng)
            : make_initial_state(model, params.initial_quantity_indices,
                                 params.initial_rules, params.memory);
    for (long t = 0; t < params.burn_in; ++t)
      step(state, model, criteria, noise, rng);
    std::map<PatternKey, long> counts;
    long other = 0;
    for (long t = 0; t < params.periods; ++t) {
      step(state, model, criteria, noise, rng);
      auto pattern = state.monomorphic_now();
      if (pattern) {
        ++counts[PatternKey{pattern->first, pattern->second}];
      } else {
        ++other;
      }
    }
    for (const auto& [key, count] : counts) {
      auto& v = shares[key];
      v.resize(rep, 0.0);
      v.push_back(static_cast<double>(count) / params.periods);
    }
    for (auto& [key, v] : shares) v.resize(rep + 1, 0.0);
    other_shares.push_back(static_cast<double>(other) / params.periods);
  }

  OccupancyTable table;
  table.periods = params.periods;
  table.replications = params.replications;
  const int R = params.replications;
  for (const auto& [key, v] : shares) {
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / R;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    double se = R > 1 ? std::sqrt(var / (R - 1) / R) : 0.0;
    table.patterns[key] = OccupancyEntry{mean, se};
    table.replicate_shares[key] = v;
  }
  table.non_monomorphic_mean =
      std::accumulate(other_shares.begin(), other_shares.end(), 0.0) / R;
  return table;
}

// ---------------------------------------------------------------------------
// Exact chain oracle
// ---------------------------------------------------------------------------

namespace {

using StateKey = std::vector<int>;

struct StateKeyHash {
  size_t operator()(const StateKey& k) const {
    size_t h = 146527;
    for (int v : k) h = h * 1000003u + static_cast<size_t>(v) + 0x9e37;
    return h;
  }
};

StateKey encode(const std::vector<PeriodTriple>& window) {
  StateKey key;
  for (const auto& tr : window) {
    for (size_t i = 0; i < tr.quantity_indices.size(); ++i) {
      key.push_back(tr.quantity_indices[i]);
      key.push_back(static_cast<int>(tr.rules[i]));
      key.push_back(tr.tenures[i]);
    }
  }
  return key;
}

struct FirmOutcome {
  Rule rule;
  bool reset;
  int quantity_index;
  double prob;
};

}  // namespace

ExactStationary exact_chain_oracle(const OligopolyModel& model,
                                   const std::vector<CriterionSpec>& criteria,
                                   const NoiseConfig& noise, int memory,
                                   const std::vector<int>& seed_quantities,
                                   const std::vector<Rule>& seed_rules,
                                   long max_states) {
  noise.validate();
  if (noise.epsilon <= 0.0)
    throw std::invalid_argument("exact_chain_oracle requires epsilon > 0");
  const int n = static_cast<int>(criteria.size());
  const int levels = model.grid().levels;
  const double rule_mistake = noise.rule_mistake_prob();

  // Derived observation for a history window.
  auto observe_window = [&](const std::vector<PeriodTriple>& window) {
    ObservedPeriod obs;
    const auto& now = window.back();
    double total = 0.0;
    for (int qi : now.quantity_indices) total += model.grid().value(qi);
    // Per-period profits over the whole window, newest last.
    std::vector<std::vector<double>> prof(window.size());
    for (size_t r = 0; r < window.size(); ++r) {
      double tot = 0.0;
      for (int qi : window[r].quantity_indices) tot += model.grid().value(qi);
      for (int qi : window[r].quantity_indices)
        prof[r].push_back(model.profit(model.grid().value(qi), tot));
    }
    for (int i = 0; i < n; ++i) {
      double q = model.grid().value(now.quantity_indices[i]);
      obs.quantities.push_back(q);
      obs.profits.push_back(prof.back()[i]);
      obs.rules.push_back(now.rules[i]);
      int ten = now.tenures[i];
      double sum = 0.0;
      for (int back = 0; back < ten; ++back)
        sum += prof[window.size() - 1 - back][i];
      obs.fitness.push_back(sum / ten);
      obs.tenures.push_back(ten);
    }
    return obs;
  };

  auto firm_outcomes = [&](int firm, const ObservedPeriod& obs) {
    // Rule branches: keep (no opportunity) or exercised revision via mistake
    // or criterion; exercised revisions reset tenure even when rule is kept.
    struct RuleBranch { Rule rule; bool reset; double prob; };
    std::vector<RuleBranch> rb;
    rb.push_back({obs.rules[firm], false, 1.0 - noise.gamma});
    auto crit = rule_distribution(firm, criteria[firm], obs);
    for (int r = 0; r < 2; ++r) {
      double p = noise.gamma * (0.5 * rule_mistake +
                                (1.0 - rule_mistake) * crit[r]);
      if (p > 0.0) rb.push_back({static_cast<Rule>(r), true, p});
    }
    std::vector<FirmOutcome> out;
    for (const auto& branch : rb) {
      std::vector<double> act(levels + 1, 0.0);
      act[model.grid().index_of(obs.quantities[firm]).value()] +=
          1.0 - noise.theta;
      for (int q = 0; q <= levels; ++q)
        act[q] += noise.theta * noise.epsilon / (levels + 1);
      for (auto [qi, p] : action_distribution(firm, branch.rule, obs, model))
        act[qi] += noise.theta * (1.0 - noise.epsilon) * p;
      for (int q = 0; q <= levels; ++q) {
        if (act[q] > 0.0)
          out.push_back({branch.rule, branch.reset, q, branch.prob * act[q]});
      }
    }
    return out;
  };

  std::unordered_map<StateKey, long, StateKeyHash> index;
  std::vector<std::vector<PeriodTriple>> states;
  std::vector<std::vector<std::pair<long, double>>> rows;

  // Seed: warm-upped monomorphic-ish window from the given profile.
  {
    IndustryState init = make_initial_state(model, seed_quantities, seed_rules,
                                            memory);
    std::vector<PeriodTriple> window(init.history.begin(), init.history.end());
    index.emplace(encode(window), 0);
    states.push_back(std::move(window));
  }

  std::queue<long> todo;
  todo.push(0);
  while (!todo.empty()) {
    long s = todo.front();
    todo.pop();
    if (static_cast<long>(rows.size()) <= s) rows.resize(s + 1);
    const auto window = states[s];
    ObservedPeriod obs = observe_window(window);

    std::vector<std::vector<FirmOutcome>> per_firm;
    for (int i = 0; i < n; ++i) per_firm.push_back(firm_outcomes(i, obs));

    std::unordered_map<StateKey, double, StateKeyHash> successors;
    std::vector<size_t> pick(n, 0);
    while (true) {
      double p = 1.0;
      PeriodTriple next;
      for (int i = 0; i < n; ++i) {
        const auto& o = per_firm[i][pick[i]];
        p *= o.prob;
        next.quantity_indices.push_back(o.quantity_index);
        next.rules.push_back(o.rule);
        int old_ten = window.back().tenures[i];
        next.tenures.push_back(o.reset ? 1 : std::min(old_ten + 1, memory));
      }
      std::vector<PeriodTriple> succ(window.begin() + 1, window.end());
      succ.push_back(std::move(next));
      successors[encode(succ)] += p;
      if (static_cast<long>(index.size()) <= max_states &&
          index.find(encode(succ)) == index.end()) {
        long id = static_cast<long>(states.size());
        index.emplace(encode(succ), id);
        states.push_back(succ);
        todo.push(id);
      }
      // Odometer over per-firm outcomes.
      int i = 0;
      while (i < n && ++pick[i] == per_firm[i].size()) pick[i++] = 0;
      if (i == n) break;
    }
    if (static_cast<long>(index.size()) > max_states)
      throw std::runtime_error("exact_chain_oracle: state space too large");
    auto& row = rows[s];
    for (const auto& [key, p] : successors)
      row.emplace_back(index.at(key), p);
  }

  const long S = static_cast<long>(states.size());
  rows.resize(S);
  std::vector<double> mu(S, 1.0 / S), next(S, 0.0);
  for (int it = 0; it < 200000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (long s = 0; s < S; ++s) {
      for (const auto& [t, p] : rows[s]) next[t] += mu[s] * p;
    }
    double resid = 0.0;
    for (long s = 0; s < S; ++s) resid += std::abs(next[s] - mu[s]);
    mu.swap(next);
    if (resid < 1e-12) break;
  }

  ExactStationary out;
  out.states = S;
  for (long s = 0; s < S; ++s) {
    const auto& now = states[s].back();
    bool mono = true;
    for (int i = 1; i < n; ++i) {
      if (now.quantity_indices[i] != now.quantity_indices[0] ||
          now.rules[i] != now.rules[0])
        mono = false;
    }
    if (mono) {
      out.pattern_mass[PatternKey{now.quantity_indices[0], now.rules[0]}] +=
          mu[s];
    } else {
      out.non_monomorphic_mass += mu[s];
    }
  }
  return out;
}

}  // namespace cournot
