#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cournotlre/oligopoly.hpp"
#include "cournotlre/rules.hpp"

namespace cournot {

struct NoiseConfig {
  double gamma = 0.5;    // rule-revision opportunity probability
  double theta = 0.5;    // action-revision opportunity probability
  double epsilon = 0.0;  // action-mistake probability; 0 = unperturbed chain
  double eta = 1.0;      // rule mistakes happen with probability epsilon^eta

  void validate() const;
  double rule_mistake_prob() const;
};

struct FirmRecord {
  int quantity_index = 0;
  Rule rule = Rule::IM;
  long tenure = 0;              // periods since last exercised rule revision
  std::deque<double> window;    // last M realized profits, newest at back
};

struct PeriodTriple {
  std::vector<int> quantity_indices;
  std::vector<Rule> rules;
  std::vector<int> tenures;  // tau-tilde
};

struct IndustryState {
  std::vector<FirmRecord> firms;
  long period = 0;
  int memory = 1;  // M
  std::deque<PeriodTriple> history;  // last M periods, newest at back

  int n() const { return static_cast<int>(firms.size()); }
  int effective_tenure(int firm) const;  // min(tenure, M)
  double fitness(int firm) const;        // mean of last tau-tilde profits
  // All firms at the same (q, rule) in the current period?
  std::optional<std::pair<int, Rule>> monomorphic_now() const;
};

// Builds a state by replaying (q0, rules0) for M warm-up periods so that
// every firm has a full payoff window and well-defined fitness.
IndustryState make_initial_state(const OligopolyModel& model,
                                 const std::vector<int>& quantity_indices,
                                 const std::vector<Rule>& rules, int memory);

IndustryState random_initial_state(const OligopolyModel& model, int n,
                                   int memory, Rng& rng);

ObservedPeriod observe(const IndustryState& state, const OligopolyModel& model);

// One period: per firm, rule-revision opportunity (gamma; mistake eps^eta),
// then action-revision opportunity (theta; mistake eps) under the revised
// rule, then the game is played and bookkeeping updated.
void step(IndustryState& state, const OligopolyModel& model,
          const std::vector<CriterionSpec>& criteria, const NoiseConfig& noise,
          Rng& rng);

struct AbsorbingDescriptor {
  bool absorbed = false;
  Rule rule = Rule::IM;
  int quantity_index = 0;
  long periods_taken = 0;
  std::string diagnostic;
};

// Steps the unperturbed chain (epsilon forced to 0) until the (q, rule)
// profile is constant and monomorphic for M consecutive periods.
AbsorbingDescriptor find_absorbing(IndustryState state,
                                   const OligopolyModel& model,
                                   const std::vector<CriterionSpec>& criteria,
                                   const NoiseConfig& noise, long max_periods,
                                   Rng& rng);

struct PatternKey {
  int quantity_index;
  Rule rule;
  bool operator<(const PatternKey& o) const {
    return std::tie(quantity_index, rule) < std::tie(o.quantity_index, o.rule);
  }
  std::string label(const QuantityGrid& grid) const;
};

struct OccupancyEntry {
  double mean = 0.0;
  double std_error = 0.0;
};

struct OccupancyTable {
  std::map<PatternKey, OccupancyEntry> patterns;
  // Per-replication occupancy shares, aligned with `replications`.
  std::map<PatternKey, std::vector<double>> replicate_shares;
  double non_monomorphic_mean = 0.0;
  long periods = 0;
  int replications = 0;

  double mass(const std::vector<PatternKey>& keys) const;
  // Mean and standard error of the summed occupancy of `keys`, computed on
  // the per-replication sums (not by adding per-pattern errors).
  OccupancyEntry mass_stat(const std::vector<PatternKey>& keys) const;
};

struct SimulationParams {
  int memory = 3;
  long periods = 100000;
  long burn_in = 10000;
  int replications = 4;
  std::uint64_t seed = 1;
  // Empty = random initial profile per replication.
  std::vector<int> initial_quantity_indices;
  std::vector<Rule> initial_rules;
};

// Long-run empirical occupancy of each monomorphic (q, rule) pattern,
// averaged over replications with standard errors. Requires epsilon > 0.
OccupancyTable estimate_stationary(const OligopolyModel& model,
                                   const std::vector<CriterionSpec>& criteria,
                                   const NoiseConfig& noise,
                                   const SimulationParams& params);

struct ExactStationary {
  long states = 0;
  std::map<PatternKey, double> pattern_mass;  // by current-period pattern
  double non_monomorphic_mass = 0.0;
};

// Enumerates the reachable state space, builds the exact one-period
// transition matrix from the analytic per-firm branch probabilities, and
// power-iterates to the stationary distribution (residual 1e-12).
// Throws when the reachable space exceeds max_states.
ExactStationary exact_chain_oracle(const OligopolyModel& model,
                                   const std::vector<CriterionSpec>& criteria,
                                   const NoiseConfig& noise, int memory,
                                   const std::vector<int>& seed_quantities,
                                   const std::vector<Rule>& seed_rules,
                                   long max_states = 200000);

}  // namespace cournot
