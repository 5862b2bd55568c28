#pragma once

#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cournotlre/oligopoly.hpp"

namespace cournot {

enum class Rule { BR, IM };

const char* rule_name(Rule r);

using Rng = std::mt19937_64;

// Everything a revising firm observes about the last played period.
struct ObservedPeriod {
  std::vector<double> quantities;
  std::vector<double> profits;
  std::vector<Rule> rules;
  std::vector<double> fitness;  // average payoff over effective tenure
  std::vector<int> tenures;     // tau-tilde, in [1, M]

  int n() const { return static_cast<int>(quantities.size()); }
  double total_output() const;
};

struct CriterionSpec {
  enum Kind {
    ImitateBestMax,
    ImitateBestMaxSampling,
    Experimental,
    ImitateIfBetter,
  };
  Kind kind = ImitateBestMax;
  int sample_size = 2;  // sampling variant; always includes the revising firm

  bool satisfies_sf() const { return kind != ImitateIfBetter; }
  std::string name() const;
};

// One action revision under BR or IM. BR draws uniformly from the grid best
// responses to the others' last output; IM draws uniformly over the distinct
// quantities of the firms with maximal last-period profit.
double action_revise(int firm, Rule rule, const ObservedPeriod& last,
                     const OligopolyModel& model, Rng& rng);

// Exact distribution of action_revise, as (grid index, probability) pairs.
std::vector<std::pair<int, double>> action_distribution(
    int firm, Rule rule, const ObservedPeriod& last,
    const OligopolyModel& model);

Rule rule_revise(int firm, const CriterionSpec& criterion,
                 const ObservedPeriod& last, Rng& rng);

// Exact distribution of rule_revise as {P(BR), P(IM)}. The sampling variant
// enumerates all equally likely samples containing the revising firm
// (requires n <= 20).
std::array<double, 2> rule_distribution(int firm, const CriterionSpec& criterion,
                                        const ObservedPeriod& last);

// Structural checkers for the No-Birth and Survival-of-the-Fittest
// principles, usable with test-double revisors.
using Revisor = std::function<Rule(int firm, const ObservedPeriod&, Rng&)>;
Revisor make_revisor(const CriterionSpec& criterion);

struct PrincipleReport {
  bool pass = true;
  long trials = 0;
  long violations = 0;
  std::string detail;
};

// Over random fixtures, every revised rule must already be in use.
PrincipleReport check_no_birth(const Revisor& revise, long trials, Rng& rng);

// Over random fixtures, every rule held by a max-fitness firm must be adopted
// with positive empirical frequency by a revising firm.
PrincipleReport check_survival_of_fittest(const Revisor& revise, long trials,
                                          Rng& rng);

}  // namespace cournot
