#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cournotlre/lre.hpp"
#include "cournotlre/oligopoly.hpp"

namespace cournot {

// Symmetric aggregative game on a finite ordered strategy set: payoffs
// depend on own strategy and a symmetric monotone aggregate of the profile.
class AggregativeGame {
 public:
  enum class Aggregator { Sum, Mean };

  // Payoff kernel pi~(s, t).
  using Kernel = std::function<double(double s, double t)>;

  AggregativeGame(int n, std::vector<double> strategies, Aggregator aggregator,
                  Kernel kernel);

  int n() const { return n_; }
  const std::vector<double>& strategies() const { return strategies_; }
  double payoff(double s, double t) const { return kernel_(s, t); }

  // Aggregate of a profile with `deviators` agents at s_dev and the rest at
  // s_base.
  double aggregate_mixed(double s_dev, int deviators, double s_base) const;
  double aggregate_mono(double s) const { return aggregate_mixed(s, 0, s); }

  // Exact image of g over multisets of strategies (symmetry collapses the
  // profile space); throws beyond the enumeration cap.
  std::vector<double> reachable_aggregates(long cap = 1000000) const;

 private:
  int n_;
  std::vector<double> strategies_;
  Aggregator aggregator_;
  Kernel kernel_;
};

// The Cournot model expressed as an aggregative instance (g = sum,
// pi~(q, Q) = p(Q) q - c(q)).
AggregativeGame make_cournot_aggregative(const OligopolyModel& model);

struct QsmReport {
  bool pass = true;
  std::string counterexample;
};
// Exhaustive strict-quasi-submodularity check over all strategy pairs and all
// reachable aggregate pairs.
QsmReport verify_quasi_submodularity(const AggregativeGame& game);

struct AtsResult {
  int index = -1;          // index into strategies(), -1 when none exists
  double strategy = 0.0;
  bool exists = false;
  bool is_unique = false;
  std::vector<int> all_indices;  // every fixed point found by the scan
};
// Scans all s for the aggregate-taking fixed point
// s in argmax_{s'} pi~(s', g(s,...,s)).
AtsResult compute_ats(const AggregativeGame& game);

struct AtsAdvantageReport {
  bool pass = true;
  double min_margin = 0.0;
  std::string detail;
};
// pi~(s*, g) > pi~(s', g) at every mixed profile with m deviators,
// 1 <= m < n.
AtsAdvantageReport verify_ats_advantage(const AggregativeGame& game,
                                        const AtsResult& ats);

// Unique symmetric pure Nash strategy, found by scanning every s for the
// best-response fixed point; throws when none or several exist.
int nash_strategy_index(const AggregativeGame& game);

// Resistance graph over {mon(s, IM)} + {mon(Nash, BR)} using the same edge
// logic as the Cournot engine, ready for solve_lre.
TransitionGraph build_aggregative_resistances(const AggregativeGame& game,
                                              double eta);

}  // namespace cournot
