#pragma once

#include <map>
#include <string>
#include <vector>

#include "cournotlre/oligopoly.hpp"
#include "cournotlre/rules.hpp"

namespace cournot {

struct AbsorbingSet {
  Rule rule = Rule::IM;
  int quantity_index = 0;  // must be the Nash index when rule == BR

  bool operator==(const AbsorbingSet& o) const {
    return rule == o.rule && quantity_index == o.quantity_index;
  }
  bool operator<(const AbsorbingSet& o) const {
    if (quantity_index != o.quantity_index)
      return quantity_index < o.quantity_index;
    return static_cast<int>(rule) < static_cast<int>(o.rule);
  }
};

enum class EdgeTag { Lemma3, Lemma4, Lemma5, LowerBound, None };

// Absorbing sets as nodes, mistake-count resistances as edge weights.
// Edges tagged LowerBound carry a certified lower bound rather than an exact
// cost; minimum trees must avoid them for the result to be sound.
struct TransitionGraph {
  std::vector<AbsorbingSet> nodes;
  std::vector<std::vector<double>> cost;  // cost[i][j], self = +inf
  std::vector<std::vector<EdgeTag>> tag;
  int walras_im = -1, nash_im = -1, nash_br = -1;  // node indices
  double eta = 1.0;

  int size() const { return static_cast<int>(nodes.size()); }
};

// |Gamma| + 1 descriptors: mon(q, IM) for every grid q, plus mon(q^N, BR).
std::vector<AbsorbingSet> enumerate_absorbing(const OligopolyModel& model);

TransitionGraph build_resistances(const OligopolyModel& model, double eta);

struct Arborescence {
  double cost = 0.0;
  // Chosen edges as (from, to) pairs; every non-root node has exactly one
  // outgoing edge and all paths lead to the root.
  std::vector<std::pair<int, int>> edges;
};

// Exact minimum-cost in-arborescence (all edges directed toward root) via
// the Chu-Liu/Edmonds contraction algorithm; deterministic tie-break by
// lexicographic node order. Missing edges are +inf in `cost`.
Arborescence min_cost_arborescence(const std::vector<std::vector<double>>& cost,
                                   int root);

struct LreResult {
  std::vector<AbsorbingSet> lre;
  double min_tree_cost = 0.0;
  double eta = 1.0;
  std::map<int, Arborescence> witness_trees;  // keyed by root node index
  std::vector<double> root_costs;             // per node, lower-bound graph
  bool has_bounds = false;
  double lower_bound = 0.0, upper_bound = 0.0;  // eta == 1 only
  TransitionGraph graph;
};

// Runs the tree search over the resistance graph, certifies that every
// winning tree avoids lower-bound edges, and cross-checks the outcome
// against the closed-form characterization (hard error on discrepancy).
LreResult compute_lre(const OligopolyModel& model, double eta);

// Core solver shared with the aggregative embedding: winners of the
// minimum-tree search with the lower-bound soundness certification.
LreResult solve_lre(const TransitionGraph& graph);

struct RadiusReport {
  bool pass = true;
  std::string detail;
};

// Computational content of the Walrasian-radius lemma: no single action
// mistake escapes mon(q^W, IM), and one mistake reaches it from any other
// imitation state.
RadiusReport verify_radius_walras(const OligopolyModel& model);

// Witness checker for the eta-cost rule-mistake edges: exhibits an explicit
// positive-probability unperturbed continuation after a single rule mistake.
struct RuleMistakePathReport {
  bool pass = true;
  int required_history = 0;  // minimal x for the rule-inertia path
  std::string detail;
};
RuleMistakePathReport certify_rule_mistake_paths(const OligopolyModel& model,
                                                 int memory);

std::string graph_to_dot(const TransitionGraph& graph, const QuantityGrid& grid);
std::string tree_to_dot(const TransitionGraph& graph, const QuantityGrid& grid,
                        const Arborescence& tree, int root);

}  // namespace cournot
