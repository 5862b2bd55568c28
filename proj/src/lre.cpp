#include "cournotlre/lre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "cournotlre/dynamics.hpp"
#include "cournotlre/util.hpp"

namespace cournot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;

struct Edge {
  int from, to;
  double w;
  int orig;     // original edge id
  int entered;  // cycle node the original edge pointed to, -1 if none
};

// Min out-arborescence from `root` over an edge list, returning the chosen
// original edge ids. Recursion implements the contraction step.
std::vector<int> edmonds(int nnodes, int root, const std::vector<Edge>& edges,
                         double& cost_out) {
  std::vector<int> in_edge(nnodes, -1);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const auto& ed = edges[e];
    if (ed.to == root || ed.from == ed.to) continue;
    if (in_edge[ed.to] == -1) {
      in_edge[ed.to] = e;
    } else {
      const auto& cur = edges[in_edge[ed.to]];
      if (ed.w < cur.w - 1e-15 ||
          (std::abs(ed.w - cur.w) <= 1e-15 && ed.from < cur.from)) {
        in_edge[ed.to] = e;
      }
    }
  }
  for (int v = 0; v < nnodes; ++v) {
    if (v != root && in_edge[v] == -1)
      throw std::runtime_error("root unreachable from some node");
  }

  // Cycle detection over the selected in-edges.
  std::vector<int> color(nnodes, 0);
  std::vector<int> cycle;
  for (int start = 0; start < nnodes && cycle.empty(); ++start) {
    if (color[start] != 0) continue;
    int v = start;
    std::vector<int> path;
    while (v != root && color[v] == 0) {
      color[v] = 1;
      path.push_back(v);
      v = edges[in_edge[v]].from;
    }
    if (v != root && color[v] == 1) {
      // Found a cycle; extract it from the path.
      auto it = std::find(path.begin(), path.end(), v);
      cycle.assign(it, path.end());
    }
    for (int u : path) color[u] = 2;
  }

  if (cycle.empty()) {
    std::vector<int> out;
    cost_out = 0.0;
    for (int v = 0; v < nnodes; ++v) {
      if (v == root) continue;
      out.push_back(edges[in_edge[v]].orig);
      cost_out += edges[in_edge[v]].w;
    }
    return out;
  }

  std::vector<char> in_cycle(nnodes, 0);
  double cycle_cost = 0.0;
  for (int v : cycle) {
    in_cycle[v] = 1;
    cycle_cost += edges[in_edge[v]].w;
  }
  // Renumber: nodes outside the cycle keep compact ids, the cycle contracts
  // to id `k`.
  std::vector<int> remap(nnodes, -1);
  int k = 0;
  for (int v = 0; v < nnodes; ++v) {
    if (!in_cycle[v]) remap[v] = k++;
  }
  const int super = k;

  std::vector<Edge> nedges;
  // meta[i] = (original edge id, entered cycle node or -1) for new edge i.
  std::vector<std::pair<int, int>> meta;
  for (const auto& ed : edges) {
    bool fc = in_cycle[ed.from], tc = in_cycle[ed.to];
    if (fc && tc) continue;
    Edge ne = ed;
    ne.from = fc ? super : remap[ed.from];
    ne.to = tc ? super : remap[ed.to];
    int entered = -1;
    if (tc) {
      ne.w = ed.w - edges[in_edge[ed.to]].w;
      entered = ed.to;
    }
    ne.orig = static_cast<int>(meta.size());
    meta.emplace_back(ed.orig, entered);
    nedges.push_back(ne);
  }

  double sub_cost = 0.0;
  std::vector<int> sub = edmonds(k + 1, remap[root], nedges, sub_cost);

  std::vector<int> out;
  int killed = -1;
  for (int nid : sub) {
    auto [orig, entered] = meta[nid];
    out.push_back(orig);
    if (entered != -1) killed = entered;
  }
  for (int v : cycle) {
    if (v != killed) out.push_back(edges[in_edge[v]].orig);
  }
  cost_out = sub_cost + cycle_cost;
  if (killed != -1) cost_out -= 0.0;  // entering weight already adjusted
  return out;
}

}  // namespace

Arborescence min_cost_arborescence(const std::vector<std::vector<double>>& cost,
                                   int root) {
  const int n = static_cast<int>(cost.size());
  // In-arborescence toward root == out-arborescence from root on the
  // reversed graph.
  std::vector<Edge> edges;
  std::vector<std::pair<int, int>> orig_pairs;  // (from, to) in the original
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !std::isfinite(cost[i][j])) continue;
      Edge e{j, i, cost[i][j], static_cast<int>(orig_pairs.size()), -1};
      orig_pairs.emplace_back(i, j);
      edges.push_back(e);
    }
  }
  Arborescence arb;
  std::vector<int> ids = edmonds(n, root, edges, arb.cost);
  for (int id : ids) arb.edges.push_back(orig_pairs[id]);
  // Recompute the cost from the chosen edges to stay independent of the
  // contraction bookkeeping.
  arb.cost = 0.0;
  for (auto [f, t] : arb.edges) arb.cost += cost[f][t];
  return arb;
}

std::vector<AbsorbingSet> enumerate_absorbing(const OligopolyModel& model) {
  Benchmarks b = compute_benchmarks(model);
  std::vector<AbsorbingSet> nodes;
  for (int i = 0; i <= model.grid().levels; ++i)
    nodes.push_back(AbsorbingSet{Rule::IM, i});
  nodes.push_back(AbsorbingSet{Rule::BR, b.nash_index});
  return nodes;
}

TransitionGraph build_resistances(const OligopolyModel& model, double eta) {
  if (eta < 1.0) throw std::invalid_argument("eta must be >= 1");
  Benchmarks bench = compute_benchmarks(model);
  TransitionGraph g;
  g.eta = eta;
  g.nodes = enumerate_absorbing(model);
  const int z = g.size();
  const int levels = model.grid().levels;
  g.walras_im = bench.walras_index;
  g.nash_im = bench.nash_index;
  g.nash_br = z - 1;
  g.cost.assign(z, std::vector<double>(z, kInf));
  g.tag.assign(z, std::vector<EdgeTag>(z, EdgeTag::None));

  auto one_mistake = [&](int qi, int qj) {
    return model.delta(model.grid().value(qi), model.grid().value(qj)) >= -1e-9;
  };

  // (a) IM -> IM: cost 1 inside the advantage set D(q), else lower bound 2.
  for (int i = 0; i <= levels; ++i) {
    for (int j = 0; j <= levels; ++j) {
      if (i == j) continue;
      if (one_mistake(i, j)) {
        g.cost[i][j] = 1.0;
        g.tag[i][j] = j == g.walras_im ? EdgeTag::Lemma3 : EdgeTag::Lemma4;
      } else {
        g.cost[i][j] = 2.0;
        g.tag[i][j] = EdgeTag::LowerBound;
      }
    }
  }
  // (b) One rule mistake with action inertia: any imitation state reaches
  // the best-response state, and the best-response state reaches
  // mon(q^N, IM); both cost eta.
  for (int i = 0; i <= levels; ++i) {
    g.cost[i][g.nash_br] = eta;
    g.tag[i][g.nash_br] = EdgeTag::Lemma5;
  }
  g.cost[g.nash_br][g.nash_im] = eta;
  g.tag[g.nash_br][g.nash_im] = EdgeTag::Lemma5;
  // (c) BR -> other IM states: needs the rule mistake plus at least one
  // action mistake; certified lower bound only.
  for (int j = 0; j <= levels; ++j) {
    if (j == g.nash_im) continue;
    g.cost[g.nash_br][j] = eta + 1.0;
    g.tag[g.nash_br][j] = EdgeTag::LowerBound;
  }
  return g;
}

LreResult solve_lre(const TransitionGraph& graph) {
  const int z = graph.size();
  LreResult res;
  res.graph = graph;
  res.eta = graph.eta;
  res.root_costs.resize(z);
  double best = kInf;
  std::vector<Arborescence> trees(z);
  for (int r = 0; r < z; ++r) {
    trees[r] = min_cost_arborescence(graph.cost, r);
    res.root_costs[r] = trees[r].cost;
    best = std::min(best, trees[r].cost);
  }
  res.min_tree_cost = best;

  // Exact-edge-only matrix for the soundness certification.
  std::vector<std::vector<double>> exact = graph.cost;
  for (int i = 0; i < z; ++i) {
    for (int j = 0; j < z; ++j) {
      if (graph.tag[i][j] == EdgeTag::LowerBound) exact[i][j] = kInf;
    }
  }

  for (int r = 0; r < z; ++r) {
    if (trees[r].cost > best + kCostTol) continue;
    bool uses_bound = false;
    for (auto [f, t] : trees[r].edges) {
      if (graph.tag[f][t] == EdgeTag::LowerBound) uses_bound = true;
    }
    Arborescence witness = trees[r];
    if (uses_bound) {
      witness = min_cost_arborescence(exact, r);
      if (witness.cost > best + kCostTol) {
        std::ostringstream os;
        os << "unsound minimum tree: root " << r
           << " attains the minimum only through lower-bound edges"
           << " (bounded cost " << trees[r].cost << ", exact cost "
           << witness.cost << ")";
        throw std::runtime_error(os.str());
      }
    }
    res.lre.push_back(graph.nodes[r]);
    res.witness_trees[r] = witness;
  }
  std::sort(res.lre.begin(), res.lre.end());
  return res;
}

LreResult compute_lre(const OligopolyModel& model, double eta) {
  TransitionGraph graph = build_resistances(model, eta);
  LreResult res = solve_lre(graph);

  // Cross-check against the closed-form characterization.
  std::vector<AbsorbingSet> expected;
  const bool unit_eta = eta <= 1.0 + 1e-12;
  if (!unit_eta) {
    expected = {graph.nodes[graph.walras_im], graph.nodes[graph.nash_br]};
    std::sort(expected.begin(), expected.end());
  } else {
    // Closure of {mon(q^N, IM)} under single-action-mistake transitions,
    // plus the two rule-mistake-linked states (tree surgery).
    const int levels = model.grid().levels;
    std::vector<char> in(levels + 1, 0);
    std::queue<int> todo;
    in[graph.nash_im] = 1;
    todo.push(graph.nash_im);
    while (!todo.empty()) {
      int q = todo.front();
      todo.pop();
      for (int j = 0; j <= levels; ++j) {
        if (!in[j] && graph.tag[q][j] != EdgeTag::LowerBound && j != q &&
            std::isfinite(graph.cost[q][j]) && graph.cost[q][j] <= 1.0) {
          in[j] = 1;
          todo.push(j);
        }
      }
    }
    for (int j = 0; j <= levels; ++j) {
      if (in[j]) expected.push_back(graph.nodes[j]);
    }
    expected.push_back(graph.nodes[graph.nash_br]);
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()),
                   expected.end());

    LreBounds bounds = lre_bounds(model);
    if (model.n() == 2 || bounds.grid_fine) {
      res.has_bounds = true;
      res.lower_bound = bounds.lower;
      res.upper_bound = bounds.upper;
      // Remark: imitation members must be exactly Gamma within the bounds.
      for (int j = 0; j <= levels; ++j) {
        double q = model.grid().value(j);
        bool inside = q >= bounds.lower - 1e-9 && q <= bounds.upper + 1e-9;
        if (inside != static_cast<bool>(in[j])) {
          std::ostringstream os;
          os << "closed-form bounds disagree with tree search at q="
             << dec_string(q) << " (bounds [" << dec_string(bounds.lower)
             << ", " << dec_string(bounds.upper) << "])";
          throw std::runtime_error(os.str());
        }
      }
    }
  }

  if (expected != res.lre) {
    std::ostringstream os;
    os << "tree search disagrees with closed form: got {";
    for (const auto& a : res.lre)
      os << " " << rule_name(a.rule) << ":" << a.quantity_index;
    os << " } expected {";
    for (const auto& a : expected)
      os << " " << rule_name(a.rule) << ":" << a.quantity_index;
    os << " }";
    throw std::runtime_error(os.str());
  }
  return res;
}

RadiusReport verify_radius_walras(const OligopolyModel& model) {
  Benchmarks b = compute_benchmarks(model);
  RadiusReport rep;
  const auto& grid = model.grid();
  for (int i = 0; i <= grid.levels; ++i) {
    double q = grid.value(i);
    if (i == b.walras_index) continue;
    if (model.delta(b.walras, q) >= 0.0) {
      rep.pass = false;
      rep.detail = "single mistake escapes the Walrasian state at q' = " +
                   dec_string(q);
      return rep;
    }
    if (model.delta(q, b.walras) <= 0.0) {
      rep.pass = false;
      rep.detail = "Walrasian quantity not advantageous against q = " +
                   dec_string(q);
      return rep;
    }
  }
  return rep;
}

RuleMistakePathReport certify_rule_mistake_paths(const OligopolyModel& model,
                                                 int memory) {
  RuleMistakePathReport rep;
  Benchmarks b = compute_benchmarks(model);
  double others = (model.n() - 1) * b.walras;
  auto brs = model.best_response(others);
  // Path with inertia in actions: after the rule switch every firm still
  // plays q^W, so BR and IM tie on average payoff and SF lets BR spread.
  // That path needs no history bound. The rule-inertia path needs the
  // deviator's one-period payoff to beat the incumbents' x-period average.
  double q_tilde = brs.front();
  if (std::abs(q_tilde - b.walras) < 1e-12) {
    rep.required_history = 0;  // degenerate: q^W best-responds to itself
    return rep;
  }
  double f_dev = model.profit(q_tilde, others + q_tilde);
  double pi_w = model.profit(b.walras, model.n() * b.walras);
  double pi_w_hit = model.profit(b.walras, others + q_tilde);
  if (f_dev <= pi_w) {
    rep.pass = false;
    rep.detail = "deviator payoff does not exceed pi^W";
    return rep;
  }
  // Smallest integer x with f_dev > (x pi_w + pi_w_hit) / (x + 1).
  double threshold = (pi_w_hit - f_dev) / (f_dev - pi_w);
  int x = std::max(1, static_cast<int>(std::floor(threshold)) + 1);
  rep.required_history = x;
  if (memory <= x + 1) {
    rep.pass = false;
    rep.detail = "memory M = " + std::to_string(memory) +
                 " too short for the rule-inertia path (needs M > " +
                 std::to_string(x + 1) + ")";
  }
  return rep;
}

std::string graph_to_dot(const TransitionGraph& graph,
                         const QuantityGrid& grid) {
  std::ostringstream os;
  os << "digraph resistances {\n";
  for (int i = 0; i < graph.size(); ++i) {
    os << "  n" << i << " [label=\""
       << PatternKey{graph.nodes[i].quantity_index, graph.nodes[i].rule}.label(
              grid)
       << "\"];\n";
  }
  for (int i = 0; i < graph.size(); ++i) {
    for (int j = 0; j < graph.size(); ++j) {
      if (!std::isfinite(graph.cost[i][j])) continue;
      if (graph.tag[i][j] == EdgeTag::LowerBound) continue;  // keep it readable
      os << "  n" << i << " -> n" << j << " [label=\"" << graph.cost[i][j]
         << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string tree_to_dot(const TransitionGraph& graph, const QuantityGrid& grid,
                        const Arborescence& tree, int root) {
  std::ostringstream os;
  os << "digraph witness_" << root << " {\n";
  for (int i = 0; i < graph.size(); ++i) {
    os << "  n" << i << " [label=\""
       << PatternKey{graph.nodes[i].quantity_index, graph.nodes[i].rule}.label(
              grid)
       << (i == root ? "\",shape=doublecircle];\n" : "\"];\n");
  }
  for (auto [f, t] : tree.edges) {
    os << "  n" << f << " -> n" << t << " [label=\"" << graph.cost[f][t]
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cournot
