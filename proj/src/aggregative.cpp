#include "cournotlre/aggregative.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cournotlre/util.hpp"

namespace cournot {

namespace {
constexpr double kTol = 1e-9;
}

AggregativeGame::AggregativeGame(int n, std::vector<double> strategies,
                                 Aggregator aggregator, Kernel kernel)
    : n_(n),
      strategies_(std::move(strategies)),
      aggregator_(aggregator),
      kernel_(std::move(kernel)) {
  if (n < 2) throw std::invalid_argument("agent count must be >= 2");
  if (strategies_.empty()) throw std::invalid_argument("empty strategy set");
  std::sort(strategies_.begin(), strategies_.end());
  strategies_.erase(std::unique(strategies_.begin(), strategies_.end()),
                    strategies_.end());
}

double AggregativeGame::aggregate_mixed(double s_dev, int deviators,
                                        double s_base) const {
  double sum = deviators * s_dev + (n_ - deviators) * s_base;
  return aggregator_ == Aggregator::Sum ? sum : sum / n_;
}

std::vector<double> AggregativeGame::reachable_aggregates(long cap) const {
  // Sums of n strategy draws, built one agent at a time with deduplication
  // of intermediate sums (grid-like strategy sets stay small this way).
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
      if (out.empty() || x > out.back() + 1e-12) out.push_back(x);
    v = std::move(out);
  };
  std::vector<double> sums{0.0};
  for (int agent = 0; agent < n_; ++agent) {
    std::vector<double> next;
    if (static_cast<long>(sums.size()) * static_cast<long>(strategies_.size()) >
        cap)
      throw std::runtime_error("reachable aggregates: enumeration cap hit");
    next.reserve(sums.size() * strategies_.size());
    for (double s : sums)
      for (double q : strategies_) next.push_back(s + q);
    dedupe(next);
    sums = std::move(next);
  }
  if (aggregator_ == Aggregator::Mean)
    for (double& s : sums) s /= n_;
  return sums;
}

AggregativeGame make_cournot_aggregative(const OligopolyModel& model) {
  std::vector<double> strategies;
  for (int i = 0; i <= model.grid().levels; ++i)
    strategies.push_back(model.grid().value(i));
  const Demand demand = model.demand();
  const Cost cost = model.cost();
  return AggregativeGame(
      model.n(), std::move(strategies), AggregativeGame::Aggregator::Sum,
      [demand, cost](double s, double t) {
        return demand.price(t) * s - cost.value(s);
      });
}

QsmReport verify_quasi_submodularity(const AggregativeGame& game) {
  QsmReport rep;
  const auto& S = game.strategies();
  std::vector<double> T = game.reachable_aggregates();
  // For fixed s1 < s2 let d(t) = pi~(s2, t) - pi~(s1, t). Both implications
  // reduce to: once d(t) <= 0 at some t, d must stay strictly negative for
  // every larger t.
  for (size_t i = 0; i + 1 < S.size(); ++i) {
    for (size_t j = i + 1; j < S.size(); ++j) {
      bool seen_nonpos = false;
      for (double t : T) {
        double d = game.payoff(S[j], t) - game.payoff(S[i], t);
        if (seen_nonpos && d >= 0.0) {
          std::ostringstream os;
          os << "s1=" << S[i] << " s2=" << S[j] << " fails at t=" << t;
          rep.pass = false;
          rep.counterexample = os.str();
          return rep;
        }
        if (d <= 0.0) seen_nonpos = true;
      }
    }
  }
  return rep;
}

AtsResult compute_ats(const AggregativeGame& game) {
  AtsResult res;
  const auto& S = game.strategies();
  for (size_t i = 0; i < S.size(); ++i) {
    double t = game.aggregate_mono(S[i]);
    double best = -std::numeric_limits<double>::infinity();
    for (double s : S) best = std::max(best, game.payoff(s, t));
    if (game.payoff(S[i], t) >= best - kTol)
      res.all_indices.push_back(static_cast<int>(i));
  }
  res.exists = !res.all_indices.empty();
  res.is_unique = res.all_indices.size() == 1;
  if (res.exists) {
    res.index = res.all_indices.front();
    res.strategy = S[res.index];
  }
  return res;
}

AtsAdvantageReport verify_ats_advantage(const AggregativeGame& game,
                                        const AtsResult& ats) {
  AtsAdvantageReport rep;
  if (!ats.exists) {
    rep.pass = false;
    rep.detail = "no ATS on grid";
    return rep;
  }
  rep.min_margin = std::numeric_limits<double>::infinity();
  const auto& S = game.strategies();
  for (size_t i = 0; i < S.size(); ++i) {
    if (static_cast<int>(i) == ats.index) continue;
    for (int m = 1; m < game.n(); ++m) {
      double t = game.aggregate_mixed(S[i], m, ats.strategy);
      double margin = game.payoff(ats.strategy, t) - game.payoff(S[i], t);
      rep.min_margin = std::min(rep.min_margin, margin);
      if (margin <= 0.0) {
        std::ostringstream os;
        os << "no strict advantage vs s'=" << S[i] << " with m=" << m
           << " deviators";
        rep.pass = false;
        rep.detail = os.str();
        return rep;
      }
    }
  }
  return rep;
}

int nash_strategy_index(const AggregativeGame& game) {
  const auto& S = game.strategies();
  std::vector<int> fixed;
  for (size_t i = 0; i < S.size(); ++i) {
    // Best response against n-1 agents at S[i].
    double best = -std::numeric_limits<double>::infinity();
    for (double s : S) {
      double t = game.aggregate_mixed(s, 1, S[i]);
      best = std::max(best, game.payoff(s, t));
    }
    double own = game.payoff(S[i], game.aggregate_mono(S[i]));
    if (own >= best - kTol) fixed.push_back(static_cast<int>(i));
  }
  if (fixed.size() != 1) {
    throw std::runtime_error(
        "symmetric Nash fixed-point scan found " + std::to_string(fixed.size()) +
        " candidates (need exactly one)");
  }
  return fixed.front();
}

TransitionGraph build_aggregative_resistances(const AggregativeGame& game,
                                              double eta) {
  if (eta < 1.0) throw std::invalid_argument("eta must be >= 1");
  const auto& S = game.strategies();
  const int k = static_cast<int>(S.size());
  AtsResult ats = compute_ats(game);
  if (!ats.exists) throw std::runtime_error("no ATS on grid");
  int nash = nash_strategy_index(game);
  if (nash == ats.index)
    throw std::runtime_error(
        "Nash strategy equals the ATS; the two-root characterization needs "
        "them distinct");

  TransitionGraph g;
  g.eta = eta;
  for (int i = 0; i < k; ++i) g.nodes.push_back(AbsorbingSet{Rule::IM, i});
  g.nodes.push_back(AbsorbingSet{Rule::BR, nash});
  const int z = g.size();
  g.walras_im = ats.index;
  g.nash_im = nash;
  g.nash_br = z - 1;
  g.cost.assign(z, std::vector<double>(
                       z, std::numeric_limits<double>::infinity()));
  g.tag.assign(z, std::vector<EdgeTag>(z, EdgeTag::None));

  // Relative advantage of a lone deviator to s' against n-1 agents at s.
  auto rel_advantage = [&](int i, int j) {
    double t = game.aggregate_mixed(S[j], 1, S[i]);
    return game.payoff(S[j], t) - game.payoff(S[i], t);
  };
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      if (rel_advantage(i, j) >= -kTol) {
        g.cost[i][j] = 1.0;
        g.tag[i][j] = j == g.walras_im ? EdgeTag::Lemma3 : EdgeTag::Lemma4;
      } else {
        g.cost[i][j] = 2.0;
        g.tag[i][j] = EdgeTag::LowerBound;
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    g.cost[i][g.nash_br] = eta;
    g.tag[i][g.nash_br] = EdgeTag::Lemma5;
  }
  g.cost[g.nash_br][g.nash_im] = eta;
  g.tag[g.nash_br][g.nash_im] = EdgeTag::Lemma5;
  for (int j = 0; j < k; ++j) {
    if (j == g.nash_im) continue;
    g.cost[g.nash_br][j] = eta + 1.0;
    g.tag[g.nash_br][j] = EdgeTag::LowerBound;
  }
  return g;
}

}  // namespace cournot
