#include "cournotlre/rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace cournot {

namespace {

constexpr double kTieTol = 1e-9;

std::vector<int> argmax_indices(const std::vector<double>& v) {
  double best = *std::max_element(v.begin(), v.end());
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    if (v[i] >= best - kTieTol) out.push_back(i);
  }
  return out;
}

// Distinct quantities among the profit-maximizing firms, restricted to the
// given firm subset.
std::vector<double> top_quantities(const ObservedPeriod& last,
                                   const std::vector<int>& firms) {
  double best = -std::numeric_limits<double>::infinity();
  for (int j : firms) best = std::max(best, last.profits[j]);
  std::set<double> qs;
  for (int j : firms) {
    if (last.profits[j] >= best - kTieTol) qs.insert(last.quantities[j]);
  }
  return {qs.begin(), qs.end()};
}

// Distinct rules among the max-fitness firms in the subset.
std::vector<Rule> top_rules(const ObservedPeriod& last,
                            const std::vector<int>& firms) {
  double best = -std::numeric_limits<double>::infinity();
  for (int j : firms) best = std::max(best, last.fitness[j]);
  std::set<Rule> rs;
  for (int j : firms) {
    if (last.fitness[j] >= best - kTieTol) rs.insert(last.rules[j]);
  }
  return {rs.begin(), rs.end()};
}

template <typename T>
T uniform_pick(const std::vector<T>& items, Rng& rng) {
  if (items.size() == 1) return items[0];
  std::uniform_int_distribution<size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

std::vector<int> all_firms(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Uniform random size-k subset of {0..n-1} containing `firm`.
std::vector<int> sample_with_self(int firm, int n, int k, Rng& rng) {
  std::vector<int> pool;
  for (int i = 0; i < n; ++i) {
    if (i != firm) pool.push_back(i);
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<int> out(pool.begin(), pool.begin() + (k - 1));
  out.push_back(firm);
  return out;
}

}  // namespace

const char* rule_name(Rule r) { return r == Rule::BR ? "BR" : "IM"; }

double ObservedPeriod::total_output() const {
  return std::accumulate(quantities.begin(), quantities.end(), 0.0);
}

std::string CriterionSpec::name() const {
  switch (kind) {
    case ImitateBestMax: return "imitate_best_max";
    case ImitateBestMaxSampling:
      return "imitate_best_max_sampling(" + std::to_string(sample_size) + ")";
    case Experimental: return "experimental";
    case ImitateIfBetter: return "imitate_if_better";
  }
  return "?";
}

double action_revise(int firm, Rule rule, const ObservedPeriod& last,
                     const OligopolyModel& model, Rng& rng) {
  if (rule == Rule::BR) {
    double others = last.total_output() - last.quantities[firm];
    return uniform_pick(model.best_response(others), rng);
  }
  return uniform_pick(top_quantities(last, all_firms(last.n())), rng);
}

std::vector<std::pair<int, double>> action_distribution(
    int firm, Rule rule, const ObservedPeriod& last,
    const OligopolyModel& model) {
  std::vector<double> qs;
  if (rule == Rule::BR) {
    double others = last.total_output() - last.quantities[firm];
    qs = model.best_response(others);
  } else {
    qs = top_quantities(last, all_firms(last.n()));
  }
  std::vector<std::pair<int, double>> out;
  double p = 1.0 / qs.size();
  for (double q : qs) {
    auto idx = model.grid().index_of(q);
    if (!idx) throw std::runtime_error("observed quantity off grid");
    out.emplace_back(*idx, p);
  }
  return out;
}

Rule rule_revise(int firm, const CriterionSpec& criterion,
                 const ObservedPeriod& last, Rng& rng) {
  const int n = last.n();
  switch (criterion.kind) {
    case CriterionSpec::ImitateBestMax:
      return uniform_pick(top_rules(last, all_firms(n)), rng);
    case CriterionSpec::ImitateBestMaxSampling: {
      int k = std::clamp(criterion.sample_size, 1, n);
      auto sample = sample_with_self(firm, n, k, rng);
      return uniform_pick(top_rules(last, sample), rng);
    }
    case CriterionSpec::Experimental: {
      std::uniform_int_distribution<int> d(0, n - 1);
      return last.rules[d(rng)];
    }
    case CriterionSpec::ImitateIfBetter: {
      double best = *std::max_element(last.fitness.begin(), last.fitness.end());
      if (last.fitness[firm] >= best - kTieTol) return last.rules[firm];
      std::vector<int> better;
      for (int j = 0; j < n; ++j) {
        if (last.fitness[j] > last.fitness[firm] + kTieTol) better.push_back(j);
      }
      return last.rules[uniform_pick(better, rng)];
    }
  }
  return last.rules[firm];
}

std::array<double, 2> rule_distribution(int firm, const CriterionSpec& criterion,
                                        const ObservedPeriod& last) {
  const int n = last.n();
  std::array<double, 2> probs{0.0, 0.0};
  auto add_uniform_over_rules = [&](const std::vector<Rule>& rs, double weight) {
    for (Rule r : rs) probs[static_cast<int>(r)] += weight / rs.size();
  };
  switch (criterion.kind) {
    case CriterionSpec::ImitateBestMax:
      add_uniform_over_rules(top_rules(last, all_firms(n)), 1.0);
      break;
    case CriterionSpec::ImitateBestMaxSampling: {
      int k = std::clamp(criterion.sample_size, 1, n);
      if (n > 20) throw std::runtime_error("sampling distribution: n too large");
      // Enumerate all (n-1 choose k-1) samples containing `firm`.
      std::vector<int> others;
      for (int i = 0; i < n; ++i) {
        if (i != firm) others.push_back(i);
      }
      std::vector<std::vector<int>> samples;
      std::vector<int> cur;
      std::function<void(size_t)> rec = [&](size_t start) {
        if (static_cast<int>(cur.size()) == k - 1) {
          auto s = cur;
          s.push_back(firm);
          samples.push_back(s);
          return;
        }
        for (size_t i = start; i < others.size(); ++i) {
          cur.push_back(others[i]);
          rec(i + 1);
          cur.pop_back();
        }
      };
      rec(0);
      for (const auto& s : samples) {
        add_uniform_over_rules(top_rules(last, s), 1.0 / samples.size());
      }
      break;
    }
    case CriterionSpec::Experimental:
      for (int j = 0; j < n; ++j) probs[static_cast<int>(last.rules[j])] += 1.0 / n;
      break;
    case CriterionSpec::ImitateIfBetter: {
      double best = *std::max_element(last.fitness.begin(), last.fitness.end());
      if (last.fitness[firm] >= best - kTieTol) {
        probs[static_cast<int>(last.rules[firm])] = 1.0;
        break;
      }
      std::vector<int> better;
      for (int j = 0; j < n; ++j) {
        if (last.fitness[j] > last.fitness[firm] + kTieTol) better.push_back(j);
      }
      for (int j : better) probs[static_cast<int>(last.rules[j])] += 1.0 / better.size();
      break;
    }
  }
  return probs;
}

Revisor make_revisor(const CriterionSpec& criterion) {
  return [criterion](int firm, const ObservedPeriod& last, Rng& rng) {
    return rule_revise(firm, criterion, last, rng);
  };
}

namespace {

// Random fixtures with deliberate fitness ties so that argmax sets are often
// non-singletons.
ObservedPeriod random_fixture(Rng& rng) {
  std::uniform_int_distribution<int> nd(2, 6);
  int n = nd(rng);
  ObservedPeriod obs;
  std::uniform_int_distribution<int> qd(0, 10);
  std::uniform_int_distribution<int> fd(0, 3);
  std::uniform_int_distribution<int> rd(0, 1);
  std::uniform_int_distribution<int> td(1, 5);
  for (int i = 0; i < n; ++i) {
    obs.quantities.push_back(static_cast<double>(qd(rng)));
    obs.profits.push_back(static_cast<double>(fd(rng)));
    obs.fitness.push_back(static_cast<double>(fd(rng)));
    obs.rules.push_back(rd(rng) == 0 ? Rule::BR : Rule::IM);
    obs.tenures.push_back(td(rng));
  }
  return obs;
}

}  // namespace

PrincipleReport check_no_birth(const Revisor& revise, long trials, Rng& rng) {
  PrincipleReport rep;
  rep.trials = trials;
  for (long t = 0; t < trials; ++t) {
    ObservedPeriod obs = random_fixture(rng);
    std::uniform_int_distribution<int> fd(0, obs.n() - 1);
    int firm = fd(rng);
    Rule adopted = revise(firm, obs, rng);
    bool in_use = std::find(obs.rules.begin(), obs.rules.end(), adopted) !=
                  obs.rules.end();
    if (!in_use) {
      ++rep.violations;
      if (rep.detail.empty()) {
        rep.detail = std::string("adopted ") + rule_name(adopted) +
                     " which no firm uses";
      }
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PrincipleReport check_survival_of_fittest(const Revisor& revise, long trials,
                                          Rng& rng) {
  PrincipleReport rep;
  rep.trials = trials;
  // Enough draws that a rule with adoption probability >= 0.1 is missed with
  // probability below 1e-11 per fixture.
  constexpr int kDrawsPerFixture = 256;
  long fixtures = std::max<long>(1, trials / kDrawsPerFixture);
  for (long t = 0; t < fixtures; ++t) {
    ObservedPeriod obs = random_fixture(rng);
    std::uniform_int_distribution<int> fd(0, obs.n() - 1);
    int firm = fd(rng);
    std::vector<Rule> required = top_rules(obs, all_firms(obs.n()));
    std::array<bool, 2> seen{false, false};
    for (int d = 0; d < kDrawsPerFixture; ++d) {
      seen[static_cast<int>(revise(firm, obs, rng))] = true;
    }
    for (Rule r : required) {
      if (!seen[static_cast<int>(r)]) {
        ++rep.violations;
        if (rep.detail.empty()) {
          rep.detail = std::string("rule ") + rule_name(r) +
                       " of a max-fitness firm was never adopted";
        }
      }
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace cournot
