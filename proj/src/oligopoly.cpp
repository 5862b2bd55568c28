#include "cournotlre/oligopoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cournot {

namespace {

constexpr double kRootTol = 1e-10;
constexpr int kMaxBisect = 200;

// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must have
// opposite (or zero) signs.
template <typename F>
double bisect(F f, double lo, double hi, const char* what) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw std::runtime_error(std::string("invalid bisection bracket for ") +
                             what);
  }
  for (int it = 0; it < kMaxBisect && hi - lo > kRootTol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Demand Demand::linear(double intercept, double slope) {
  if (intercept <= 0.0) throw std::invalid_argument("demand intercept must be > 0");
  if (slope == 0.0) throw std::invalid_argument("demand slope must be nonzero");
  Demand d;
  d.linear_ = true;
  d.intercept_ = intercept;
  d.slope_ = slope;
  d.q_max_ = slope > 0 ? intercept / slope
                       : std::numeric_limits<double>::infinity();
  return d;
}

Demand Demand::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("demand table needs >= 2 points");
  std::sort(points.begin(), points.end());
  if (points.front().first != 0.0)
    throw std::invalid_argument("demand table must start at Q = 0");
  if (points.front().second <= 0.0)
    throw std::invalid_argument("demand table requires p(0) > 0");
  for (size_t i = 1; i < points.size(); ++i) {
    if (points[i].second > points[i - 1].second)
      throw std::invalid_argument("demand table must be non-increasing");
  }
  Demand d;
  d.linear_ = false;
  d.q_max_ = points.back().second <= 0.0
                 ? points.back().first
                 : std::numeric_limits<double>::infinity();
  d.points_ = std::move(points);
  return d;
}

double Demand::price(double total) const {
  if (linear_) return std::max(intercept_ - slope_ * total, 0.0);
  if (total >= points_.back().first) return std::max(points_.back().second, 0.0);
  auto it = std::upper_bound(
      points_.begin(), points_.end(), total,
      [](double q, const std::pair<double, double>& pt) { return q < pt.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  double w = (total - lo.first) / (hi.first - lo.first);
  return std::max(lo.second + w * (hi.second - lo.second), 0.0);
}

double Demand::slope_at(double total) const {
  if (total >= q_max_) return 0.0;
  if (linear_) return -slope_;
  auto it = std::upper_bound(
      points_.begin(), points_.end(), total,
      [](double q, const std::pair<double, double>& pt) { return q < pt.first; });
  if (it == points_.end()) return 0.0;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return (hi.second - lo.second) / (hi.first - lo.first);
}

Cost::Cost(double coeff, double exponent) : coeff_(coeff), exponent_(exponent) {
  if (coeff <= 0.0) throw std::invalid_argument("cost coeff must be > 0");
  if (exponent < 1.0) throw std::invalid_argument("cost exponent must be >= 1");
}

double Cost::value(double q) const { return coeff_ * std::pow(q, exponent_); }

double Cost::marginal(double q) const {
  if (exponent_ == 1.0) return coeff_;
  return coeff_ * exponent_ * std::pow(q, exponent_ - 1.0);
}

QuantityGrid::QuantityGrid(double step_, int levels_)
    : step(step_), levels(levels_) {
  if (step <= 0.0) throw std::invalid_argument("grid step must be > 0");
  if (levels < 1) throw std::invalid_argument("grid levels must be >= 1");
}

std::optional<int> QuantityGrid::index_of(double q, double tol) const {
  int i = static_cast<int>(std::lround(q / step));
  if (i < 0 || i > levels) return std::nullopt;
  if (std::abs(value(i) - q) > tol) return std::nullopt;
  return i;
}

OligopolyModel::OligopolyModel(int n, Demand demand, Cost cost,
                               QuantityGrid grid)
    : n_(n), demand_(std::move(demand)), cost_(std::move(cost)), grid_(grid) {
  if (n < 2) throw std::invalid_argument("firm count must be >= 2");
  if (cost_.marginal(0.0) >= demand_.price(0.0))
    throw std::invalid_argument("trivial market: c'(0) >= p(0)");
}

double OligopolyModel::profit(double q, double total) const {
  if (q < 0.0 || total < q) throw std::domain_error("profit: need 0 <= q <= Q");
  return demand_.price(total) * q - cost_.value(q);
}

std::vector<int> OligopolyModel::best_response_indices(
    double others_total) const {
  if (others_total < 0.0) throw std::domain_error("best_response: Q_-i < 0");
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid_.levels; ++i) {
    double q = grid_.value(i);
    best = std::max(best, profit(q, q + others_total));
  }
  std::vector<int> out;
  for (int i = 0; i <= grid_.levels; ++i) {
    double q = grid_.value(i);
    if (profit(q, q + others_total) >= best - 1e-9) out.push_back(i);
  }
  return out;
}

std::vector<double> OligopolyModel::best_response(double others_total) const {
  std::vector<double> out;
  for (int i : best_response_indices(others_total)) out.push_back(grid_.value(i));
  return out;
}

double OligopolyModel::delta(double q, double q_prime) const {
  if (q < 0.0 || q_prime < 0.0) throw std::domain_error("delta: negative quantity");
  double price = demand_.price(q_prime + (n_ - 1) * q);
  return price * (q_prime - q) + cost_.value(q) - cost_.value(q_prime);
}

Benchmarks compute_benchmarks(const OligopolyModel& model, double snap_tol) {
  const auto& d = model.demand();
  const auto& c = model.cost();
  const int n = model.n();
  double qmax = d.q_max();
  if (!std::isfinite(qmax)) qmax = model.grid().max() * n;
  double ub = qmax / n;

  // Symmetric Nash FOC: p(nq) + p'(nq) q - c'(q) = 0, decreasing in q.
  auto nash_foc = [&](double q) {
    return d.price(n * q) + d.slope_at(n * q) * q - c.marginal(q);
  };
  // Walrasian: p(nq) - c'(q) = 0.
  auto walras_foc = [&](double q) { return d.price(n * q) - c.marginal(q); };
  // Collusive FOC: p(nq) + n p'(nq) q - c'(q) = 0.
  auto coll_foc = [&](double q) {
    return d.price(n * q) + n * d.slope_at(n * q) * q - c.marginal(q);
  };

  Benchmarks b;
  b.nash = bisect(nash_foc, 0.0, ub, "q^N");
  b.walras = bisect(walras_foc, 0.0, ub, "q^W");
  b.collusive = bisect(coll_foc, 0.0, ub, "q^C");
  if (!(b.walras > b.nash && b.nash > 0.0))
    throw std::runtime_error("benchmark ordering q^W > q^N > 0 violated");

  const auto& grid = model.grid();
  auto ni = grid.index_of(b.nash, snap_tol);
  auto wi = grid.index_of(b.walras, snap_tol);
  if (!ni || !wi)
    throw std::runtime_error("grid does not contain q^N and q^W (snap tol)");
  b.nash = grid.value(*ni);
  b.walras = grid.value(*wi);
  b.nash_index = *ni;
  b.walras_index = *wi;
  return b;
}

double h_of(const OligopolyModel& model, double q) {
  Benchmarks b = compute_benchmarks(model);
  if (q >= b.walras) throw std::domain_error("h(q) defined for q < q^W only");
  double qmax = model.demand().q_max();
  if (!std::isfinite(qmax)) qmax = model.grid().max() * model.n();
  double ub = qmax - (model.n() - 1) * q;
  auto f = [&](double x) { return model.delta(q, x); };
  // Delta(q, q^W) > 0 and Delta(q, ub) < 0: single root beyond the peak.
  return bisect(f, b.walras, ub, "h(q)");
}

double m_of(const OligopolyModel& model, double q) {
  Benchmarks b = compute_benchmarks(model);
  if (q <= b.walras) throw std::domain_error("m(q) defined for q > q^W only");
  auto f = [&](double x) {
    return model.demand().price(x + (model.n() - 1) * q) -
           model.cost().marginal(q);
  };
  if (f(0.0) <= 0.0) return 0.0;  // D(q) = [0, q] in this case
  if (f(q) >= 0.0)
    throw std::runtime_error("m(q): no sign change on [0, q]");
  return bisect(f, 0.0, q, "m(q)");
}

double ell_of(const OligopolyModel& model, double q) {
  Benchmarks b = compute_benchmarks(model);
  if (q <= b.walras) throw std::domain_error("ell(q) defined for q > q^W only");
  if (model.delta(q, 0.0) > 0.0) return 0.0;
  // Delta(q, .) is single-peaked on [0, q] with its peak strictly left of q
  // (the slope at q' = q is p(nq) - c'(q) < 0 above q^W) and a nonnegative
  // peak value (Delta(q, q) = 0). Locate the peak from the derivative, then
  // bisect Delta on [0, peak].
  const auto& d = model.demand();
  const auto& c = model.cost();
  const int n = model.n();
  auto dslope = [&](double x) {
    double t = x + (n - 1) * q;
    return d.slope_at(t) * (x - q) + d.price(t) - c.marginal(x);
  };
  double peak = q;
  if (dslope(0.0) <= 0.0) {
    peak = 0.0;
  } else if (dslope(q) < 0.0) {
    peak = bisect(dslope, 0.0, q, "peak of Delta(q, .)");
  }
  auto f = [&](double x) { return model.delta(q, x); };
  return bisect(f, 0.0, peak, "ell(q)");
}

AdvantageSet advantage_set(const OligopolyModel& model, double q) {
  Benchmarks b = compute_benchmarks(model);
  AdvantageSet out;
  if (std::abs(q - b.walras) < 1e-12) {
    out.lo = out.hi = b.walras;
    out.singleton = true;
  } else if (q < b.walras) {
    out.lo = q;
    out.hi = h_of(model, q);
  } else {
    out.lo = ell_of(model, q);
    out.hi = q;
  }
  const auto& grid = model.grid();
  for (int i = 0; i <= grid.levels; ++i) {
    if (model.delta(q, grid.value(i)) >= -1e-9) out.grid_indices.push_back(i);
  }
  return out;
}

DescentSequences descent_sequences(const OligopolyModel& model) {
  if (model.n() < 3)
    throw std::domain_error("descent sequences defined for n >= 3");
  DescentSequences seq;
  Benchmarks bm = compute_benchmarks(model);
  double a = bm.nash;
  constexpr int kCap = 10000;
  for (int k = 0; k < kCap; ++k) {
    seq.a.push_back(a);
    double b = h_of(model, a);
    seq.b.push_back(b);
    if (a <= 1e-9) {
      seq.terminated = true;
      break;
    }
    a = ell_of(model, b);
  }
  return seq;
}

LreBounds lre_bounds(const OligopolyModel& model) {
  Benchmarks b = compute_benchmarks(model);
  LreBounds out;
  if (model.n() == 2) {
    out.lower = b.nash;
    out.upper = h_of(model, b.nash);
    return out;
  }
  DescentSequences seq = descent_sequences(model);
  if (!seq.terminated) {
    out.grid_fine = false;
    out.diagnostic = "descent sequence did not terminate";
    return out;
  }
  const auto& grid = model.grid();
  double half = 0.5 * grid.step + 1e-12;
  auto off_grid = [&](double v) {
    double nearest = std::lround(v / grid.step) * grid.step;
    return std::abs(v - nearest) > half || v > grid.max() + half;
  };
  for (double v : seq.a) {
    if (off_grid(v)) {
      out.grid_fine = false;
      out.diagnostic = "grid too coarse: descent point " + std::to_string(v) +
                       " is not grid-representable";
      return out;
    }
  }
  for (double v : seq.b) {
    if (off_grid(v)) {
      out.grid_fine = false;
      out.diagnostic = "grid too coarse: descent point " + std::to_string(v) +
                       " is not grid-representable";
      return out;
    }
  }
  out.lower = 0.0;
  out.upper = seq.b.back();  // h(0)
  return out;
}

SubstitutesReport verify_strategic_substitutes(const OligopolyModel& model) {
  SubstitutesReport rep;
  const auto& grid = model.grid();
  const int n = model.n();
  const int agg_levels = grid.levels * n;
  // For fixed q1 < q2 let g(Q) = pi(q2, Q) - pi(q1, Q). The substitutes
  // condition says: g(Q2) >= 0 implies g(Q1) > 0 for achievable Q1 < Q2.
  for (int i1 = 0; i1 < grid.size(); ++i1) {
    for (int i2 = i1 + 1; i2 < grid.size(); ++i2) {
      double q1 = grid.value(i1), q2 = grid.value(i2);
      double dc = model.cost().value(q2) - model.cost().value(q1);
      int last_nonneg = -1;
      std::vector<double> g(agg_levels + 1,
                            -std::numeric_limits<double>::infinity());
      for (int k = i2; k <= agg_levels; ++k) {
        double total = grid.step * k;
        if (total - q1 > (n - 1) * grid.max() + 1e-9) break;
        g[k] = model.demand().price(total) * (q2 - q1) - dc;
        if (g[k] >= 0.0) last_nonneg = k;
      }
      for (int k = i2; k < last_nonneg; ++k) {
        if (g[k] <= 0.0) {
          std::ostringstream os;
          os << "q1=" << q1 << " q2=" << q2 << " Q1=" << grid.step * k
             << " Q2=" << grid.step * last_nonneg;
          rep.pass = false;
          rep.counterexample = os.str();
          return rep;
        }
      }
    }
  }
  return rep;
}

}  // namespace cournot
