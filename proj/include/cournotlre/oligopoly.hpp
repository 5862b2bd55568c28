#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cournot {

// Inverse demand p(Q). Linear: p(Q) = max(intercept - slope*Q, 0).
// Table: monotone piecewise-linear interpolation through (Q, p) points,
// clamped to 0 beyond the last point with p = 0.
class Demand {
 public:
  static Demand linear(double intercept, double slope);
  static Demand table(std::vector<std::pair<double, double>> points);

  double price(double total) const;
  double slope_at(double total) const;   // one-sided derivative, 0 past q_max
  double q_max() const { return q_max_; }

 private:
  Demand() = default;
  bool linear_ = true;
  double intercept_ = 0.0, slope_ = 0.0;
  std::vector<std::pair<double, double>> points_;
  double q_max_ = 0.0;
};

// Cost c(q) = coeff * q^exponent, exponent >= 1 so the cost is convex.
class Cost {
 public:
  Cost(double coeff, double exponent);
  double value(double q) const;
  double marginal(double q) const;

 private:
  double coeff_, exponent_;
};

struct QuantityGrid {
  double step = 1.0;  // lambda
  int levels = 1;     // nu; grid is {0, step, ..., levels*step}

  QuantityGrid() = default;
  QuantityGrid(double step_, int levels_);

  int size() const { return levels + 1; }
  double value(int i) const { return step * i; }
  double max() const { return step * levels; }
  // Index of the grid point within tol of q, if any.
  std::optional<int> index_of(double q, double tol = 1e-9) const;
};

class OligopolyModel {
 public:
  OligopolyModel(int n, Demand demand, Cost cost, QuantityGrid grid);

  int n() const { return n_; }
  const Demand& demand() const { return demand_; }
  const Cost& cost() const { return cost_; }
  const QuantityGrid& grid() const { return grid_; }

  // pi(q, Q) = p(Q) q - c(q); requires 0 <= q <= Q.
  double profit(double q, double total) const;

  // Grid argmax of q -> pi(q, q + others). At most two maximizers under
  // single-peakedness; ties resolved within abs tolerance 1e-9.
  std::vector<double> best_response(double others_total) const;
  std::vector<int> best_response_indices(double others_total) const;

  // Delta(q, q') = p(q' + (n-1)q)(q' - q) + c(q) - c(q'): relative profit
  // advantage of a lone deviator to q' against n-1 firms at q.
  double delta(double q, double q_prime) const;

 private:
  int n_;
  Demand demand_;
  Cost cost_;
  QuantityGrid grid_;
};

struct Benchmarks {
  double nash = 0.0;       // q^N
  double walras = 0.0;     // q^W
  double collusive = 0.0;  // q^C
  int nash_index = -1;     // grid index after snapping
  int walras_index = -1;
};

// Solves the continuous first-order conditions by bisection (tol 1e-10) and
// checks q^N, q^W against the grid. Throws std::runtime_error when a bracket
// is invalid or a benchmark misses the grid by more than snap_tol.
Benchmarks compute_benchmarks(const OligopolyModel& model,
                              double snap_tol = 1e-9);

// Nontrivial root of Delta(q, .) = 0 above q^W; defined for q < q^W.
double h_of(const OligopolyModel& model, double q);
// Lower boundary of D(q) for q > q^W; 0 when Delta(q, 0) > 0.
double ell_of(const OligopolyModel& model, double q);
// Root of p(q' + (n-1)q) = c'(q) clamped to [0, q]; defined for q > q^W.
double m_of(const OligopolyModel& model, double q);

struct AdvantageSet {
  double lo = 0.0, hi = 0.0;        // D(q) = [lo, hi]; lo == hi at q^W
  bool singleton = false;
  std::vector<int> grid_indices;    // Gamma cap D(q), by Delta sign
};
AdvantageSet advantage_set(const OligopolyModel& model, double q);

struct DescentSequences {
  std::vector<double> a;  // a_1 = q^N, a_{k+1} = ell(h(a_k)), ends at 0
  std::vector<double> b;  // b_k = h(a_k), ends at h(0)
  bool terminated = false;
};
// Requires n >= 3.
DescentSequences descent_sequences(const OligopolyModel& model);

struct LreBounds {
  double lower = 0.0, upper = 0.0;
  bool grid_fine = true;       // meaningful for n >= 3 only
  std::string diagnostic;
};
// n == 2: (q^N, h(q^N)). n >= 3: (0, h(0)) when every descent-sequence point
// lies within half a grid step of a grid point, else reports grid-too-coarse.
LreBounds lre_bounds(const OligopolyModel& model);

struct SubstitutesReport {
  bool pass = true;
  std::string counterexample;
};
// Exhaustive strict-strategic-substitutes check over grid quantity pairs and
// achievable aggregate pairs.
SubstitutesReport verify_strategic_substitutes(const OligopolyModel& model);

}  // namespace cournot
