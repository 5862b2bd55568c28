#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "cournotlre/oligopoly.hpp"
#include "cournotlre/util.hpp"
#include "helpers.hpp"

using namespace cournot;

TEST_CASE("demand and cost primitives") {
  Demand d = Demand::linear(90.0, 1.0);
  CHECK(d.price(0.0) == doctest::Approx(90.0));
  CHECK(d.price(60.0) == doctest::Approx(30.0));
  CHECK(d.price(120.0) == 0.0);  // clamped at zero
  CHECK(d.slope_at(60.0) == doctest::Approx(-1.0));
  CHECK(d.slope_at(120.0) == 0.0);
  CHECK(d.q_max() == doctest::Approx(90.0));

  Cost c(0.5, 2.0);
  CHECK(c.value(18.0) == doctest::Approx(162.0));
  CHECK(c.marginal(18.0) == doctest::Approx(18.0));
}

TEST_CASE("table demand interpolates monotonically") {
  Demand d = Demand::table({{0.0, 90.0}, {30.0, 60.0}, {90.0, 0.0}});
  CHECK(d.price(0.0) == doctest::Approx(90.0));
  CHECK(d.price(15.0) == doctest::Approx(75.0));
  CHECK(d.price(60.0) == doctest::Approx(30.0));
  CHECK(d.price(200.0) == 0.0);
}

TEST_CASE("grid indexing with snapping tolerance") {
  QuantityGrid g(7.5, 12);
  CHECK(g.size() == 13);
  CHECK(g.value(4) == doctest::Approx(30.0));
  CHECK(g.index_of(22.5).value() == 3);
  CHECK(g.index_of(22.5 + 5e-10).value() == 3);
  CHECK(!g.index_of(23.0).has_value());
  CHECK(!g.index_of(-1.0).has_value());
}

TEST_CASE("profit matches the closed form") {
  OligopolyModel m = make_example3();
  // pi(15, 60) = 30 * 15 - 112.5
  CHECK(m.profit(15.0, 60.0) == doctest::Approx(337.5));
  // Walrasian profile: pi(18, 72) = 18 * 18 - 162 = 162
  CHECK(m.profit(18.0, 72.0) == doctest::Approx(162.0));
  // Beyond demand choke: price zero, pure cost
  CHECK(m.profit(10.0, 100.0) == doctest::Approx(-50.0));
}

TEST_CASE("best response against a brute-force oracle") {
  OligopolyModel m = make_example3();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> od(0.0, 200.0);
  for (int trial = 0; trial < 200; ++trial) {
    double others = od(rng);
    auto br = m.best_response(others);
    REQUIRE(!br.empty());
    double best = -1e300;
    for (int i = 0; i <= m.grid().levels; ++i) {
      double q = m.grid().value(i);
      best = std::max(best, m.profit(q, q + others));
    }
    for (double q : br) {
      CHECK(m.profit(q, q + others) == doctest::Approx(best).epsilon(1e-12));
    }
    // Every grid maximizer is reported.
    for (int i = 0; i <= m.grid().levels; ++i) {
      double q = m.grid().value(i);
      if (m.profit(q, q + others) >= best - 1e-9) {
        CHECK(std::find_if(br.begin(), br.end(), [&](double x) {
                return std::abs(x - q) < 1e-12;
              }) != br.end());
      }
    }
  }
}

TEST_CASE("benchmarks: four-firm reference instance") {
  OligopolyModel m = make_example3();
  Benchmarks b = compute_benchmarks(m);
  CHECK(std::abs(b.nash - 15.0) < 1e-9);
  CHECK(std::abs(b.walras - 18.0) < 1e-9);
  CHECK(std::abs(b.collusive - 10.0) < 1e-8);
  CHECK(b.nash_index == 15);
  CHECK(b.walras_index == 18);
}

TEST_CASE("benchmarks: duopoly instance") {
  OligopolyModel m = make_duopoly();
  Benchmarks b = compute_benchmarks(m);
  CHECK(std::abs(b.nash - 22.5) < 1e-9);
  CHECK(std::abs(b.walras - 30.0) < 1e-9);
  CHECK(b.nash_index == 3);
  CHECK(b.walras_index == 4);
}

TEST_CASE("benchmarks reject grids missing q^N or q^W") {
  // Step 2 misses q^N = 15? No: 15 is even... use step 4: neither 15 nor 18
  // is a multiple of 4.
  OligopolyModel m(4, Demand::linear(90.0, 1.0), Cost(0.5, 2.0),
                   QuantityGrid(4.0, 22));
  CHECK_THROWS_AS(compute_benchmarks(m), std::runtime_error);
}

TEST_CASE("deviation advantage Delta") {
  OligopolyModel m = make_example3();
  // Delta(q, q) = 0 identically.
  for (double q : {0.0, 15.0, 18.0, 55.0}) CHECK(m.delta(q, q) == 0.0);
  // Hand value: Delta(55, 0) = p(165)(0-55) + c(55) - c(0) = 0 + 1512.5.
  CHECK(m.delta(55.0, 0.0) == doctest::Approx(1512.5));
  CHECK(m.delta(55.0, 0.0) > 0.0);
}

TEST_CASE("advantage-set boundaries h, ell, m") {
  OligopolyModel m = make_example3();
  CHECK(std::abs(h_of(m, 15.0) - 25.0) < 1e-8);
  CHECK(std::abs(ell_of(m, 25.0) - 5.0 / 3.0) < 1e-8);
  CHECK(std::abs(h_of(m, 2.0) - 166.0 / 3.0) < 1e-8);
  CHECK(std::abs(h_of(m, 0.0) - 60.0) < 1e-8);
  CHECK(m_of(m, 25.0) == 0.0);
  CHECK(std::abs(m_of(m, 19.0) - 14.0) < 1e-8);
  // m is a lower bound for the advantage region boundary.
  CHECK(ell_of(m, 19.0) >= m_of(m, 19.0));
  CHECK_THROWS_AS(h_of(m, 18.0), std::domain_error);
  CHECK_THROWS_AS(ell_of(m, 18.0), std::domain_error);
}

TEST_CASE("advantage set sign structure on the grid") {
  OligopolyModel m = make_example3();
  for (double q : {0.0, 2.0, 15.0, 18.0, 19.0, 25.0, 55.0}) {
    AdvantageSet adv = advantage_set(m, q);
    for (int i = 0; i <= m.grid().levels; ++i) {
      double x = m.grid().value(i);
      bool inside = x >= adv.lo - 1e-9 && x <= adv.hi + 1e-9;
      bool listed = std::find(adv.grid_indices.begin(), adv.grid_indices.end(),
                              i) != adv.grid_indices.end();
      CHECK(listed == inside);
      if (listed) CHECK(m.delta(q, x) >= -1e-9);
    }
  }
  // D(q^W) is a singleton; D(15) = [15, 25] has 11 grid points.
  CHECK(advantage_set(m, 18.0).singleton);
  CHECK(advantage_set(m, 15.0).grid_indices.size() == 11);
}

TEST_CASE("descent sequences on the four-firm instance") {
  OligopolyModel m = make_example3();
  DescentSequences seq = descent_sequences(m);
  REQUIRE(seq.terminated);
  REQUIRE(seq.a.size() == 3);
  CHECK(std::abs(seq.a[0] - 15.0) < 1e-9);
  CHECK(std::abs(seq.a[1] - 5.0 / 3.0) < 1e-8);
  CHECK(std::abs(seq.a[2] - 0.0) < 1e-8);
  CHECK(std::abs(seq.b[0] - 25.0) < 1e-8);
  // h(5/3) = 505/9, the larger root of 27x^2 - 1560x + 2525 (hand-derived).
  CHECK(std::abs(seq.b[1] - 505.0 / 9.0) < 1e-8);
  CHECK(std::abs(seq.b[2] - 60.0) < 1e-8);
}

TEST_CASE("long-run quantity bounds") {
  LreBounds b3 = lre_bounds(make_example3());
  CHECK(std::abs(b3.lower - 0.0) < 1e-8);
  CHECK(std::abs(b3.upper - 60.0) < 1e-8);
  CHECK(b3.grid_fine);

  // n = 2: (q^N, h(q^N)) = (22.5, 37.5); h from the quadratic
  // x^2 - 60x + 843.75 = 0 (hand-derived).
  LreBounds b2 = lre_bounds(make_duopoly());
  CHECK(std::abs(b2.lower - 22.5) < 1e-8);
  CHECK(std::abs(b2.upper - 37.5) < 1e-8);
}

TEST_CASE("strategic substitutes holds for linear demand + convex cost") {
  CHECK(verify_strategic_substitutes(make_example3()).pass);
  CHECK(verify_strategic_substitutes(make_toy2()).pass);
}

TEST_CASE("decimal and rational serialization") {
  CHECK(dec_string(15.0) == "15");
  CHECK(dec_string(1.5) == "1.5");
  CHECK(rational_string(166.0 / 3.0).value() == "166/3");
  CHECK(rational_string(5.0 / 3.0).value() == "5/3");
  CHECK(rational_string(22.5).value() == "45/2");
  CHECK(!rational_string(0.1234567891234).has_value());
}
