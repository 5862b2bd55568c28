#pragma once

#include "cournotlre/oligopoly.hpp"

// Shared model fixtures.
//
// example3: n=4, p(Q) = max{90 - Q, 0}, c(q) = q^2/2, grid {0, 1, ..., 90}.
//   Benchmarks q^N = 15, q^W = 18, q^C = 10.
// duopoly:  n=2, same demand/cost, grid {0, 7.5, ..., 90}.
//   Benchmarks q^N = 22.5, q^W = 30; h(q^N) = 37.5 (root of
//   -1.5 x^2 + 90 x - 1265.625, hand-derived).
// toy2:     duopoly on the short grid {0, 7.5, ..., 45} (7 points).
inline cournot::OligopolyModel make_example3() {
  return cournot::OligopolyModel(4, cournot::Demand::linear(90.0, 1.0),
                                 cournot::Cost(0.5, 2.0),
                                 cournot::QuantityGrid(1.0, 90));
}

inline cournot::OligopolyModel make_duopoly() {
  return cournot::OligopolyModel(2, cournot::Demand::linear(90.0, 1.0),
                                 cournot::Cost(0.5, 2.0),
                                 cournot::QuantityGrid(7.5, 12));
}

inline cournot::OligopolyModel make_toy2() {
  return cournot::OligopolyModel(2, cournot::Demand::linear(90.0, 1.0),
                                 cournot::Cost(0.5, 2.0),
                                 cournot::QuantityGrid(7.5, 6));
}
