// Naive reference implementations: breadth-first enumeration and full linear
// solves, used to cross-check the main algorithms on small inputs.
#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "logmon/connection.hpp"
#include "logmon/monoid.hpp"

namespace logmon::oracle {

struct EnumerationBudget {
  std::int64_t weight_bound = 10;
  std::size_t element_cap = 200000;
};

// Every element of weight at most the bound, sorted by (weight, coordinates).
std::vector<Element> enumerate_monoid(const FineMonoid& m, const EnumerationBudget& b);

// Decided inside the enumerated ball; BudgetExceeded when g is heavier than the bound.
bool brute_contains(const FineMonoid& m, const Element& g, const EnumerationBudget& b);

// Element sets (restricted to the ball) of every generator subset that passes the face axiom on the ball.
std::vector<std::set<Element>> brute_faces(const FineMonoid& m, const EnumerationBudget& b);
// Ball of the submonoid generated by a face, for comparison with brute_faces.
std::set<Element> face_ball(const FineMonoid& m, const Face& f, const EnumerationBudget& b);

// min h(y) over y in M with y - x in M, searched inside the ball.
std::int64_t brute_h_plus(const FineMonoid& m, const Element& x, const EnumerationBudget& b);

// Gauge terms up to weight k from one linear system over all coordinates at once.
MatSeries brute_shear_order(const LogNablaModule& e, std::int64_t k);

}  // namespace logmon::oracle
