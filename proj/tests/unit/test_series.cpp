#include <doctest.h>

#include "logmon/fixtures.hpp"
#include "logmon/oracle.hpp"
#include "logmon/series.hpp"

using namespace logmon;
namespace fx = logmon::fixtures;

TEST_CASE("default weightings") {
  CHECK(default_weighting(fx::nat2()) == std::vector<std::int64_t>{1, 1});
  CHECK(default_weighting(fx::even_pairs()) == std::vector<std::int64_t>{2, 2, 2});
  FineMonoid z = FineMonoid::from_generators({1, {}}, {{1}, {-1}});
  CHECK(default_weighting(z) == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("h+ and h- values") {
  CHECK(h_plus(fx::nat2(), {1, -1}) == 1);
  CHECK(h_minus(fx::nat2(), {1, -1}) == 1);
  CHECK(h_abs(fx::nat2(), {1, -1}) == 2);
  CHECK(h_plus(fx::even_pairs(), {2, -2}) == 2);
  CHECK(h_minus(fx::even_pairs(), {2, -2}) == 2);
  FineMonoid m = fx::even_pairs();
  CHECK(h_plus(m, {3, 1}) == m.weight({3, 1}));
  CHECK(h_minus(m, {3, 1}) == 0);
}

TEST_CASE("h+ agrees with the brute-force search") {
  CHECK(oracle::brute_h_plus(fx::nat2(), {1, -1}, {8, 10000}) == 1);
  for (const auto& nm : fx::monoid_grid()) {
    HCalculator hc(nm.monoid);
    auto ball = oracle::enumerate_monoid(nm.monoid, {3, 10000});
    for (const auto& y : ball)
      for (const auto& z : ball) {
        Element d = nm.monoid.ambient().sub(y, z);
        CHECK_MESSAGE(hc.h_plus(d) == oracle::brute_h_plus(nm.monoid, d, {12, 100000}), nm.name);
      }
  }
}

TEST_CASE("series arithmetic") {
  FineMonoid n = fx::nat();
  auto one = TruncatedSeries::constant(n, SeriesKind::Disk, 6, 1);
  auto t = TruncatedSeries::monomial(n, SeriesKind::Disk, 6, {1});
  auto f = series_sub(one, t);
  auto inv = series_invert(f);
  for (int k = 0; k <= 6; ++k) CHECK(inv.coefficient({k}) == 1);
  auto prod = series_mul(f, inv);
  CHECK(series_equal(prod, one));
  CHECK(series_add(t, series_scale(-1, t)).is_zero());
}

TEST_CASE("inversion needs an invertible constant term") {
  auto t = TruncatedSeries::monomial(fx::nat(), SeriesKind::Disk, 6, {1});
  CHECK_THROWS_AS(series_invert(t), Error);
}

TEST_CASE("truncation drops heavy terms") {
  auto f = TruncatedSeries::from_terms(fx::nat(), SeriesKind::Disk, 3, {{{2}, 1}, {{5}, 1}});
  CHECK(f.terms().size() == 1);
}

TEST_CASE("gauss norms") {
  const unsigned long p = 5;
  FineMonoid n = fx::nat();
  // p t + t^2 at radius 1/p: both terms have absolute value p^{-2}.
  auto f = TruncatedSeries::from_terms(n, SeriesKind::Disk, 8, {{{1}, Q(5)}, {{2}, 1}});
  auto v = gauss_norm(f, ExtQ::of(1), p);
  CHECK(v.valuation == ExtQ::of(2));
  auto c = TruncatedSeries::constant(n, SeriesKind::Disk, 8, Q(1, 25));
  for (int q = 0; q < 4; ++q) CHECK(gauss_norm(c, ExtQ::of(q), p).valuation == ExtQ::of(-2));
  CHECK(gauss_norm(TruncatedSeries(n, SeriesKind::Disk, 8), ExtQ::of(0), p).valuation.infinite);
}

TEST_CASE("log-convexity of the gauss norm") {
  for (const auto& f : fx::random_series(7u, 10, 3))
    for (const Q& c : {Q(1, 4), Q(1, 2), Q(3, 4)}) CHECK(log_convex_at(f, 0, 2, c, 3));
}

TEST_CASE("polyannulus membership") {
  FineMonoid n = fx::nat();
  auto x = point_from_functional(n, {Q(1, 2)});
  CHECK(point_in_polyannulus(n, x, ExtQ::of(Q(1, 2)), ExtQ::of(0)));
  CHECK_FALSE(point_in_polyannulus(n, x, ExtQ::of(1), ExtQ::of(1)));
  CHECK(is_consistent(n, vertex_point(n)));
}

TEST_CASE("saturation invariance on saturated monoids") {
  FineMonoid m = fx::even_pairs();
  std::vector<ValuationPoint> pts{point_from_functional(m, {Q(1, 3), Q(1, 5)}), vertex_point(m)};
  CHECK(saturation_invariance_check(m, ExtQ::of(1), ExtQ::of(0), pts, 8).ok);
}
