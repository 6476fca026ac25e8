#include <doctest.h>

#include <algorithm>

#include "logmon/fixtures.hpp"
#include "logmon/monoid.hpp"
#include "logmon/oracle.hpp"

using namespace logmon;
namespace fx = logmon::fixtures;

TEST_CASE("presentation of the free monoid of rank one") {
  FineMonoid m = FineMonoid::from_presentation(1, {});
  CHECK(m.gp().free_rank == 1);
  CHECK(m.gp().torsion_free());
  CHECK(m.is_sharp());
}

TEST_CASE("presentation 2e1 = 2e2 has torsion group Z + Z/2") {
  FineMonoid m = fx::torsion_pair();
  CHECK(m.gp().free_rank == 1);
  REQUIRE(m.gp().torsion_invariants.size() == 1);
  CHECK(m.gp().torsion_invariants[0] == 2);
  CHECK(m.is_sharp());
  CHECK(m.generators()[0] != m.generators()[1]);
}

TEST_CASE("presentation e1 + e3 = 2 e2 gives the even-sum monoid") {
  FineMonoid m = FineMonoid::from_presentation(3, {{{1, 0, 1}, {0, 2, 0}}});
  CHECK(m.gp().free_rank == 2);
  CHECK(m.gp().torsion_free());
  CHECK(faces(m).size() == 4);
  CHECK(is_semi_saturated(m));
}

TEST_CASE("membership in N minus one") {
  FineMonoid m = fx::nat_minus_one();
  CHECK_FALSE(membership(m, {1}));
  CHECK(membership(m, {7}));
  CHECK(membership(m, {0}));
  CHECK_FALSE(membership(m, {-2}));
}

TEST_CASE("divisibility") {
  CHECK(divides(fx::nat2(), {1, 0}, {2, 3}));
  CHECK_FALSE(divides(fx::even_pairs(), {1, 1}, {2, 0}));
  CHECK(divides(fx::even_pairs(), {1, 1}, {1, 1}));
}

TEST_CASE("units and sharp quotients") {
  CHECK(units(fx::nat2()).empty());
  FineMonoid loc = localize(fx::nat2(), Face{{0}});
  CHECK_FALSE(loc.is_sharp());
  auto [q, proj] = sharp_quotient(loc);
  CHECK(q.is_sharp());
  CHECK(q.gp().free_rank == 1);
  FineMonoid z = FineMonoid::from_generators({1, {}}, {{1}, {-1}});
  auto [zq, zp] = sharp_quotient(z);
  CHECK(zq.gp().free_rank == 0);
  CHECK(zq.gp().torsion_free());
}

TEST_CASE("face lattice sizes") {
  CHECK(faces(fx::nat2()).size() == 4);
  CHECK(faces(fx::even_pairs()).size() == 4);
  CHECK(facets(fx::even_pairs()).size() == 2);
  CHECK(faces(fx::nat_minus_one()).size() == 2);
  CHECK(faces(fx::nat3()).size() == 8);
  CHECK(faces(fx::cone3()).size() == 4);
}

TEST_CASE("quotient of the even-sum monoid by the face of (0,2)") {
  FineMonoid m = fx::even_pairs();
  auto [q, proj] = quotient(m, {{0, 2}});
  CHECK(q.gp().free_rank == 1);
  CHECK(q.gp().torsion_free());
  // (2,0) maps to twice the image of (1,1).
  Element a = proj.apply({2, 0}), b = proj.apply({1, 1});
  CHECK(a == q.ambient().scale(2, b));
  auto [whole, p2] = quotient(m, m.generators());
  CHECK(whole.gp().free_rank == 0);
}

TEST_CASE("localization at the trivial face is the identity") {
  FineMonoid m = fx::even_pairs();
  FineMonoid l = localize(m, Face{});
  CHECK(l.is_sharp());
  CHECK(faces(l).size() == 4);
  FineMonoid l2 = localize(m, Face{{0}});
  CHECK_FALSE(l2.is_sharp());
  CHECK(sharp_quotient(l2).first.gp().free_rank == 1);
}

TEST_CASE("semi-saturation") {
  CHECK(is_semi_saturated(fx::nat()));
  CHECK(is_semi_saturated(fx::nat_minus_one()));
  CHECK(is_semi_saturated(fx::even_pairs()));
  CHECK_FALSE(is_semi_saturated(fx::torsion_pair()));
}

TEST_CASE("bounded saturation") {
  auto r = saturation_bounded(fx::nat_minus_one(), 10);
  CHECK(r.complete);
  CHECK(membership(r.saturation, {1}));
  REQUIRE_FALSE(r.witnesses.empty());
  CHECK(r.witnesses.front().g == Element{1});
  CHECK(r.witnesses.front().n == 2);
  CHECK(is_saturated_bounded(fx::nat_minus_one(), 10) == Tri::False);
  CHECK(is_saturated_bounded(fx::nat2(), 4) == Tri::True);
  CHECK(is_saturated_bounded(fx::even_pairs(), 10) == Tri::True);
}

TEST_CASE("sections of surjections") {
  SectionData d = section(MonoidHom(fx::nat2(), fx::nat(), {{1}, {1}}));
  CHECK(d.checks.all());
  CHECK(d.kernel.free_rank == 1);
  Element s1 = d.section.images()[0];
  CHECK(d.hom.apply(s1) == Element{1});

  SectionData id = section(MonoidHom(fx::nat(), fx::nat(), {{1}}));
  CHECK(id.checks.all());
  CHECK(id.kernel.free_rank == 0);

  SectionData ev = section(MonoidHom(fx::nat3(), fx::even_pairs(), {{2, 0}, {1, 1}, {0, 2}}));
  CHECK(ev.checks.all());
  CHECK(ev.checks.sharp_identity_applicable);
  CHECK(ev.kernel.free_rank == 1);

  for (const auto& s : fx::surjections()) CHECK_MESSAGE(section(s.hom).checks.all(), s.name);
}

TEST_CASE("verticality") {
  CHECK(is_vertical(MonoidHom(fx::nat(), fx::nat2(), {{1, 1}}), 6) == Tri::True);
  FineMonoid zero = FineMonoid::from_generators({0, {}}, {});
  CHECK(is_vertical(MonoidHom(zero, fx::nat(), {}), 6) == Tri::False);
  CHECK(is_vertical(MonoidHom(fx::nat2(), fx::nat2(), {{1, 0}, {0, 1}}), 6) == Tri::True);
}

TEST_CASE("non-surjective maps are rejected by section") {
  CHECK_THROWS_AS(section(MonoidHom(fx::nat(), fx::nat2(), {{1, 1}})), Error);
}

TEST_CASE("enumeration matches frozen balls") {
  using oracle::enumerate_monoid;
  auto a = enumerate_monoid(fx::nat_minus_one().with_weighting({2, 3}), {6, 1000});
  CHECK(a == std::vector<Element>{{0}, {2}, {3}, {4}, {5}, {6}});
  auto b = enumerate_monoid(fx::nat2(), {2, 1000});
  CHECK(b.size() == 6);
  auto c = enumerate_monoid(fx::even_pairs().with_weighting({2, 2, 2}), {4, 1000});
  CHECK(c.size() == 9);
  for (const auto& x : c) CHECK((x[0] + x[1]) % 2 == 0);
}

TEST_CASE("fast membership agrees with enumeration on the grid") {
  for (const auto& nm : fx::monoid_grid()) {
    auto ball = oracle::enumerate_monoid(nm.monoid, {8, 100000});
    Explorer ex(nm.monoid);
    for (const auto& x : ball) CHECK_MESSAGE(ex.contains(x), nm.name);
  }
}

TEST_CASE("brute faces census") {
  CHECK(oracle::brute_faces(fx::nat2(), {8, 10000}).size() == 4);
  CHECK(oracle::brute_faces(fx::even_pairs(), {8, 10000}).size() == 4);
  CHECK(oracle::brute_faces(fx::nat_minus_one(), {8, 10000}).size() == 2);
}

TEST_CASE("brute membership refuses elements outside the ball") {
  CHECK_THROWS_AS(oracle::brute_contains(fx::nat(), {20}, {5, 1000}), Error);
}
