#include <doctest.h>

#include "logmon/io.hpp"

using namespace logmon;

TEST_CASE("rationals parse from integers and strings") {
  CHECK(parse_rational(Json(3)) == 3);
  CHECK(parse_rational(Json("-4/6")) == Q(-2, 3));
  CHECK_THROWS_AS(parse_rational(Json("x")), Error);
  CHECK_THROWS_AS(parse_rational(Json("1/0")), Error);
}

TEST_CASE("monoid documents") {
  FineMonoid a = parse_monoid(parse_json_text(R"({"generators": 2, "relations": [[[2,0],[0,2]]]})"));
  CHECK(a.gp().torsion_invariants.size() == 1);
  FineMonoid b = parse_monoid(
      parse_json_text(R"({"embedded_generators": [[2,0],[1,1],[0,2]], "free_rank": 2, "weights": [2,2,2]})"));
  CHECK(b.size() == 3);
  CHECK(b.weights() == std::vector<std::int64_t>{2, 2, 2});
  CHECK_THROWS_AS(parse_monoid(parse_json_text(R"({"generators": "two"})")), Error);
  CHECK_THROWS_AS(parse_json_text("{not json"), Error);
}

TEST_CASE("connection documents") {
  auto j = parse_json_text(R"({
    "monoid": {"embedded_generators": [[1]], "free_rank": 1},
    "embedding": [[1]], "rank": 2, "truncation": 6,
    "matrices": [{"i": 1, "terms": [
      {"m": [0], "entries": [[0,0],[0,"1/2"]]},
      {"m": [1], "entries": [[0,1],[0,0]]}]}]})");
  LogNablaModule e = parse_connection(j, 12);
  CHECK(e.truncation == 6);
  CHECK(e.rank == 2);
  CHECK(residue(e)[0](1, 1) == Q(1, 2));
  CHECK(e.interval == IntervalKind::Disk);
  j["matrices"][0]["i"] = 3;
  CHECK_THROWS_AS(parse_connection(j, 12), Error);
}

TEST_CASE("elements, series, exponent sets and faces") {
  FineMonoid m = parse_monoid(parse_json_text(R"({"embedded_generators": [[2,0],[1,1],[0,2]], "free_rank": 2})"));
  CHECK(parse_element(m, parse_json_text(R"({"gens": [1, 1, 0]})")) == Element{3, 1});
  CHECK(parse_element(m, parse_json_text("[4,0]")) == Element{4, 0});
  auto f = parse_series(m, parse_json_text(R"({"terms": [{"m": [2,0], "c": "1/3"}], "truncation": 4})"), 8);
  CHECK(f.coefficient({2, 0}) == Q(1, 3));
  auto s = parse_sigma(parse_json_text(R"({"elements": [[0,0],["1/2",0]]})"), 2);
  CHECK(s.elements.size() == 2);
  CHECK(parse_face(m, parse_json_text("[2]")).generators == std::vector<std::size_t>{2});
  CHECK_THROWS_AS(parse_face(m, parse_json_text("[0, 2]")), Error);
  CHECK(parse_interval("annulus") == IntervalKind::Annulus);
  CHECK_THROWS_AS(parse_interval("ring"), Error);
}
