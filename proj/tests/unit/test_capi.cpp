#include <doctest.h>

#include <string>

#include <json.hpp>

#include "logmon/logmon.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  lm_string_free(s);
  return out;
}

const char* kEven = R"({"embedded_generators": [[2,0],[1,1],[0,2]], "free_rank": 2})";
const char* kCounterexample = R"({
  "monoid": {"embedded_generators": [[2,0],[1,1],[0,2]], "free_rank": 2},
  "embedding": [[1,0],[0,1]], "rank": 1, "interval": "annulus",
  "matrices": [{"i": 1, "terms": [{"m": [0,0], "entries": [[1]]}]},
               {"i": 2, "terms": [{"m": [0,0], "entries": [[0]]}]}]})";

}  // namespace

TEST_CASE("version string") { CHECK(std::string(lm_version()).size() > 0); }

TEST_CASE("config setters validate input") {
  lm_config* cfg = lm_config_create();
  REQUIRE(cfg);
  CHECK(lm_config_set_prime(cfg, 7) == LM_OK);
  CHECK(lm_config_set_prime(cfg, 8) == LM_INVALID_ARGUMENT);
  CHECK(std::string(lm_last_error()).size() > 0);
  CHECK(lm_config_set_truncation(cfg, 0) == LM_INVALID_ARGUMENT);
  CHECK(lm_config_set_weight_bound(cfg, 6) == LM_OK);
  CHECK(lm_config_set_format(cfg, LM_FORMAT_TEXT) == LM_OK);
  CHECK(lm_config_set_parallel(nullptr, 1) == LM_INVALID_ARGUMENT);
  lm_config_destroy(cfg);
}

TEST_CASE("monoid analysis through the C interface") {
  lm_monoid* m = nullptr;
  REQUIRE(lm_monoid_parse(kEven, &m) == LM_OK);
  char* rep = nullptr;
  REQUIRE(lm_monoid_analyze(m, nullptr, &rep) == LM_OK);
  auto j = nlohmann::json::parse(take(rep));
  CHECK(j["face_count"] == 4);
  CHECK(j["semi_saturated"] == true);
  lm_monoid_destroy(m);
}

TEST_CASE("parse errors map to their status") {
  lm_monoid* m = nullptr;
  CHECK(lm_monoid_parse("{", &m) == LM_PARSE_ERROR);
  CHECK(m == nullptr);
  CHECK(lm_monoid_load("/nonexistent/monoid.json", &m) == LM_PARSE_ERROR);
  CHECK(lm_monoid_parse(nullptr, &m) == LM_INVALID_ARGUMENT);
}

TEST_CASE("unipotence verdicts through the C interface") {
  lm_connection* c = nullptr;
  REQUIRE(lm_connection_parse(kCounterexample, nullptr, &c) == LM_OK);
  char* rep = nullptr;
  REQUIRE(lm_connection_run(c, nullptr, "unipotent", R"({"all_faces": true})", &rep) == LM_OK);
  auto j = nlohmann::json::parse(take(rep));
  CHECK(j["verdict"] == false);
  CHECK(lm_connection_run(c, nullptr, "nonsense", nullptr, &rep) == LM_INVALID_ARGUMENT);
  CHECK(lm_connection_run(c, nullptr, "shear", "[1]", &rep) == LM_PARSE_ERROR);
  lm_connection_destroy(c);
}

TEST_CASE("hypothesis violations map to their status") {
  lm_connection* c = nullptr;
  const char* doc = R"({"monoid": {"embedded_generators": [[1]], "free_rank": 1}, "rank": 2,
    "matrices": [{"i": 1, "terms": [{"m": [0], "entries": [[0,1],[2,0]]}]}]})";
  REQUIRE(lm_connection_parse(doc, nullptr, &c) == LM_OK);
  char* rep = nullptr;
  CHECK(lm_connection_run(c, nullptr, "exponents", nullptr, &rep) == LM_HYPOTHESIS_VIOLATED);
  lm_connection_destroy(c);
}

TEST_CASE("self-test passes and detects an injected fault") {
  lm_config* cfg = lm_config_create();
  char* rep = nullptr;
  CHECK(lm_selftest(cfg, 0, &rep) == LM_OK);
  lm_string_free(rep);
  rep = nullptr;
  CHECK(lm_selftest(cfg, 1, &rep) == LM_SELFTEST_FAILED);
  lm_string_free(rep);
  lm_config_destroy(cfg);
}
