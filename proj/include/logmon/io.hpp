// JSON input documents for monoids, series, connections and exponent sets.
// Every malformed document raises ErrorKind::ParseError.
#pragma once

#include <string>

#include <json.hpp>

#include "logmon/connection.hpp"
#include "logmon/monoid.hpp"
#include "logmon/series.hpp"

namespace logmon {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

Json load_json_file(const std::string& path);
Json parse_json_text(const std::string& text);

// Integer, or a string "a" / "a/b".
Q parse_rational(const Json& j);
QVector parse_qvector(const Json& j);
QMatrix parse_qmatrix(const Json& j);

// {"generators": n, "relations": [[u, v], ...]} or
// {"embedded_generators": [[...]], "free_rank": k, "torsion": [d, ...]},
// both with optional "weights".
FineMonoid parse_monoid(const Json& j);

// Ambient coordinates [..], {"free": [..], "torsion": [..]} or {"gens": [multiplicities]}.
Element parse_element(const FineMonoid& m, const Json& j);

// {"terms": [{"m": element, "c": rational}], "truncation": T, "kind": "disk"|"annulus"}
TruncatedSeries parse_series(const FineMonoid& m, const Json& j, std::int64_t default_truncation);

IntervalKind parse_interval(const std::string& s);

// {"monoid": ..., "embedding": [[rat]] (optional; facet embedding otherwise), "rank": n,
//  "matrices": [{"i": 1-based, "terms": [{"m": element, "entries": [[rat]]}]}],
//  "truncation": T, "interval": "disk"|"annulus"|"point", "base": [[[rat]]]}
LogNablaModule parse_connection(const Json& j, std::int64_t default_truncation);

// {"elements": [[rat, ...]]} in free ambient coordinates.
ExponentSet parse_sigma(const Json& j, std::size_t free_rank);

// Face from a list of 0-based generator indices.
Face parse_face(const FineMonoid& m, const Json& j);

}  // namespace logmon
