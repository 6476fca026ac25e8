#include "logmon/io.hpp"

#include <fstream>
#include <sstream>

namespace logmon {

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::ParseError, msg); }

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::int64_t as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

std::vector<std::int64_t> int_list(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  std::vector<std::int64_t> out;
  for (const auto& x : j) out.push_back(as_int(x, what));
  return out;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

Q parse_rational(const Json& j) {
  if (j.is_number_integer()) return Q(Z(std::to_string(j.get<std::int64_t>())));
  if (j.is_string()) {
    try {
      return parse_q(j.get<std::string>());
    } catch (const std::exception&) {
      bad("malformed rational \"" + j.get<std::string>() + "\"");
    }
  }
  bad("rationals must be integers or strings \"a/b\"");
}

QVector parse_qvector(const Json& j) {
  if (!j.is_array()) bad("expected an array of rationals");
  QVector v;
  for (const auto& x : j) v.push_back(parse_rational(x));
  return v;
}

QMatrix parse_qmatrix(const Json& j) {
  if (!j.is_array() || j.empty()) bad("expected a non-empty array of rows");
  std::vector<QVector> rows;
  for (const auto& r : j) rows.push_back(parse_qvector(r));
  QMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) bad("matrix rows have different lengths");
    for (std::size_t k = 0; k < m.cols; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

FineMonoid parse_monoid(const Json& j) {
  if (!j.is_object()) bad("monoid document must be an object");
  std::optional<FineMonoid> m;
  try {
    if (j.contains("relations") || (j.contains("generators") && j.at("generators").is_number_integer())) {
      const std::int64_t n = as_int(need(j, "generators"), "generators");
      if (n < 0) bad("generator count must be non-negative");
      std::vector<FineMonoid::Relation> rels;
      if (j.contains("relations")) {
        for (const auto& r : j.at("relations")) {
          if (!r.is_array() || r.size() != 2) bad("each relation is a pair [u, v]");
          auto u = int_list(r[0], "relation"), v = int_list(r[1], "relation");
          if (u.size() != static_cast<std::size_t>(n) || v.size() != static_cast<std::size_t>(n))
            bad("relation vectors must have one entry per generator");
          for (auto x : u)
            if (x < 0) bad("relation vectors must be non-negative");
          for (auto x : v)
            if (x < 0) bad("relation vectors must be non-negative");
          rels.emplace_back(u, v);
        }
      }
      m = FineMonoid::from_presentation(static_cast<std::size_t>(n), rels);
    } else {
      const Json& gens = need(j, "embedded_generators");
      if (!gens.is_array() || gens.empty()) bad("embedded_generators must be a non-empty array");
      AmbientGroup amb;
      if (j.contains("torsion")) amb.torsion = int_list(j.at("torsion"), "torsion");
      for (auto t : amb.torsion)
        if (t < 2) bad("torsion orders must be at least 2");
      std::size_t len = gens[0].is_array() ? gens[0].size() : 0;
      amb.free_rank = j.contains("free_rank") ? static_cast<std::size_t>(as_int(j.at("free_rank"), "free_rank"))
                                              : len - amb.torsion.size();
      std::vector<Element> g;
      for (const auto& x : gens) {
        auto e = int_list(x, "generator");
        if (e.size() != amb.dim()) bad("generator has wrong length");
        g.push_back(amb.reduce(e));
      }
      m = FineMonoid::from_generators(amb, g);
    }
    if (j.contains("weights")) m = m->with_weighting(int_list(j.at("weights"), "weights"));
  } catch (const Json::exception& e) {
    bad(std::string("malformed monoid document: ") + e.what());
  }
  return *m;
}

Element parse_element(const FineMonoid& m, const Json& j) {
  const AmbientGroup& amb = m.ambient();
  if (j.is_array()) {
    auto e = int_list(j, "element");
    if (e.size() == amb.free_rank && amb.dim() != amb.free_rank) e.resize(amb.dim(), 0);
    if (e.size() != amb.dim()) bad("element has wrong length");
    return amb.reduce(e);
  }
  if (j.is_object() && j.contains("gens")) {
    auto c = int_list(j.at("gens"), "gens");
    if (c.size() != m.size()) bad("gens needs one multiplicity per generator");
    Element x = amb.zero();
    for (std::size_t i = 0; i < c.size(); ++i) x = amb.add(x, amb.scale(c[i], m.generators()[i]));
    return x;
  }
  if (j.is_object() && j.contains("free")) {
    auto f = int_list(j.at("free"), "free");
    std::vector<std::int64_t> t = j.contains("torsion") ? int_list(j.at("torsion"), "torsion")
                                                        : std::vector<std::int64_t>(amb.torsion.size(), 0);
    if (f.size() != amb.free_rank || t.size() != amb.torsion.size()) bad("element has wrong length");
    f.insert(f.end(), t.begin(), t.end());
    return amb.reduce(f);
  }
  bad("unrecognised element");
}

TruncatedSeries parse_series(const FineMonoid& m, const Json& j, std::int64_t default_truncation) {
  const std::int64_t t = j.contains("truncation") ? as_int(j.at("truncation"), "truncation") : default_truncation;
  SeriesKind kind = SeriesKind::Disk;
  if (j.contains("kind")) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "annulus")
      kind = SeriesKind::Annulus;
    else if (k != "disk")
      bad("series kind must be disk or annulus");
  }
  TruncatedSeries s(m, kind, t);
  HCalculator hc(m);
  for (const auto& term : need(j, "terms")) s.add_term(hc, parse_element(m, need(term, "m")), parse_rational(need(term, "c")));
  return s;
}

IntervalKind parse_interval(const std::string& s) {
  if (s == "disk") return IntervalKind::Disk;
  if (s == "annulus") return IntervalKind::Annulus;
  if (s == "point") return IntervalKind::Point;
  bad("interval must be disk, annulus or point");
}

LogNablaModule parse_connection(const Json& j, std::int64_t default_truncation) {
  if (!j.is_object()) bad("connection document must be an object");
  try {
    FineMonoid m = parse_monoid(need(j, "monoid"));
    Embedding emb = j.contains("embedding") ? Embedding{parse_qmatrix(j.at("embedding"))} : facet_embedding(m);
    const std::int64_t n = as_int(need(j, "rank"), "rank");
    if (n <= 0) bad("rank must be positive");
    const std::int64_t t = j.contains("truncation") ? as_int(j.at("truncation"), "truncation") : default_truncation;
    std::vector<MatSeries> a(emb.r());
    for (const auto& mat : need(j, "matrices")) {
      const std::int64_t i = as_int(need(mat, "i"), "i");
      if (i < 1 || static_cast<std::size_t>(i) > emb.r()) bad("matrix index out of range (indices are 1-based)");
      for (const auto& term : need(mat, "terms")) {
        Element x = parse_element(m, need(term, "m"));
        QMatrix q = parse_qmatrix(need(term, "entries"));
        auto& slot = a[static_cast<std::size_t>(i - 1)];
        auto it = slot.find(x);
        if (it == slot.end())
          slot.emplace(x, q);
        else
          it->second = it->second + q;
      }
    }
    IntervalKind ik = j.contains("interval") ? parse_interval(j.at("interval").get<std::string>()) : IntervalKind::Disk;
    std::vector<QMatrix> base;
    if (j.contains("base"))
      for (const auto& d : j.at("base")) base.push_back(parse_qmatrix(d));
    return LogNablaModule::make(m, emb, static_cast<std::size_t>(n), t, a, ik, base);
  } catch (const Json::exception& e) {
    bad(std::string("malformed connection document: ") + e.what());
  }
}

ExponentSet parse_sigma(const Json& j, std::size_t free_rank) {
  ExponentSet s;
  for (const auto& x : need(j, "elements")) {
    QVector v = parse_qvector(x);
    if (v.size() != free_rank) bad("exponent has wrong length");
    s.elements.push_back(v);
  }
  return s;
}

Face parse_face(const FineMonoid& m, const Json& j) {
  auto idx = int_list(j, "face");
  std::vector<std::size_t> gens;
  for (auto i : idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= m.size()) bad("face generator index out of range");
    gens.push_back(static_cast<std::size_t>(i));
  }
  std::sort(gens.begin(), gens.end());
  for (const auto& f : faces(m))
    if (f.generators == gens) return f;
  fail(ErrorKind::InvalidArgument, "the given generators do not form a face");
}

}  // namespace logmon
