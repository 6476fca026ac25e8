#include "report.hpp"

#include <sstream>

namespace logmon::report {

OrderedJson to_json(const Q& x) { return to_string(x); }
OrderedJson to_json(const ExtQ& x) { return to_string(x); }
OrderedJson to_json(const Element& x) {
  OrderedJson a = OrderedJson::array();
  for (auto v : x) a.push_back(v);
  return a;
}
OrderedJson to_json(const QVector& v) {
  OrderedJson a = OrderedJson::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}
OrderedJson to_json(const QMatrix& m) {
  OrderedJson a = OrderedJson::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(to_string(m(i, j)));
    a.push_back(row);
  }
  return a;
}

namespace {

OrderedJson indices(const std::vector<std::size_t>& v) {
  OrderedJson a = OrderedJson::array();
  for (auto x : v) a.push_back(x);
  return a;
}

OrderedJson face_json(const FineMonoid& m, const Face& f) {
  OrderedJson o;
  o["generators"] = indices(f.generators);
  OrderedJson els = OrderedJson::array();
  for (const auto& g : face_generators(m, f)) els.push_back(to_json(g));
  o["elements"] = els;
  return o;
}

OrderedJson group_json(const AbelianGroup& g) {
  OrderedJson o;
  o["free_rank"] = g.free_rank;
  o["torsion"] = g.torsion_invariants;
  return o;
}

OrderedJson exponents_json(const ExponentData& d) {
  OrderedJson a = OrderedJson::array();
  for (const auto& b : d.blocks) {
    OrderedJson o;
    o["xi"] = to_json(b.xi);
    o["phi_values"] = to_json(b.phi_values);
    o["multiplicity"] = b.multiplicity;
    a.push_back(o);
  }
  return a;
}

std::vector<Forms> homotopy_forms(const FineMonoid& m, std::size_t r, std::int64_t weight, bool both_signs) {
  Explorer ex(m);
  std::vector<Forms> tests;
  long k = 1;
  for (const auto& x : ex.elements_up_to(weight)) {
    std::vector<Element> xs{x};
    if (both_signs && x != m.ambient().zero()) xs.push_back(m.ambient().neg(x));
    for (const auto& y : xs)
      for (std::uint32_t mask = 0; mask < (1u << r); ++mask, ++k)
        tests.push_back(Forms{{{y, mask}, Q(k % 5 + 1, static_cast<long>(mask) + 1)}});
  }
  return tests;
}

ExponentSet sigma_from(const FineMonoid& m, const Json& options) {
  if (options.contains("sigma")) return parse_sigma(options.at("sigma"), m.ambient().free_rank);
  return ExponentSet{{QVector(m.ambient().free_rank, Q(0))}};
}

Q rational_option(const Json& options, const char* key, const Q& fallback) {
  return options.contains(key) ? parse_rational(options.at(key)) : fallback;
}

std::int64_t int_option(const Json& options, const char* key, std::int64_t fallback) {
  if (!options.contains(key)) return fallback;
  if (!options.at(key).is_number_integer()) fail(ErrorKind::ParseError, std::string(key) + " must be an integer");
  return options.at(key).get<std::int64_t>();
}

}  // namespace

OrderedJson monoid_report(const FineMonoid& m, const Config& cfg) {
  OrderedJson o;
  o["group"] = group_json(m.gp());
  OrderedJson gens = OrderedJson::array();
  for (const auto& g : m.generators()) gens.push_back(to_json(g));
  o["generators"] = gens;
  o["weights"] = m.weights();
  o["sharp"] = m.is_sharp();
  OrderedJson us = OrderedJson::array();
  for (const auto& u : units(m)) us.push_back(to_json(u));
  o["unit_generators"] = us;
  o["sharp_quotient_group"] = group_json(sharp_quotient(m).first.gp());
  OrderedJson fs = OrderedJson::array(), fcs = OrderedJson::array();
  auto all = faces(m);
  for (const auto& f : all) fs.push_back(face_json(m, f));
  for (const auto& f : facets(m)) fcs.push_back(face_json(m, f));
  o["face_count"] = all.size();
  o["faces"] = fs;
  o["facets"] = fcs;
  o["semi_saturated"] = is_semi_saturated(m);
  SaturationResult sat = saturation_bounded(m, cfg.weight_bound);
  o["saturated"] = to_string(is_saturated_bounded(m, cfg.weight_bound));
  OrderedJson ws = OrderedJson::array();
  for (const auto& w : sat.witnesses) {
    OrderedJson wj;
    wj["g"] = to_json(w.g);
    wj["n"] = w.n;
    ws.push_back(wj);
  }
  OrderedJson sj;
  sj["complete"] = sat.complete;
  sj["weight_bound"] = cfg.weight_bound;
  sj["missing_elements"] = ws;
  o["saturation"] = sj;
  return o;
}

OrderedJson connection_report(const LogNablaModule& e, const Config& cfg, const std::string& command,
                              const Json& options) {
  const FineMonoid& m = e.monoid;
  OrderedJson o;
  o["command"] = command;
  o["rank"] = e.rank;
  o["truncation"] = e.truncation;
  o["interval"] = to_string(e.interval);
  o["embedding"] = to_json(e.embedding.phi);
  ShearOptions sopt;
  sopt.parallel = cfg.parallel;
  sopt.prime = cfg.prime;

  if (command == "exponents") {
    auto integ = validate_integrability(e);
    o["integrable"] = integ.ok;
    if (!integ.ok) o["first_failure"] = integ.first_failure;
    OrderedJson res = OrderedJson::array();
    for (const auto& r : residue(e)) res.push_back(to_json(r));
    o["residues"] = res;
    ExponentData d = exponents(e);
    o["exponents"] = exponents_json(d);
    ExponentSet own;
    for (const auto& b : d.blocks) own.elements.push_back(b.xi);
    o["sd_condition"] = check_sd(m, own);
    return o;
  }
  if (command == "shear") {
    auto integ = validate_integrability(e);
    if (!integ.ok) fail(ErrorKind::NonIntegrable, "connection is not integrable: " + integ.first_failure);
    ShearResult sh = shear(e, sopt);
    OrderedJson cm = OrderedJson::array();
    for (const auto& r : sh.constant_model) cm.push_back(to_json(r));
    o["constant_model"] = cm;
    OrderedJson checks;
    checks["equations_all_coordinates"] = sh.checks.equations_all_i;
    checks["gauge_inverse"] = sh.checks.gauge_inverse;
    checks["round_trip"] = sh.checks.round_trip;
    checks["base_constant"] = sh.checks.base_constant;
    o["checks"] = checks;
    OrderedJson gauge = OrderedJson::array();
    for (const auto& x : sh.order) {
      auto it = sh.gauge.find(x);
      if (it == sh.gauge.end()) continue;
      OrderedJson t;
      t["m"] = to_json(x);
      t["weight"] = m.weight(x);
      t["B"] = to_json(it->second);
      gauge.push_back(t);
    }
    o["gauge_terms"] = gauge;
    OrderedJson b;
    b["prime"] = cfg.prime;
    b["e"] = sh.bound.e;
    b["log_c"] = to_json(sh.bound.log_c);
    b["log_C"] = to_json(sh.bound.log_C);
    b["q_a"] = to_json(sh.bound.q_a);
    OrderedJson rows = OrderedJson::array();
    for (const auto& r : sh.bound.rows) {
      OrderedJson t;
      t["m"] = to_json(r.m);
      t["weight"] = r.weight;
      t["log_norm"] = to_json(r.actual_log);
      t["log_bound"] = to_json(r.predicted_log);
      t["ok"] = r.ok;
      rows.push_back(t);
    }
    b["rows"] = rows;
    OrderedJson inv = OrderedJson::array();
    for (const auto& r : sh.bound.inverse_rows) {
      OrderedJson t;
      t["coordinate"] = r.i + 1;
      t["s"] = to_json(r.s);
      t["log_norm"] = to_json(r.actual_log);
      t["log_bound"] = to_json(r.predicted_log);
      t["ok"] = r.ok;
      inv.push_back(t);
    }
    b["inverse_rows"] = inv;
    b["ok"] = sh.bound.ok();
    o["bound"] = b;
    return o;
  }
  if (command == "unipotent") {
    ExponentSet sigma = sigma_from(m, options);
    OrderedJson sj = OrderedJson::array();
    for (const auto& s : sigma.elements) sj.push_back(to_json(s));
    o["sigma"] = sj;
    std::vector<Face> targets;
    const bool all = options.contains("all_faces") && options.at("all_faces").get<bool>();
    if (all) {
      targets = faces(m);
    } else if (options.contains("face")) {
      targets.push_back(parse_face(m, options.at("face")));
    } else {
      targets.push_back(faces(m).front());
    }
    OrderedJson rows = OrderedJson::array();
    bool every = true;
    for (const auto& f : targets) {
      UnipotenceReport r = is_sigma_unipotent(e, sigma, f, sopt);
      OrderedJson t;
      t["face"] = indices(f.generators);
      t["verdict"] = r.verdict;
      OrderedJson se = OrderedJson::array(), pe = OrderedJson::array();
      for (const auto& x : r.sheared_exponents) se.push_back(to_json(x));
      for (const auto& x : r.projected_exponents) pe.push_back(to_json(x));
      t["sheared_exponents"] = se;
      t["projected_exponents"] = pe;
      t["filtration_ranks"] = r.filtration_ranks;
      rows.push_back(t);
      every = every && r.verdict;
    }
    o["faces"] = rows;
    o["verdict"] = every;
    return o;
  }
  if (command == "dl") {
    const std::size_t target = static_cast<std::size_t>(int_option(options, "target", 0));
    const std::int64_t l = int_option(options, "l", e.truncation);
    std::vector<QMatrix> res = residue(e);
    DlSetup s = dl_setup(res, target);
    VecSeries section;
    if (options.contains("section")) {
      for (const auto& t : options.at("section")) {
        QVector v = parse_qvector(t.at("v"));
        if (v.size() != e.rank) fail(ErrorKind::ParseError, "section vector has wrong length");
        section[parse_element(m, t.at("m"))] = v;
      }
    } else {
      QVector ones(e.rank, Q(1));
      section[m.ambient().zero()] = ones;
      for (const auto& g : m.generators()) section[m.ambient().reduce(g)] = ones;
    }
    OrderedJson qs = OrderedJson::array();
    for (const auto& p : s.Q) qs.push_back(to_json(QVector(p)));
    o["target_exponent"] = to_json(s.exps.blocks[target].phi_values);
    o["q"] = s.q;
    o["l"] = l;
    o["Q_coefficients"] = qs;
    QVector lim = dl_limit(s, section, e.rank);
    o["limit"] = to_json(lim);
    o["limit_in_eigenspace"] = in_eigenspace(s, lim);
    VecSeries pr = dl_projection(m, e.embedding, s, section, l);
    OrderedJson pj = OrderedJson::array();
    for (const auto& [x, v] : pr) {
      OrderedJson t;
      t["m"] = to_json(x);
      t["v"] = to_json(v);
      pj.push_back(t);
    }
    o["projection"] = pj;
    bool zero_lim = std::all_of(lim.begin(), lim.end(), [](const Q& c) { return c == 0; });
    bool agrees = zero_lim ? pr.empty()
                           : (pr.size() == 1 && pr.begin()->first == m.ambient().zero() && pr.begin()->second == lim);
    o["projection_equals_limit"] = agrees;
    return o;
  }
  if (command == "homotopy") {
    const std::size_t k = m.ambient().free_rank;
    QVector xi = options.contains("xi") ? parse_qvector(options.at("xi")) : QVector(k, Q(0));
    QVector xp;
    if (options.contains("xi_prime")) {
      xp = parse_qvector(options.at("xi_prime"));
    } else {
      ExponentData d = exponents(e);
      xp = d.blocks.back().xi;
    }
    if (xi.size() != k || xp.size() != k) fail(ErrorKind::ParseError, "exponent has wrong length");
    auto tests = homotopy_forms(m, e.embedding.r(), std::min<std::int64_t>(cfg.weight_bound, 4),
                                e.interval == IntervalKind::Annulus);
    HomotopyReport r = homotopy_check(m, e.embedding, xi, xp, tests);
    o["xi"] = to_json(xi);
    o["xi_prime"] = to_json(xp);
    o["forms_checked"] = r.forms_checked;
    o["residual_zero"] = r.zero;
    o["nonzero_terms"] = r.nonzero_terms;
    return o;
  }
  if (command == "logconv") {
    const Q qa = rational_option(options, "qa", 0);
    const Q qeta = rational_option(options, "q_eta", Q(1, 2));
    const std::int64_t depth = int_option(options, "depth", 8);
    LogConvergenceReport r = log_convergence_check(e, ExtQ::of(qa), qeta, depth, cfg.prime);
    o["prime"] = cfg.prime;
    o["q_a"] = to_json(qa);
    o["q_eta"] = to_json(qeta);
    OrderedJson rows = OrderedJson::array();
    for (const auto& row : r.rows) {
      OrderedJson t;
      t["depth"] = row.depth;
      t["min_valuation"] = to_json(row.worst);
      rows.push_back(t);
    }
    o["rows"] = rows;
    o["verdict"] = r.verdict;
    return o;
  }
  fail(ErrorKind::InvalidArgument, "unknown connection command \"" + command + "\"");
}

namespace {

void render_text(std::ostringstream& os, const OrderedJson& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  auto scalar = [](const OrderedJson& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  auto flat = [&](const OrderedJson& v) {
    if (!v.is_array()) return false;
    for (const auto& x : v)
      if (x.is_object()) return false;
      else if (x.is_array())
        for (const auto& y : x)
          if (y.is_structured()) return false;
    return true;
  };
  auto inline_array = [&](const OrderedJson& v) {
    std::string s = "[";
    bool first = true;
    for (const auto& x : v) {
      if (!first) s += ", ";
      first = false;
      if (x.is_array()) {
        s += "[";
        bool f2 = true;
        for (const auto& y : x) {
          if (!f2) s += ", ";
          f2 = false;
          s += scalar(y);
        }
        s += "]";
      } else {
        s += scalar(x);
      }
    }
    return s + "]";
  };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || (v.is_array() && !flat(v))) {
        os << pad << k << ":\n";
        render_text(os, v, indent + 1);
      } else if (v.is_array()) {
        os << pad << k << ": " << inline_array(v) << "\n";
      } else {
        os << pad << k << ": " << scalar(v) << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_object()) {
        os << pad << "-\n";
        render_text(os, v, indent + 1);
      } else if (v.is_array()) {
        os << pad << "- " << inline_array(v) << "\n";
      } else {
        os << pad << "- " << scalar(v) << "\n";
      }
    }
  } else {
    os << pad << scalar(j) << "\n";
  }
}

}  // namespace

std::string render(const OrderedJson& doc, bool json) {
  if (json) return doc.dump(2) + "\n";
  std::ostringstream os;
  render_text(os, doc, 0);
  return os.str();
}

}  // namespace logmon::report
