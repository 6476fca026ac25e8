#include <functional>

#include "logmon/fixtures.hpp"
#include "logmon/oracle.hpp"
#include "report.hpp"

namespace logmon::report {

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail = what;
    ok = false;
  }
};

// Independent residual of A^i B + d_i B - B A^i_0 over every coordinate and order.
bool gauge_equation_holds(const LogNablaModule& e, const MatSeries& b) {
  const std::vector<QMatrix> res = residue(e);
  for (std::size_t i = 0; i < e.embedding.r(); ++i) {
    MatSeries lhs = mat_series_mul(e.monoid, e.A[i], b, e.truncation);
    for (const auto& [x, bx] : b) {
      Q c = e.embedding.apply(e.monoid, x)[i];
      QMatrix term = c * bx - bx * res[i];
      auto it = lhs.find(x);
      if (it == lhs.end())
        lhs.emplace(x, term);
      else
        it->second = it->second + term;
    }
    for (const auto& [x, v] : lhs)
      if (!v.is_zero()) return false;
  }
  return true;
}

Outcome semi_saturation() {
  using namespace fixtures;
  Outcome o;
  o.require(is_semi_saturated(nat()), "N");
  o.require(is_semi_saturated(nat_minus_one()), "N\\{1}");
  o.require(is_semi_saturated(even_pairs()), "even-sum");
  o.require(!is_semi_saturated(torsion_pair()), "torsion monoid");
  o.require(is_saturated_bounded(nat_minus_one(), 10) == Tri::False, "N\\{1} saturation");
  return o;
}

Outcome oracle_monoids(const Config& cfg) {
  Outcome o;
  const oracle::EnumerationBudget b{cfg.weight_bound, 200000};
  for (const auto& nm : fixtures::monoid_grid()) {
    const FineMonoid& m = nm.monoid;
    Explorer ex(m);
    auto ball = oracle::enumerate_monoid(m, b);
    for (const auto& x : ball) o.require(ex.contains(x), nm.name + ": enumerated element rejected");
    // Integer combinations of generators, members or not.
    const auto& amb = m.ambient();
    std::vector<Element> probes{amb.zero()};
    for (const auto& g : m.generators()) {
      std::vector<Element> next;
      for (const auto& p : probes)
        for (int c = -2; c <= 2; ++c) next.push_back(amb.add(p, amb.scale(c, g)));
      probes = std::move(next);
      if (probes.size() > 700) break;
    }
    for (const auto& x : probes) {
      if (m.weight(x) > b.weight_bound || m.weight(x) < 0) continue;
      o.require(ex.contains(x) == oracle::brute_contains(m, x, b), nm.name + ": membership mismatch");
    }
    auto fast = faces(m);
    // Non-face witnesses can be heavier than the membership ball.
    const oracle::EnumerationBudget fb{b.weight_bound + 6, 200000};
    auto brute = oracle::brute_faces(m, fb);
    o.require(fast.size() == brute.size(), nm.name + ": face count mismatch");
    for (const auto& f : fast) {
      auto ball_f = oracle::face_ball(m, f, fb);
      o.require(std::find(brute.begin(), brute.end(), ball_f) != brute.end(), nm.name + ": face not found by brute force");
    }
    HCalculator hc(m);
    const oracle::EnumerationBudget hb{b.weight_bound + 6, 200000};
    std::vector<Element> small;
    for (const auto& x : ball)
      if (m.weight(x) <= 4) small.push_back(x);
    for (const auto& y : small)
      for (const auto& z : small) {
        Element d = amb.sub(y, z);
        o.require(hc.h_plus(d) == oracle::brute_h_plus(m, d, hb), nm.name + ": h+ mismatch");
      }
  }
  return o;
}

Outcome sections() {
  Outcome o;
  for (const auto& s : fixtures::surjections()) {
    SectionData d = section(s.hom);
    o.require(d.checks.all(), s.name + ": section invariant failed");
    o.require(d.checks.sharp_identity_applicable, s.name + ": sharp identity not checked");
  }
  return o;
}

Outcome shear_suite(const Config& cfg, bool inject_fault) {
  Outcome o;
  bool first = true;
  for (const auto& c : fixtures::shear_connections(cfg.truncation)) {
    o.require(validate_integrability(c.module).ok, c.name + ": not integrable");
    ShearOptions opt;
    opt.prime = cfg.prime;
    ShearResult sh = shear(c.module, opt);
    if (inject_fault && first) {
      for (auto& [x, bx] : sh.gauge)
        if (x != c.module.monoid.ambient().zero()) {
          bx(0, 0) += 1;
          break;
        }
      if (sh.gauge.size() == 1) sh.gauge.begin()->second(0, 0) += 1;
    }
    first = false;
    o.require(sh.checks.all(), c.name + ": shear self-checks failed");
    o.require(gauge_equation_holds(c.module, sh.gauge), c.name + ": gauge equation residual is non-zero");
    o.require(sh.bound.ok(), c.name + ": norm bound violated");
    ShearOptions par = opt;
    par.parallel = true;
    o.require(shear(c.module, par).gauge == sh.gauge, c.name + ": parallel shear differs");
    const std::int64_t k = std::min<std::int64_t>(3 * c.module.monoid.weights().front(), cfg.truncation);
    MatSeries brute = oracle::brute_shear_order(c.module, k);
    MatSeries fast;
    for (const auto& [x, bx] : sh.gauge)
      if (c.module.monoid.weight(x) <= k) fast.emplace(x, bx);
    o.require(mat_series_equal(brute, fast), c.name + ": brute-force gauge differs");
  }
  return o;
}

Outcome exponent_invariance() {
  Outcome o;
  const QMatrix p = fixtures::mat({{1, 2, 0}, {0, 1, 3}, {1, 0, 1}});
  const QMatrix pinv = *inverse(p);
  std::vector<QMatrix> res{fixtures::mat({{0, 1, 0}, {0, 0, 0}, {0, 0, Q(1, 3)}}),
                           fixtures::mat({{0, 0, 0}, {0, 0, 0}, {0, 0, Q(1, 2)}})};
  std::vector<QMatrix> conj;
  for (const auto& r : res) conj.push_back(pinv * r * p);
  auto a = joint_decomposition(res), b = joint_decomposition(conj);
  o.require(a.blocks.size() == b.blocks.size(), "block count changed under conjugation");
  for (std::size_t i = 0; i < a.blocks.size() && i < b.blocks.size(); ++i) {
    o.require(a.blocks[i].phi_values == b.blocks[i].phi_values, "exponent changed under conjugation");
    o.require(a.blocks[i].multiplicity == b.blocks[i].multiplicity, "multiplicity changed under conjugation");
  }
  return o;
}

Outcome unipotence() {
  Outcome o;
  LogNablaModule e = fixtures::even_pairs_counterexample();
  const FineMonoid& m = e.monoid;
  ExponentSet sigma{{QVector{0, 0}}};
  for (const auto& f : faces(m)) {
    bool expected = !f.generators.empty();
    o.require(is_sigma_unipotent(e, sigma, f).verdict == expected, "counterexample verdict wrong");
    LogNablaModule tw = twist_by(e, Element{1, 1});
    o.require(is_sigma_unipotent(tw, sigma, f).verdict == expected, "verdict changed under twisting");
  }
  LogNablaModule nil = fixtures::constant_nilpotent();
  for (const auto& f : faces(nil.monoid)) {
    auto r = is_sigma_unipotent(nil, ExponentSet{{QVector{0, 0}}}, f);
    o.require(r.verdict, "constant nilpotent module not unipotent");
  }
  auto tr = twist_reduce(m, e.embedding, QVector{1, 0}, IntervalKind::Annulus);
  o.require(tr.xi == QVector{1, 0} && tr.shift == Element{0, 0}, "twist reduction moved (1,0)");
  return o;
}

Outcome dl_suite() {
  Outcome o;
  for (const auto& d : fixtures::dl_fixtures()) {
    DlSetup s = dl_setup(d.residues);
    QVector lim = dl_limit(s, d.section, d.residues[0].rows);
    o.require(in_eigenspace(s, lim), d.name + ": limit outside the eigenspace");
    VecSeries pr = dl_projection(d.monoid, d.embedding, s, d.section, d.truncation);
    bool zero = std::all_of(lim.begin(), lim.end(), [](const Q& c) { return c == 0; });
    bool agree = zero ? pr.empty()
                      : pr.size() == 1 && pr.begin()->first == d.monoid.ambient().zero() && pr.begin()->second == lim;
    o.require(agree, d.name + ": projection differs from limit");
  }
  FineMonoid m = fixtures::nat2();
  Embedding id{QMatrix::identity(2)};
  std::map<Element, Q> terms{{{0, 0}, 3}, {{1, 0}, 1}, {{0, 2}, 5}, {{3, 1}, Q(1, 2)}};
  auto f = TruncatedSeries::from_terms(m, SeriesKind::Disk, 8, terms);
  auto g = dl_constant_term(id, f, 3);
  o.require(g.terms().size() == 1 && g.coefficient({0, 0}) == 3, "constant-term operator");
  return o;
}

Outcome homotopy_suite() {
  Outcome o;
  for (const auto& h : fixtures::homotopy_pairs()) {
    auto r = homotopy_check(h.monoid, h.embedding, h.xi, h.xi_prime, h.tests);
    o.require(r.zero, h.name + ": non-zero homotopy residual");
  }
  return o;
}

Outcome convexity(const Config& cfg) {
  Outcome o;
  const std::vector<std::pair<Q, Q>> radii{{0, 1}, {Q(1, 2), 2}, {-1, 1}, {Q(1, 3), Q(5, 3)}};
  for (const auto& f : fixtures::random_series(20240607u, 20, cfg.prime))
    for (const Q& c : {Q(1, 4), Q(1, 2), Q(3, 4)})
      for (const auto& [a, b] : radii) o.require(log_convex_at(f, a, b, c, cfg.prime), "log-convexity violated");
  return o;
}

Outcome saturation_invariance() {
  Outcome o;
  FineMonoid m = fixtures::nat_minus_one();
  std::vector<ValuationPoint> pts;
  for (int k = -3; k <= 6; ++k) pts.push_back(point_from_functional(m, {Q(k, 4)}));
  pts.push_back(vertex_point(m));
  for (int i = 0; i < 10; ++i) {
    Radius qb = ExtQ::of(Q(i, 5)), qa = ExtQ::of(Q(i, 5) + Q(i % 3 + 1, 2));
    auto r = saturation_invariance_check(m, qa, qb, pts, 12);
    o.require(r.ok, "saturation invariance failed");
  }
  return o;
}

Outcome log_convergence(const Config& cfg) {
  Outcome o;
  FineMonoid n = fixtures::nat();
  Embedding id{QMatrix::identity(1)};
  auto trivial = apply_UI(n, id, {QMatrix(1, 1)}, std::nullopt, IntervalKind::Disk, 8);
  o.require(log_convergence_check(trivial, ExtQ::of(0), Q(1, 2), 8, cfg.prime).verdict, "trivial module");
  if (cfg.prime != 2) {
    auto half = apply_UI(n, id, {fixtures::mat({{0, 0}, {0, Q(1, 2)}})}, std::nullopt, IntervalKind::Disk, 8);
    o.require(log_convergence_check(half, ExtQ::of(0), Q(1, 2), 10, cfg.prime).verdict, "diag(0,1/2)");
  }
  auto bad = apply_UI(n, id, {fixtures::mat({{Q(1, static_cast<long>(cfg.prime))}})}, std::nullopt,
                      IntervalKind::Disk, 8);
  o.require(!log_convergence_check(bad, ExtQ::of(0), Q(1, 2), 8, cfg.prime).verdict, "residue 1/p not flagged");
  return o;
}

}  // namespace

OrderedJson selftest_report(const Config& cfg, bool inject_fault, bool& passed) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> suites{
      {"semi-saturation", [] { return semi_saturation(); }},
      {"oracle monoids", [&] { return oracle_monoids(cfg); }},
      {"sections", [] { return sections(); }},
      {"shear", [&] { return shear_suite(cfg, inject_fault); }},
      {"exponent invariance", [] { return exponent_invariance(); }},
      {"unipotence", [] { return unipotence(); }},
      {"difference operators", [] { return dl_suite(); }},
      {"homotopy", [] { return homotopy_suite(); }},
      {"log-convexity", [&] { return convexity(cfg); }},
      {"saturation invariance", [] { return saturation_invariance(); }},
      {"log-convergence", [&] { return log_convergence(cfg); }},
  };
  OrderedJson rows = OrderedJson::array();
  passed = true;
  for (const auto& [name, run] : suites) {
    Outcome out;
    try {
      out = run();
    } catch (const Error& e) {
      out.ok = false;
      out.detail = e.what();
    }
    OrderedJson r;
    r["suite"] = name;
    r["passed"] = out.ok;
    if (!out.ok) r["detail"] = out.detail;
    rows.push_back(r);
    passed = passed && out.ok;
  }
  OrderedJson doc;
  doc["prime"] = cfg.prime;
  doc["truncation"] = cfg.truncation;
  doc["fault_injected"] = inject_fault;
  doc["suites"] = rows;
  doc["passed"] = passed;
  return doc;
}

}  // namespace logmon::report
