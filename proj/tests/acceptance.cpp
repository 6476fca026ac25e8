// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "logmon/fixtures.hpp"
#include "logmon/oracle.hpp"

using namespace logmon;
namespace fx = logmon::fixtures;

namespace {

struct Check {
  bool ok = true;
  std::string why;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) why = what;
    ok = ok && cond;
  }
};

// Frozen from the brute-force enumerator (weight bound 10) and face search (weight bound 16).
const std::map<std::string, std::pair<std::size_t, std::size_t>> kFrozenGrid{
    {"N", {11, 2}},
    {"N^2", {66, 4}},
    {"N^3", {286, 8}},
    {"even-sum", {36, 4}},
    {"N\\{1}", {10, 2}},
    {"<3,5>", {7, 2}},
    {"torsion 2x=2y", {21, 2}},
    {"cone (1,0),(1,1),(1,2)", {121, 4}},
    {"<(1,0),(0,1),(1,1),(2,1)>", {66, 4}},
};

Check semi_saturation() {
  Check c;
  c.require(is_semi_saturated(fx::nat()), "N");
  c.require(is_semi_saturated(fx::nat_minus_one()), "N\\{1}");
  c.require(is_semi_saturated(fx::even_pairs()), "even-sum");
  c.require(!is_semi_saturated(fx::torsion_pair()), "torsion monoid reported semi-saturated");
  return c;
}

Check face_census() {
  Check c;
  FineMonoid m = fx::even_pairs();
  auto fs = faces(m);
  c.require(fs.size() == 4, "face count");
  c.require(facets(m).size() == 2, "facet count");
  const oracle::EnumerationBudget b{16, 200000};
  auto brute = oracle::brute_faces(m, b);
  c.require(brute.size() == 4, "brute face count");
  for (const auto& f : fs) {
    auto ball = oracle::face_ball(m, f, b);
    c.require(std::find(brute.begin(), brute.end(), ball) != brute.end(), "face missing from the brute list");
  }
  return c;
}

Check sections() {
  Check c;
  auto hs = fx::surjections();
  c.require(hs.size() == 5, "fixture count");
  for (const auto& h : hs) {
    SectionData d = section(h.hom);
    c.require(d.checks.composition_identity, h.name + ": f o s");
    c.require(d.checks.kernel_maps_to_zero, h.name + ": kernel");
    c.require(d.checks.splitting, h.name + ": splitting");
    c.require(d.checks.sharp_identity_applicable && d.checks.sharp_identity, h.name + ": sharp identity");
  }
  return c;
}

Check shear_suite() {
  Check c;
  auto conns = fx::shear_connections(12);
  c.require(conns.size() >= 5, "fixture count");
  for (const auto& k : conns) {
    c.require(k.module.truncation == 12, k.name + ": truncation");
    ShearResult sh = shear(k.module);
    c.require(sh.checks.equations_all_i, k.name + ": equation for some i");
    c.require(sh.checks.gauge_inverse, k.name + ": B B' != I");
    c.require(sh.checks.round_trip, k.name + ": round trip");
    c.require(sh.bound.ok(), k.name + ": norm bound");
  }
  return c;
}

Check counterexample() {
  Check c;
  LogNablaModule e = fx::even_pairs_counterexample();
  ExponentSet sigma{{QVector{0, 0}}};
  std::size_t facet_true = 0;
  for (const auto& f : facets(e.monoid)) facet_true += is_sigma_unipotent(e, sigma, f).verdict;
  c.require(facet_true == 2, "facet verdicts");
  c.require(!is_sigma_unipotent(e, sigma, Face{}).verdict, "vertex verdict");
  return c;
}

Check difference_operators() {
  Check c;
  // Constant-term operator kills tracked monomials and fixes constants.
  FineMonoid n2 = fx::nat2();
  Embedding id{QMatrix::identity(2)};
  const std::int64_t l = 3;
  Explorer ex(n2);
  for (const auto& x : ex.elements_up_to(6)) {
    auto f = TruncatedSeries::monomial(n2, SeriesKind::Disk, 8, x, 3);
    auto g = dl_constant_term(id, f, l);
    bool killed = (x[0] != 0 && x[0] <= l) || (x[1] != 0 && x[1] <= l);
    if (x == Element{0, 0})
      c.require(series_equal(f, g), "constant not fixed");
    else if (killed)
      c.require(g.is_zero(), "tracked monomial survives");
  }
  for (const auto& d : fx::dl_fixtures()) {
    DlSetup s = dl_setup(d.residues);
    QVector lim = dl_limit(s, d.section, d.residues[0].rows);
    c.require(in_eigenspace(s, lim), d.name + ": limit outside the eigenspace");
    for (std::int64_t ll = d.truncation; ll <= d.truncation + 2; ++ll) {
      VecSeries pr = dl_projection(d.monoid, d.embedding, s, d.section, ll);
      bool zero = std::all_of(lim.begin(), lim.end(), [](const Q& x) { return x == 0; });
      bool agree = zero ? pr.empty()
                        : pr.size() == 1 && pr.begin()->first == d.monoid.ambient().zero() && pr.begin()->second == lim;
      c.require(agree, d.name + ": projection differs from the limit");
    }
  }
  return c;
}

Check homotopy() {
  Check c;
  auto hs = fx::homotopy_pairs();
  c.require(hs.size() == 3, "fixture count");
  for (const auto& h : hs) {
    auto r = homotopy_check(h.monoid, h.embedding, h.xi, h.xi_prime, h.tests);
    c.require(r.zero && r.forms_checked > 0, h.name + ": residual");
  }
  return c;
}

Check log_convexity() {
  Check c;
  auto fs = fx::random_series(20240607u, 20, 5);
  c.require(fs.size() == 20, "series count");
  const std::vector<std::pair<Q, Q>> radii{{0, 1}, {Q(1, 2), 2}, {-1, 1}, {Q(1, 3), Q(5, 3)}};
  for (const auto& f : fs)
    for (const Q& t : {Q(1, 4), Q(1, 2), Q(3, 4)})
      for (const auto& [a, b] : radii) c.require(log_convex_at(f, a, b, t, 5), "inequality fails");
  return c;
}

Check saturation_invariance() {
  Check c;
  FineMonoid m = fx::nat_minus_one();
  std::vector<ValuationPoint> pts;
  for (int k = -3; k <= 6; ++k) pts.push_back(point_from_functional(m, {Q(k, 4)}));
  pts.push_back(vertex_point(m));
  for (int i = 0; i < 10; ++i) {
    // Radii p^{-qa} <= p^{-qb}, i.e. 0 < a <= b.
    Radius qb = ExtQ::of(Q(i, 5)), qa = ExtQ::of(Q(i, 5) + Q(i % 3 + 1, 2));
    auto r = saturation_invariance_check(m, qa, qb, pts, 12);
    c.require(r.ok && r.points_checked == pts.size(), "pair " + std::to_string(i));
  }
  return c;
}

Check oracle_equivalence() {
  Check c;
  const oracle::EnumerationBudget b{10, 200000}, fb{16, 200000}, hb{16, 200000};
  auto grid = fx::monoid_grid();
  c.require(grid.size() == kFrozenGrid.size(), "grid size");
  for (const auto& nm : grid) {
    const FineMonoid& m = nm.monoid;
    auto ball = oracle::enumerate_monoid(m, b);
    auto brute = oracle::brute_faces(m, fb);
    auto frozen = kFrozenGrid.find(nm.name);
    c.require(frozen != kFrozenGrid.end(), nm.name + ": not frozen");
    if (frozen != kFrozenGrid.end()) {
      c.require(ball.size() == frozen->second.first, nm.name + ": ball size");
      c.require(brute.size() == frozen->second.second, nm.name + ": brute face count");
    }
    Explorer ex(m);
    c.require(ex.elements_up_to(b.weight_bound).size() == ball.size(), nm.name + ": fast ball size");
    for (const auto& x : ball) c.require(ex.contains(x), nm.name + ": membership");
    // Non-members near the ball.
    const auto& amb = m.ambient();
    for (const auto& x : ball)
      for (const auto& g : m.generators()) {
        Element y = amb.sub(x, g);
        if (m.weight(y) < 0 || m.weight(y) > b.weight_bound) continue;
        c.require(ex.contains(y) == oracle::brute_contains(m, y, b), nm.name + ": membership of a difference");
      }
    auto fast = faces(m);
    c.require(fast.size() == brute.size(), nm.name + ": face count");
    for (const auto& f : fast)
      c.require(std::find(brute.begin(), brute.end(), oracle::face_ball(m, f, fb)) != brute.end(),
                nm.name + ": face set");
    HCalculator hc(m);
    for (const auto& y : ball)
      for (const auto& z : ball) {
        if (m.weight(y) > 4 || m.weight(z) > 4) continue;
        Element d = amb.sub(y, z);
        c.require(hc.h_plus(d) == oracle::brute_h_plus(m, d, hb), nm.name + ": h+");
      }
  }
  // Frozen h+ values.
  c.require(oracle::brute_h_plus(fx::nat2(), {1, -1}, hb) == 1, "h+ (1,-1) in N^2");
  c.require(oracle::brute_h_plus(fx::even_pairs(), {2, -2}, hb) == 2, "h+ (2,-2) in even-sum");
  // Order <= 3 shear: frozen B_1 of the rank-2 example, then all fixtures.
  MatSeries b3 = oracle::brute_shear_order(fx::nilpotent_plus_half(), 3);
  c.require(b3.size() == 2 && b3.at({1}) == fx::mat({{0, -2}, {0, 0}}), "frozen B_1");
  for (const auto& k : fx::shear_connections(12)) {
    const std::int64_t ord = 3 * k.module.monoid.weights().front();
    MatSeries brute_b = oracle::brute_shear_order(k.module, ord);
    MatSeries fast_b;
    for (const auto& [x, bx] : shear(k.module).gauge)
      if (k.module.monoid.weight(x) <= ord) fast_b.emplace(x, bx);
    c.require(mat_series_equal(brute_b, fast_b), k.name + ": order-3 gauge");
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"1 semi-saturation", semi_saturation},
      {"2 face census of the even-sum monoid", face_census},
      {"3 section invariants", sections},
      {"4 shear to order 12", shear_suite},
      {"5 even-sum counterexample verdicts", counterexample},
      {"6 difference operators", difference_operators},
      {"7 homotopy identity", homotopy},
      {"8 gauss norm log-convexity", log_convexity},
      {"9 saturation invariance on N\\{1}", saturation_invariance},
      {"10 oracle equivalence", oracle_equivalence},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.why = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL", name.c_str(), secs, c.ok ? "" : ": ",
                c.why.c_str());
    failures += !c.ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
