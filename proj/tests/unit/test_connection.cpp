#include <doctest.h>

#include "logmon/fixtures.hpp"
#include "logmon/oracle.hpp"

using namespace logmon;
namespace fx = logmon::fixtures;
using fx::mat;

namespace {
Embedding id(std::size_t r) { return Embedding{QMatrix::identity(r)}; }
}  // namespace

TEST_CASE("facet embeddings") {
  CHECK(facet_embedding(fx::nat2()).phi == QMatrix::identity(2));
  CHECK(facet_embedding(fx::nat_minus_one()).phi == QMatrix::identity(1));
  Embedding e = facet_embedding(fx::even_pairs());
  CHECK(e.phi == QMatrix::identity(2));
  validate_embedding(fx::even_pairs(), e);
}

TEST_CASE("exponent-set condition") {
  FineMonoid m = fx::even_pairs();
  CHECK(check_sd(m, {{QVector{0, 0}}}));
  CHECK(check_sd(m, {{QVector{0, 0}, QVector{Q(1, 2), Q(1, 2)}}}));
  CHECK_FALSE(check_sd(m, {{QVector{0, 0}, QVector{3, 3}}}));
}

TEST_CASE("integrability") {
  FineMonoid n2 = fx::nat2();
  auto c = apply_UI(n2, id(2), {mat({{0, 1}, {0, 0}}), mat({{0, 2}, {0, 0}})}, std::nullopt, IntervalKind::Disk, 6);
  CHECK(validate_integrability(c).ok);
  auto r1 = LogNablaModule::make(fx::nat(), id(1), 1, 6, {MatSeries{{{0}, mat({{1}})}, {{3}, mat({{2}})}}});
  CHECK(validate_integrability(r1).ok);
  // d_2 of t^(1,0) is zero, but A^2 t-dependence is missing: fails.
  auto bad = LogNablaModule::make(n2, id(2), 2, 6,
                                  {MatSeries{{{0, 1}, mat({{0, 1}, {0, 0}})}}, MatSeries{}});
  CHECK_FALSE(validate_integrability(bad).ok);
}

TEST_CASE("exponents") {
  auto e = fx::nilpotent_plus_half();
  auto ex = exponents(e);
  REQUIRE(ex.blocks.size() == 2);
  CHECK(ex.blocks[0].phi_values == QVector{0});
  CHECK(ex.blocks[1].phi_values == QVector{Q(1, 2)});
  CHECK(ex.blocks[0].multiplicity == 1);

  auto nil = exponents(fx::constant_nilpotent());
  REQUIRE(nil.blocks.size() == 1);
  CHECK(nil.blocks[0].multiplicity == 2);

  auto ce = exponents(fx::even_pairs_counterexample());
  REQUIRE(ce.blocks.size() == 1);
  CHECK(ce.blocks[0].xi == QVector{1, 0});
}

TEST_CASE("irrational spectra are rejected") {
  CHECK_THROWS_AS(joint_decomposition({mat({{0, 1}, {2, 0}})}), Error);
}

TEST_CASE("shear of a constant module is the identity") {
  auto c = fx::constant_nilpotent();
  auto sh = shear(c);
  CHECK(sh.checks.all());
  REQUIRE(sh.gauge.size() == 1);
  CHECK(sh.gauge.begin()->second == QMatrix::identity(2));
  auto ce = shear(fx::even_pairs_counterexample());
  CHECK(ce.gauge.size() == 1);
  CHECK(ce.constant_model == residue(fx::even_pairs_counterexample()));
}

TEST_CASE("shear of the nilpotent plus half example") {
  auto e = fx::nilpotent_plus_half();
  auto sh = shear(e);
  CHECK(sh.checks.all());
  CHECK(sh.bound.ok());
  REQUIRE(sh.gauge.count({1}));
  CHECK(sh.gauge.at({1}) == mat({{0, -2}, {0, 0}}));
  auto brute = oracle::brute_shear_order(e, 3);
  MatSeries fast;
  for (const auto& [x, b] : sh.gauge)
    if (x[0] <= 3) fast.emplace(x, b);
  CHECK(mat_series_equal(brute, fast));
}

TEST_CASE("parallel shear equals sequential shear") {
  for (const auto& c : fx::shear_connections(8)) {
    ShearOptions par;
    par.parallel = true;
    CHECK_MESSAGE(shear(c.module).gauge == shear(c.module, par).gauge, c.name);
  }
}

TEST_CASE("apply_UI and twisting") {
  FineMonoid m = fx::even_pairs();
  Embedding e = facet_embedding(m);
  auto u = apply_UI(m, e, {QMatrix(1, 1), QMatrix(1, 1)}, QVector{0, Q(1, 2)}, IntervalKind::Annulus, 6);
  auto r = residue(u);
  CHECK(r[0] == mat({{0}}));
  CHECK(r[1] == mat({{Q(1, 2)}}));
  auto tw = twist_by(u, {1, 1});
  CHECK(residue(tw)[1] == mat({{Q(3, 2)}}));
}

TEST_CASE("twist reduction") {
  auto a = twist_reduce(fx::nat2(), id(2), QVector{Q(7, 2), -2}, IntervalKind::Annulus);
  CHECK(a.xi == QVector{Q(1, 2), 0});
  CHECK(a.shift == Element{3, -2});
  auto z = twist_reduce(fx::nat2(), id(2), QVector{0, 0}, IntervalKind::Annulus);
  CHECK(z.shift == Element{0, 0});
  FineMonoid m = fx::even_pairs();
  auto c = twist_reduce(m, facet_embedding(m), QVector{1, 0}, IntervalKind::Annulus);
  CHECK(c.xi == QVector{1, 0});
  CHECK(c.shift == Element{0, 0});
}

TEST_CASE("unipotence of the even-sum counterexample") {
  auto e = fx::even_pairs_counterexample();
  ExponentSet sigma{{QVector{0, 0}}};
  std::size_t checked = 0;
  for (const auto& f : faces(e.monoid)) {
    auto r = is_sigma_unipotent(e, sigma, f);
    if (f.generators.empty()) {
      CHECK_FALSE(r.verdict);
    } else {
      CHECK(r.verdict);
    }
    ++checked;
  }
  CHECK(checked == 4);
}

TEST_CASE("constant nilpotent module is unipotent on every face") {
  auto e = fx::constant_nilpotent();
  for (const auto& f : faces(e.monoid)) {
    auto r = is_sigma_unipotent(e, {{QVector{0, 0}}}, f);
    CHECK(r.verdict);
    for (auto k : r.filtration_ranks) CHECK(k == 1);
  }
}

TEST_CASE("difference operators on series") {
  FineMonoid n = fx::nat();
  auto c = TruncatedSeries::constant(n, SeriesKind::Disk, 6, 5);
  for (int l = 0; l < 4; ++l) CHECK(series_equal(dl_constant_term(id(1), c, l), c));
  auto t2 = TruncatedSeries::monomial(n, SeriesKind::Disk, 6, {2});
  CHECK(dl_constant_term(id(1), t2, 2).is_zero());
  auto f = series_add(TruncatedSeries::constant(n, SeriesKind::Disk, 6, 1),
                      TruncatedSeries::monomial(n, SeriesKind::Disk, 6, {1}));
  CHECK(series_equal(dl_constant_term(id(1), f, 1), TruncatedSeries::constant(n, SeriesKind::Disk, 6, 1)));
}

TEST_CASE("difference operator limits") {
  std::vector<QMatrix> res{mat({{0, 1}, {0, 0}})};
  auto s = dl_setup(res);
  VecSeries v{{{0}, QVector{1, 1}}};
  QVector lim = dl_limit(s, v, 2);
  CHECK(in_eigenspace(s, lim));
  CHECK(res[0] * lim == QVector{0, 0});

  std::vector<QMatrix> r1{mat({{Q(1, 3)}})};
  auto s1 = dl_setup(r1);
  VecSeries w{{{0}, QVector{7}}, {{2}, QVector{4}}};
  CHECK(dl_limit(s1, w, 1) == QVector{7});
  auto pr = dl_projection(fx::nat(), id(1), s1, w, 4);
  REQUIRE(pr.size() == 1);
  CHECK(pr.begin()->second == QVector{7});
}

TEST_CASE("homotopy residuals vanish") {
  for (const auto& h : fx::homotopy_pairs()) {
    auto r = homotopy_check(h.monoid, h.embedding, h.xi, h.xi_prime, h.tests);
    CHECK_MESSAGE(r.zero, h.name);
    CHECK(r.forms_checked > 0);
  }
  FineMonoid n2 = fx::nat2();
  Forms one_form{{{Element{0, 0}, 1u}, Q(1)}};
  Forms t_m{{{Element{1, 0}, 0u}, Q(1)}};
  CHECK(homotopy_check(n2, id(2), {0, 0}, {0, 0}, {one_form, t_m}).zero);
}

TEST_CASE("log-convergence verdicts") {
  FineMonoid n = fx::nat();
  auto trivial = apply_UI(n, id(1), {QMatrix(1, 1)}, std::nullopt, IntervalKind::Disk, 8);
  CHECK(log_convergence_check(trivial, ExtQ::of(0), Q(1, 2), 8, 5).verdict);
  auto bad = apply_UI(n, id(1), {mat({{Q(1, 5)}})}, std::nullopt, IntervalKind::Disk, 8);
  auto r = log_convergence_check(bad, ExtQ::of(0), Q(1, 2), 8, 5);
  CHECK_FALSE(r.verdict);
  CHECK(r.rows.size() == 9);
}

TEST_CASE("terms outside the monoid are rejected") {
  CHECK_THROWS_AS(LogNablaModule::make(fx::nat(), id(1), 1, 6, {MatSeries{{{-1}, mat({{1}})}}}), Error);
}
