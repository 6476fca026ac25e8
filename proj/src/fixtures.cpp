#include "logmon/fixtures.hpp"

#include <random>

namespace logmon::fixtures {

QMatrix mat(std::initializer_list<std::initializer_list<Q>> rows) {
  QMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (const auto& x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

FineMonoid nat() { return FineMonoid::from_generators({1, {}}, {{1}}); }
FineMonoid nat2() { return FineMonoid::from_generators({2, {}}, {{1, 0}, {0, 1}}); }
FineMonoid nat3() { return FineMonoid::from_generators({3, {}}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}); }
FineMonoid even_pairs() { return FineMonoid::from_generators({2, {}}, {{2, 0}, {1, 1}, {0, 2}}); }
FineMonoid nat_minus_one() { return FineMonoid::from_generators({1, {}}, {{2}, {3}}); }
FineMonoid torsion_pair() { return FineMonoid::from_presentation(2, {{{2, 0}, {0, 2}}}); }
FineMonoid cone3() { return FineMonoid::from_generators({2, {}}, {{1, 0}, {1, 1}, {1, 2}}); }
FineMonoid numerical35() { return FineMonoid::from_generators({1, {}}, {{3}, {5}}); }

std::vector<NamedMonoid> monoid_grid() {
  return {{"N", nat()},
          {"N^2", nat2()},
          {"N^3", nat3()},
          {"even-sum", even_pairs()},
          {"N\\{1}", nat_minus_one()},
          {"<3,5>", numerical35()},
          {"torsion 2x=2y", torsion_pair()},
          {"cone (1,0),(1,1),(1,2)", cone3()},
          {"<(1,0),(0,1),(1,1),(2,1)>", FineMonoid::from_generators({2, {}}, {{1, 0}, {0, 1}, {1, 1}, {2, 1}})}};
}

std::vector<NamedHom> surjections() {
  std::vector<NamedHom> out;
  out.push_back({"N^2 -> N, both to 1", MonoidHom(nat2(), nat(), {{1}, {1}})});
  out.push_back({"N^3 -> even-sum", MonoidHom(nat3(), even_pairs(), {{2, 0}, {1, 1}, {0, 2}})});
  out.push_back({"N^2 -> N\\{1}", MonoidHom(nat2(), nat_minus_one(), {{2}, {3}})});
  out.push_back({"N^3 -> N^2 with e3 -> (1,1)", MonoidHom(nat3(), nat2(), {{1, 0}, {0, 1}, {1, 1}})});
  out.push_back({"N^3 -> cone", MonoidHom(nat3(), cone3(), {{1, 0}, {1, 1}, {1, 2}})});
  return out;
}

namespace {

Embedding identity_embedding(std::size_t r) { return Embedding{QMatrix::identity(r)}; }

// G^{-1}(C G + d G) for the constant model C and polynomial gauge G.
LogNablaModule gauged(const FineMonoid& m, const Embedding& emb, const std::vector<QMatrix>& model,
                      const MatSeries& g, std::int64_t truncation, IntervalKind interval = IntervalKind::Disk) {
  LogNablaModule base = apply_UI(m, emb, model, std::nullopt, interval, truncation);
  MatSeries ginv = mat_series_inverse(m, g, truncation);
  return gauge_transform(base, g, ginv);
}

}  // namespace

LogNablaModule nilpotent_plus_half(std::int64_t truncation) {
  MatSeries a{{{0}, mat({{0, 0}, {0, Q(1, 2)}})}, {{1}, mat({{0, 1}, {0, 0}})}};
  return LogNablaModule::make(nat(), identity_embedding(1), 2, truncation, {a});
}

LogNablaModule even_pairs_counterexample(std::int64_t truncation) {
  FineMonoid m = even_pairs();
  Embedding emb = facet_embedding(m);
  // (1/2) dlog t^{(2,0)} = dlog of the exponent (1,0).
  QVector img = emb.apply(QVector{1, 0});
  std::vector<MatSeries> a;
  for (const auto& v : img) a.push_back({{{0, 0}, mat({{v}})}});
  return LogNablaModule::make(m, emb, 1, truncation, a, IntervalKind::Annulus);
}

LogNablaModule constant_nilpotent(std::int64_t truncation) {
  return apply_UI(nat2(), identity_embedding(2), {mat({{0, 1}, {0, 0}}), mat({{0, 2}, {0, 0}})}, std::nullopt,
                  IntervalKind::Disk, truncation);
}

std::vector<NamedConnection> shear_connections(std::int64_t truncation) {
  std::vector<NamedConnection> out;
  const Element z1{0}, t1{1}, t2{2}, t3{3};
  out.push_back({"N rank 1 series, exponent 1/3",
                 LogNablaModule::make(nat(), identity_embedding(1), 1, truncation,
                                      {{{z1, mat({{Q(1, 3)}})}, {t1, mat({{1}})}, {t2, mat({{-2}})}, {t3, mat({{Q(1, 5)}})}}})});
  out.push_back({"N rank 2 nilpotent plus diag(0,1/2)", nilpotent_plus_half(truncation)});
  {
    MatSeries g{{z1, QMatrix::identity(3)},
                {t1, mat({{1, 0, 2}, {0, Q(1, 2), 1}, {3, 0, 0}})},
                {t2, mat({{0, Q(-1, 3), 0}, {1, 0, 0}, {0, 0, 5}})}};
    out.push_back({"N rank 3 gauged Jordan block plus 1/3",
                   gauged(nat(), identity_embedding(1), {mat({{0, 1, 0}, {0, 0, 0}, {0, 0, Q(1, 3)}})}, g, truncation)});
  }
  {
    FineMonoid m = nat2();
    MatSeries g{{{0, 0}, QMatrix::identity(2)},
                {{1, 0}, mat({{1, 2}, {0, -1}})},
                {{0, 1}, mat({{0, Q(1, 5)}, {3, 0}})},
                {{1, 1}, mat({{Q(2, 7), 0}, {1, 1}})}};
    std::vector<QMatrix> model{mat({{0, 1}, {0, 0}}), mat({{Q(1, 3), 2}, {0, Q(1, 3)}})};
    out.push_back({"N^2 rank 2 gauged unipotent twist", gauged(m, identity_embedding(2), model, g, truncation)});
  }
  {
    FineMonoid m = nat2();
    MatSeries g{{{0, 0}, QMatrix::identity(3)},
                {{1, 0}, mat({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})},
                {{0, 2}, mat({{Q(1, 2), 0, 0}, {0, 0, 0}, {0, 4, 0}})}};
    std::vector<QMatrix> model{mat({{0, 1, 0}, {0, 0, 0}, {0, 0, Q(1, 3)}}), mat({{0, 0, 0}, {0, 0, 0}, {0, 0, Q(1, 2)}})};
    out.push_back({"N^2 rank 3 gauged two exponents", gauged(m, identity_embedding(2), model, g, truncation)});
  }
  {
    FineMonoid m = even_pairs();
    Embedding emb = facet_embedding(m);
    MatSeries g{{{0, 0}, QMatrix::identity(2)},
                {{1, 1}, mat({{1, 1}, {0, 2}})},
                {{2, 0}, mat({{0, 0}, {Q(1, 3), 0}})}};
    std::vector<QMatrix> model{mat({{0, 0}, {0, Q(1, 2)}}), mat({{0, 0}, {0, Q(1, 4)}})};
    out.push_back({"even-sum rank 2 gauged diagonal", gauged(m, emb, model, g, truncation)});
  }
  out.push_back({"even-sum rank 1 counterexample", even_pairs_counterexample(truncation)});
  return out;
}

namespace {

std::vector<Forms> forms_for(const FineMonoid& m, std::size_t r, std::int64_t weight) {
  Explorer ex(m);
  std::vector<Element> elems;
  for (const auto& x : ex.elements_up_to(weight)) {
    elems.push_back(x);
    if (x != m.ambient().zero()) elems.push_back(m.ambient().neg(x));
  }
  std::vector<Forms> tests;
  Forms all;
  long k = 1;
  for (const auto& x : elems)
    for (std::uint32_t mask = 0; mask < (1u << r); ++mask, ++k) {
      Q c(k % 7 + 1, static_cast<long>(mask) + 2);
      tests.push_back(Forms{{{x, mask}, c}});
      all[{x, mask}] = c;
    }
  tests.push_back(all);
  return tests;
}

}  // namespace

std::vector<HomotopyPair> homotopy_pairs() {
  std::vector<HomotopyPair> out;
  {
    FineMonoid m = nat();
    Embedding e = identity_embedding(1);
    out.push_back({"N, 0 vs 1/3", m, e, {0}, {Q(1, 3)}, forms_for(m, 1, 6)});
  }
  {
    FineMonoid m = nat2();
    Embedding e = identity_embedding(2);
    out.push_back({"N^2, 0 vs (1/2,1/3)", m, e, {0, 0}, {Q(1, 2), Q(1, 3)}, forms_for(m, 2, 3)});
  }
  {
    FineMonoid m = even_pairs();
    Embedding e = facet_embedding(m);
    out.push_back({"even-sum, (1/4,0) vs (3/4,1/2)", m, e, {Q(1, 4), 0}, {Q(3, 4), Q(1, 2)}, forms_for(m, 2, 6)});
  }
  return out;
}

std::vector<DlFixture> dl_fixtures() {
  std::vector<DlFixture> out;
  out.push_back({"N nilpotent rank 2", nat(), identity_embedding(1), {mat({{0, 1}, {0, 0}})},
                 {{{0}, {1, 1}}, {{1}, {2, 3}}, {{2}, {-1, 5}}, {{5}, {Q(1, 7), 0}}}, 6});
  out.push_back({"N diag(0,1/2)", nat(), identity_embedding(1), {mat({{0, 0}, {0, Q(1, 2)}})},
                 {{{0}, {3, 4}}, {{1}, {1, -1}}, {{4}, {2, 2}}}, 6});
  out.push_back({"N rank 1 exponent 1/3", nat(), identity_embedding(1), {mat({{Q(1, 3)}})},
                 {{{0}, {Q(5, 2)}}, {{3}, {7}}}, 6});
  out.push_back({"N^2 rank 3 mixed", nat2(), identity_embedding(2),
                 {mat({{0, 1, 0}, {0, 0, 0}, {0, 0, Q(1, 3)}}), mat({{0, 0, 0}, {0, 0, 0}, {0, 0, Q(1, 2)}})},
                 {{{0, 0}, {1, 2, 3}}, {{1, 0}, {0, 1, 0}}, {{0, 2}, {4, 0, 1}}, {{1, 1}, {1, 1, 1}}}, 4});
  return out;
}

std::vector<TruncatedSeries> random_series(std::uint32_t seed, std::size_t count, unsigned long p) {
  std::mt19937 rng(seed);
  std::vector<FineMonoid> monoids{nat(), nat2(), even_pairs(), nat_minus_one()};
  std::vector<std::vector<Element>> pools;
  for (const auto& m : monoids) {
    Explorer ex(m);
    pools.push_back(ex.elements_up_to(8));
  }
  std::uniform_int_distribution<int> num(-9, 9), den(1, 4), expo(-2, 3), nterms(1, 6);
  std::vector<TruncatedSeries> out;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t which = s % monoids.size();
    const auto& pool = pools[which];
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::map<Element, Q> terms;
    const int k = nterms(rng);
    for (int t = 0; t < k; ++t) {
      int a = num(rng);
      if (a == 0) a = 1;
      Q c(a, den(rng));
      int e = expo(rng);
      for (int i = 0; i < (e < 0 ? -e : e); ++i) c = e < 0 ? Q(c / Q(static_cast<long>(p))) : Q(c * Q(static_cast<long>(p)));
      terms[pool[pick(rng)]] += c;
    }
    out.push_back(TruncatedSeries::from_terms(monoids[which], SeriesKind::Disk, 16, terms));
  }
  return out;
}

}  // namespace logmon::fixtures
