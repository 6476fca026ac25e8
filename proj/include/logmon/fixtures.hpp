// Named example monoids, surjections, connections and generated inputs shared by
// the self-test and the test suites.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logmon/connection.hpp"
#include "logmon/monoid.hpp"
#include "logmon/series.hpp"

namespace logmon::fixtures {

FineMonoid nat();            // N
FineMonoid nat2();           // N^2
FineMonoid nat3();           // N^3
FineMonoid even_pairs();     // {(a,b) in N^2 : a + b even}
FineMonoid nat_minus_one();  // N \ {1}, generated by 2 and 3
FineMonoid torsion_pair();   // <e1, e2 | 2 e1 = 2 e2>, group Z + Z/2
FineMonoid cone3();          // generated by (1,0), (1,1), (1,2)
FineMonoid numerical35();    // generated by 3 and 5

struct NamedMonoid {
  std::string name;
  FineMonoid monoid;
};
// Sharp monoids with at most 4 generators used for oracle comparisons.
std::vector<NamedMonoid> monoid_grid();

struct NamedHom {
  std::string name;
  MonoidHom hom;
};
std::vector<NamedHom> surjections();

struct NamedConnection {
  std::string name;
  LogNablaModule module;
};
// Integrable connections with NI exponent differences on N, N^2 and the even-sum monoid.
std::vector<NamedConnection> shear_connections(std::int64_t truncation = 12);
// Rank 2 on N: A = [[0,1],[0,0]] t + diag(0, 1/2).
LogNablaModule nilpotent_plus_half(std::int64_t truncation = 12);
// Rank 1 on the even-sum monoid with A = (1/2) dlog t^{(2,0)}, over an annulus.
LogNablaModule even_pairs_counterexample(std::int64_t truncation = 12);
// Constant nilpotent model of rank 2 on N^2.
LogNablaModule constant_nilpotent(std::int64_t truncation = 12);

struct HomotopyPair {
  std::string name;
  FineMonoid monoid;
  Embedding embedding;
  QVector xi, xi_prime;
  std::vector<Forms> tests;
};
std::vector<HomotopyPair> homotopy_pairs();

struct DlFixture {
  std::string name;
  FineMonoid monoid;
  Embedding embedding;
  std::vector<QMatrix> residues;
  VecSeries section;  // terms of weight at most the truncation
  std::int64_t truncation = 6;
};
std::vector<DlFixture> dl_fixtures();

// Seeded random series with p-power-scaled coefficients.
std::vector<TruncatedSeries> random_series(std::uint32_t seed, std::size_t count, unsigned long p);

QMatrix mat(std::initializer_list<std::initializer_list<Q>> rows);

}  // namespace logmon::fixtures
