// Log connections on weighted-monoid polydisks at finite truncation: residues,
// exponents, exponent-set conditions along facets, order-by-order shearing to
// a constant model, unipotence along faces, difference-operator projections,
// the de Rham homotopy operator and log-convergence growth tables.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logmon/monoid.hpp"
#include "logmon/series.hpp"

namespace logmon {

// Linear map phi on the free ambient coordinates, r x k. Integral on the
// monoid's group, non-negative on the monoid and injective on gp (x) Q.
struct Embedding {
  QMatrix phi;
  std::size_t r() const { return phi.rows; }
  QVector apply(const QVector& x) const { return phi * x; }
  QVector apply(const FineMonoid& m, const Element& x) const { return phi * m.ambient().free_part(x); }
};

// One functional per facet F (in facet order) identifying (M/F)^gp with Z,
// signed to be non-negative on M.
std::vector<QVector> facet_functionals(const FineMonoid& m);
// Facet functionals, pruned greedily to a basis of the dual of gp (x) Q.
Embedding facet_embedding(const FineMonoid& m);
// Throws InvalidArgument when the embedding hypotheses fail.
void validate_embedding(const FineMonoid& m, const Embedding& e);

struct ExponentSet {
  std::vector<QVector> elements;  // free ambient coordinates
};

enum class SdClass { NI, NI_NL };
// Along every facet, no two images differ by a non-zero integer. Rational
// exponents are never p-adic Liouville, so NI_NL adds no condition.
bool check_sd(const FineMonoid& m, const ExponentSet& sigma, SdClass cls = SdClass::NI);

using MatSeries = std::map<Element, QMatrix>;
using VecSeries = std::map<Element, QVector>;

enum class IntervalKind { Disk, Annulus, Point };
const char* to_string(IntervalKind k);

struct LogNablaModule {
  FineMonoid monoid;
  Embedding embedding;
  std::size_t rank = 0;
  std::int64_t truncation = 0;
  IntervalKind interval = IntervalKind::Disk;
  std::vector<MatSeries> A;   // one series per coordinate of phi
  std::vector<QMatrix> base;  // constant matrices along the base coordinate, possibly empty

  // Validates shapes, monoid support and weights; drops zero and out-of-range terms.
  static LogNablaModule make(FineMonoid m, Embedding e, std::size_t rank, std::int64_t truncation,
                             std::vector<MatSeries> a, IntervalKind interval = IntervalKind::Disk,
                             std::vector<QMatrix> base = {});
  QMatrix term(std::size_t i, const Element& m) const;
};

struct IntegrabilityReport {
  bool ok = true;
  std::string first_failure;
};
IntegrabilityReport validate_integrability(const LogNablaModule& e);

std::vector<QMatrix> residue(const LogNablaModule& e);

struct ExponentBlock {
  QVector phi_values;  // eigenvalue of each residue on the block
  QVector xi;          // the exponent in free ambient coordinates
  QMatrix basis;       // columns span the joint generalized eigenspace
  std::size_t multiplicity = 0;
};
struct ExponentData {
  std::vector<ExponentBlock> blocks;  // sorted by phi_values
  QMatrix change_of_basis;            // block bases side by side
};
// Joint generalized eigenspaces of a commuting family with rational spectrum.
ExponentData joint_decomposition(const std::vector<QMatrix>& mats);
ExponentData exponents(const LogNablaModule& e);
ExponentData exponents_of(const FineMonoid& m, const Embedding& emb, const std::vector<QMatrix>& res);

struct BoundRow {
  Element m;
  std::int64_t weight = 0;
  Q actual_log = 0;     // log_p |B_m|
  Q predicted_log = 0;  // e log Z_m + 2 h(m) log C + h(m) q_a
  bool ok = true;
};
struct InverseBoundRow {
  std::size_t i = 0;
  Q s = 0;
  Q actual_log = 0;     // log_p of the operator norm of (g + s)^{-1}
  Q predicted_log = 0;  // log C + e log z
  bool ok = true;
};
struct BoundReport {
  std::size_t e = 1;
  Q log_c = 0, log_C = 0, q_a = 0;
  std::vector<BoundRow> rows;
  std::vector<InverseBoundRow> inverse_rows;
  bool ok() const;
};

struct ShearChecks {
  bool equations_all_i = false;
  bool gauge_inverse = false;
  bool round_trip = false;
  bool base_constant = true;
  bool all() const { return equations_all_i && gauge_inverse && round_trip && base_constant; }
};

struct ShearResult {
  MatSeries gauge;          // B with B_0 = I
  MatSeries gauge_inverse;  // B'
  std::vector<QMatrix> constant_model;
  std::vector<Element> order;  // elements processed, in weight order
  BoundReport bound;
  ShearChecks checks;
};

struct ShearOptions {
  bool parallel = false;
  bool check = true;
  unsigned long prime = 5;  // for the bound report
};
ShearResult shear(const LogNablaModule& e, const ShearOptions& opt = {});

// Weight-truncated products and derivations of matrix series on the monoid.
MatSeries mat_series_mul(const FineMonoid& m, const MatSeries& x, const MatSeries& y, std::int64_t truncation);
MatSeries mat_series_derivative(const FineMonoid& m, const Embedding& emb, const MatSeries& x, std::size_t i);
bool mat_series_equal(const MatSeries& x, const MatSeries& y);
// Inverse of a series with invertible constant term on a sharp monoid.
MatSeries mat_series_inverse(const FineMonoid& m, const MatSeries& g, std::int64_t truncation);

// New matrices G'(A G + d_i G) for the basis change e -> e G.
LogNablaModule gauge_transform(const LogNablaModule& e, const MatSeries& g, const MatSeries& ginv);

// Constant module with A^i = model_i + (phi xi)_i id.
LogNablaModule apply_UI(FineMonoid m, Embedding emb, const std::vector<QMatrix>& model,
                        const std::optional<QVector>& xi_twist, IntervalKind interval, std::int64_t truncation);
// E (x) t^x: every A^i shifted by (phi x)_i id.
LogNablaModule twist_by(const LogNablaModule& e, const Element& x);

struct TwistReduction {
  QVector xi;   // reduced exponent, free ambient coordinates
  Element shift;  // group element subtracted
};
TwistReduction twist_reduce(const FineMonoid& m, const Embedding& emb, const QVector& xi, IntervalKind interval);

struct UnipotenceReport {
  bool verdict = false;
  std::vector<QVector> sheared_exponents;    // free ambient coordinates
  std::vector<QVector> projected_exponents;  // in (M/F)^gp (x) Q
  std::vector<std::size_t> filtration_ranks;
  std::optional<Face> offending_face;
};
UnipotenceReport is_sigma_unipotent(const LogNablaModule& e, const ExponentSet& sigma, const Face& face,
                                    const ShearOptions& opt = {});

// t^x -> prod_i prod_{0<|j|<=l} ((phi x)_i - j)/j t^x.
TruncatedSeries dl_constant_term(const Embedding& emb, const TruncatedSeries& f, std::int64_t l);

struct DlSetup {
  std::vector<QMatrix> res;
  ExponentData exps;
  std::size_t target_block = 0;
  std::size_t q = 1;  // common nilpotency bound on the blocks
  std::vector<Poly> Q;
};
// Chooses Q_i: kill the other blocks, then descend inside the target block
// until the image is a joint eigenspace.
DlSetup dl_setup(const std::vector<QMatrix>& res, std::size_t target_block = 0);
DlSetup dl_setup_with(const std::vector<QMatrix>& res, std::vector<Poly> q_polys, std::size_t target_block = 0);
// D_l on a constant module, with d_i acting on t^x w as ((phi x)_i + res_i) w.
VecSeries dl_projection(const FineMonoid& m, const Embedding& emb, const DlSetup& s, const VecSeries& v,
                        std::int64_t l);
QVector dl_limit(const DlSetup& s, const VecSeries& v, std::size_t rank);
bool in_eigenspace(const DlSetup& s, const QVector& w);

// Differential forms: (exponent, wedge mask) -> coefficient.
using FormKey = std::pair<Element, std::uint32_t>;
using Forms = std::map<FormKey, Q>;
struct HomotopyReport {
  bool zero = true;
  std::size_t forms_checked = 0;
  std::vector<std::string> nonzero_terms;
};
Forms nabla_F(const FineMonoid& m, const Embedding& emb, const QVector& eta, const Forms& w);
Forms homotopy_phi(const FineMonoid& m, const Embedding& emb, const QVector& eta, const Forms& w);
// Residual of nabla phi + phi nabla - (id - g1 g2) for F = C_{xi' - xi}.
HomotopyReport homotopy_check(const FineMonoid& m, const Embedding& emb, const QVector& xi, const QVector& xi_prime,
                              const std::vector<Forms>& tests);

struct LogConvergenceRow {
  std::int64_t depth = 0;
  ExtQ worst;  // min over |k| = depth and basis vectors of v(P_k) at a' plus depth q_eta
};
struct LogConvergenceReport {
  bool verdict = true;
  std::vector<LogConvergenceRow> rows;
};
// a' = p^{-qa}, eta = p^{-q_eta} with q_eta > 0.
LogConvergenceReport log_convergence_check(const LogNablaModule& e, const Radius& qa, const Q& q_eta,
                                           std::int64_t depth, unsigned long p);

}  // namespace logmon
