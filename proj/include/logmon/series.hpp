// Weighted monoids: h+/h-/|h| on the group, truncated monoid-graded series
// with exact p-adic Gauss norms, and polyannulus predicates on monomial points.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logmon/monoid.hpp"

namespace logmon {

// Radius p^{-q}; q = +inf is radius 0.
using Radius = ExtQ;

// Generator weights of the default weighting (zero exactly on units).
std::vector<std::int64_t> default_weighting(const FineMonoid& m);

struct HValues {
  std::int64_t plus = 0;
  std::int64_t minus = 0;
  std::int64_t abs() const { return plus + minus; }
  Element witness;  // y in M with y - m in M and h(y) = plus
};

// Caches h+ lookups for one monoid. Not thread-safe; create one per computation.
class HCalculator {
 public:
  explicit HCalculator(FineMonoid m);
  const FineMonoid& monoid() const { return ex_.monoid(); }
  HValues values(const Element& m);
  std::int64_t h_plus(const Element& m) { return values(m).plus; }
  std::int64_t h_minus(const Element& m) { return values(m).minus; }
  std::int64_t h_abs(const Element& m) { return values(m).abs(); }
  Explorer& explorer() { return ex_; }

 private:
  Explorer ex_;
  std::map<Element, HValues> cache_;
};

std::int64_t h_plus(const FineMonoid& m, const Element& x);
std::int64_t h_minus(const FineMonoid& m, const Element& x);
std::int64_t h_abs(const FineMonoid& m, const Element& x);

enum class SeriesKind { Disk, Annulus };
const char* to_string(SeriesKind k);

// Finitely many coefficients c_m t^m, exact for |h|(m) <= truncation.
class TruncatedSeries {
 public:
  TruncatedSeries(FineMonoid m, SeriesKind kind, std::int64_t truncation);
  // Builds a series, dropping terms with |h| above the truncation.
  static TruncatedSeries from_terms(FineMonoid m, SeriesKind kind, std::int64_t truncation,
                                    const std::map<Element, Q>& terms);
  static TruncatedSeries constant(FineMonoid m, SeriesKind kind, std::int64_t truncation, const Q& c);
  static TruncatedSeries monomial(FineMonoid m, SeriesKind kind, std::int64_t truncation, const Element& x,
                                  const Q& c = 1);

  const FineMonoid& monoid() const { return m_; }
  SeriesKind kind() const { return kind_; }
  std::int64_t truncation() const { return trunc_; }
  // Keys are reduced ambient elements; every stored coefficient is non-zero.
  const std::map<Element, Q>& terms() const { return terms_; }
  Q coefficient(const Element& x) const;
  bool is_zero() const { return terms_.empty(); }

  // Adds c t^x when |h|(x) is within the truncation.
  void add_term(HCalculator& hc, const Element& x, const Q& c);

 private:
  FineMonoid m_;
  SeriesKind kind_;
  std::int64_t trunc_;
  std::map<Element, Q> terms_;
};

TruncatedSeries series_add(const TruncatedSeries& f, const TruncatedSeries& g);
TruncatedSeries series_sub(const TruncatedSeries& f, const TruncatedSeries& g);
TruncatedSeries series_scale(const Q& c, const TruncatedSeries& f);
TruncatedSeries series_mul(const TruncatedSeries& f, const TruncatedSeries& g);
// Disk series only: c_0 (1 + g)^{-1} expanded as a geometric series in weight.
TruncatedSeries series_invert(const TruncatedSeries& f);
bool series_equal(const TruncatedSeries& f, const TruncatedSeries& g);

struct NormValue {
  ExtQ valuation;      // -log_p of the norm; +inf for the zero series
  bool stale = false;  // the sup is attained at the truncation frontier
};

// Disk norm sup |c_m| a^{h(m)} with a = p^{-q}, in valuation form.
NormValue gauss_norm(const TruncatedSeries& f, const Radius& q, unsigned long p);
// Annulus norm sup |c_m| a^{-h^-(m)} b^{h^+(m)}, a = p^{-qa}, b = p^{-qb}.
NormValue annulus_norm(const TruncatedSeries& f, const Radius& qa, const Radius& qb, unsigned long p);

// |f|_{a^c b^{1-c}} <= |f|_a^c |f|_b^{1-c} for radii p^{-qa}, p^{-qb} (finite), c in [0,1].
bool log_convex_at(const TruncatedSeries& f, const Q& qa, const Q& qb, const Q& c, unsigned long p);

// Point of A_M given by -log_p |t^g(x)| on each generator g.
struct ValuationPoint {
  std::vector<ExtQ> log_values;
};

ValuationPoint vertex_point(const FineMonoid& m);
// Point with -log_p|t^g| = lambda . g on the free ambient part.
ValuationPoint point_from_functional(const FineMonoid& m, const QVector& lambda);
// The values respect every relation among the generators.
bool is_consistent(const FineMonoid& m, const ValuationPoint& x);
// Value on an arbitrary monoid element via a non-negative decomposition.
ExtQ point_value(Explorer& ex, const ValuationPoint& x, const Element& g);
// Non-negative generator multiplicities summing to g modulo units, if g is in M.
std::optional<std::vector<std::int64_t>> nonneg_decomposition(Explorer& ex, const Element& g);

// a^{h(g)} <= |t^g(x)| <= b^{h(g)} on generators, a = p^{-qa} <= b = p^{-qb}.
bool point_in_polyannulus(const FineMonoid& m, const ValuationPoint& x, const Radius& qa, const Radius& qb);

struct SaturationInvarianceReport {
  bool ok = true;
  std::size_t points_checked = 0;
  std::size_t elements_checked = 0;
  std::int64_t correction_weight = 0;  // h(s) for the correction element s
  std::vector<std::string> failures;
};

// Compares A_M[a,b] with A_{M^sat}[a,b] on the sample points and the h+/h- bounds
// h^{sat,+} <= h^+ <= h^{sat,+} + h(s) on group elements y - z, y, z of weight <= element_bound.
SaturationInvarianceReport saturation_invariance_check(const FineMonoid& m, const Radius& qa, const Radius& qb,
                                                       const std::vector<ValuationPoint>& samples,
                                                       std::int64_t weight_bound, std::int64_t element_bound = 4);

}  // namespace logmon
