#include "logmon/series.hpp"

#include <algorithm>
#include <sstream>

namespace logmon {

std::vector<std::int64_t> default_weighting(const FineMonoid& m) { return m.weights(); }

HCalculator::HCalculator(FineMonoid m) : ex_(std::move(m)) {}

HValues HCalculator::values(const Element& x) {
  Element key = ex_.monoid().ambient().reduce(x);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto [hp, y] = ex_.h_plus(key);
  HValues v;
  v.plus = hp;
  v.minus = hp - ex_.monoid().weight(key);
  v.witness = y;
  cache_.emplace(key, v);
  return v;
}

std::int64_t h_plus(const FineMonoid& m, const Element& x) { return HCalculator(m).h_plus(x); }
std::int64_t h_minus(const FineMonoid& m, const Element& x) { return HCalculator(m).h_minus(x); }
std::int64_t h_abs(const FineMonoid& m, const Element& x) { return HCalculator(m).h_abs(x); }

const char* to_string(SeriesKind k) { return k == SeriesKind::Disk ? "disk" : "annulus"; }

// ------------------------------------------------------------ series

TruncatedSeries::TruncatedSeries(FineMonoid m, SeriesKind kind, std::int64_t truncation)
    : m_(std::move(m)), kind_(kind), trunc_(truncation) {
  if (truncation < 0) fail(ErrorKind::InvalidArgument, "truncation must be non-negative");
}

TruncatedSeries TruncatedSeries::from_terms(FineMonoid m, SeriesKind kind, std::int64_t truncation,
                                            const std::map<Element, Q>& terms) {
  TruncatedSeries s(m, kind, truncation);
  HCalculator hc(std::move(m));
  for (const auto& [x, c] : terms) s.add_term(hc, x, c);
  return s;
}

TruncatedSeries TruncatedSeries::constant(FineMonoid m, SeriesKind kind, std::int64_t truncation, const Q& c) {
  TruncatedSeries s(m, kind, truncation);
  if (c != 0) s.terms_[m.ambient().zero()] = c;
  return s;
}

TruncatedSeries TruncatedSeries::monomial(FineMonoid m, SeriesKind kind, std::int64_t truncation, const Element& x,
                                          const Q& c) {
  return from_terms(m, kind, truncation, {{x, c}});
}

Q TruncatedSeries::coefficient(const Element& x) const {
  auto it = terms_.find(m_.ambient().reduce(x));
  return it == terms_.end() ? Q(0) : it->second;
}

void TruncatedSeries::add_term(HCalculator& hc, const Element& x, const Q& c) {
  if (c == 0) return;
  Element key = m_.ambient().reduce(x);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    HValues v = hc.values(key);
    if (kind_ == SeriesKind::Disk && v.minus > 0)
      fail(ErrorKind::InvalidArgument, "disk series may only contain monoid exponents");
    if (v.abs() > trunc_) return;
    terms_.emplace(key, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

namespace {

void check_compatible(const TruncatedSeries& f, const TruncatedSeries& g) {
  if (f.kind() != g.kind() || !(f.monoid().ambient() == g.monoid().ambient()) ||
      f.monoid().generators() != g.monoid().generators())
    fail(ErrorKind::InvalidArgument, "series live on different rings");
}

// Drops terms above a lower truncation; used when combining different orders.
TruncatedSeries retruncate(const TruncatedSeries& f, std::int64_t t, HCalculator& hc) {
  if (t == f.truncation()) return f;
  TruncatedSeries r(f.monoid(), f.kind(), t);
  for (const auto& [x, c] : f.terms()) r.add_term(hc, x, c);
  return r;
}

}  // namespace

TruncatedSeries series_add(const TruncatedSeries& f, const TruncatedSeries& g) {
  check_compatible(f, g);
  HCalculator hc(f.monoid());
  TruncatedSeries r(f.monoid(), f.kind(), std::min(f.truncation(), g.truncation()));
  for (const auto& [x, c] : f.terms()) r.add_term(hc, x, c);
  for (const auto& [x, c] : g.terms()) r.add_term(hc, x, c);
  return r;
}

TruncatedSeries series_scale(const Q& c, const TruncatedSeries& f) {
  HCalculator hc(f.monoid());
  TruncatedSeries r(f.monoid(), f.kind(), f.truncation());
  for (const auto& [x, v] : f.terms()) r.add_term(hc, x, c * v);
  return r;
}

TruncatedSeries series_sub(const TruncatedSeries& f, const TruncatedSeries& g) {
  return series_add(f, series_scale(-1, g));
}

TruncatedSeries series_mul(const TruncatedSeries& f, const TruncatedSeries& g) {
  check_compatible(f, g);
  HCalculator hc(f.monoid());
  const auto& amb = f.monoid().ambient();
  TruncatedSeries r(f.monoid(), f.kind(), std::min(f.truncation(), g.truncation()));
  for (const auto& [x, c] : f.terms())
    for (const auto& [y, d] : g.terms()) r.add_term(hc, amb.add(x, y), c * d);
  return r;
}

TruncatedSeries series_invert(const TruncatedSeries& f) {
  if (f.kind() != SeriesKind::Disk) fail(ErrorKind::InvalidArgument, "inversion is only supported on disks");
  const FineMonoid& m = f.monoid();
  const Element zero = m.ambient().zero();
  const Q c0 = f.coefficient(zero);
  if (c0 == 0) fail(ErrorKind::NonInvertibleConstantTerm, "constant term vanishes");
  HCalculator hc(m);
  TruncatedSeries g(m, f.kind(), f.truncation());
  for (const auto& [x, c] : f.terms()) {
    if (x == zero) continue;
    if (hc.values(x).plus == 0)
      fail(ErrorKind::NonInvertibleConstantTerm, "series has a unit monomial besides the constant term");
    g.add_term(hc, x, -c / c0);
  }
  TruncatedSeries sum = TruncatedSeries::constant(m, f.kind(), f.truncation(), 1);
  TruncatedSeries power = sum;
  for (std::int64_t k = 1; k <= f.truncation() && !power.is_zero(); ++k) {
    power = series_mul(power, g);
    sum = series_add(sum, power);
  }
  return series_scale(1 / c0, sum);
}

bool series_equal(const TruncatedSeries& f, const TruncatedSeries& g) {
  check_compatible(f, g);
  HCalculator hc(f.monoid());
  const std::int64_t t = std::min(f.truncation(), g.truncation());
  return retruncate(f, t, hc).terms() == retruncate(g, t, hc).terms();
}

// ------------------------------------------------------------ norms

NormValue annulus_norm(const TruncatedSeries& f, const Radius& qa, const Radius& qb, unsigned long p) {
  HCalculator hc(f.monoid());
  NormValue out{ExtQ::inf(), false};
  std::vector<std::pair<ExtQ, std::int64_t>> vals;
  for (const auto& [x, c] : f.terms()) {
    HValues h = hc.values(x);
    ExtQ v = vp(c, p) + scale(Q(static_cast<long>(h.plus)), qb);
    if (h.minus > 0) {
      if (qa.infinite) fail(ErrorKind::InvalidArgument, "annulus norm needs a positive inner radius");
      v = v + ExtQ::of(-qa.value * h.minus);
    }
    vals.emplace_back(v, h.abs());
    out.valuation = min(out.valuation, v);
  }
  for (const auto& [v, habs] : vals)
    if (v == out.valuation && habs == f.truncation()) out.stale = true;
  return out;
}

NormValue gauss_norm(const TruncatedSeries& f, const Radius& q, unsigned long p) { return annulus_norm(f, q, q, p); }

bool log_convex_at(const TruncatedSeries& f, const Q& qa, const Q& qb, const Q& c, unsigned long p) {
  if (c < 0 || c > 1) fail(ErrorKind::InvalidArgument, "convexity parameter must lie in [0,1]");
  if (f.is_zero()) return true;
  ExtQ va = gauss_norm(f, ExtQ::of(qa), p).valuation;
  ExtQ vb = gauss_norm(f, ExtQ::of(qb), p).valuation;
  ExtQ vc = gauss_norm(f, ExtQ::of(c * qa + (1 - c) * qb), p).valuation;
  return vc >= scale(c, va) + scale(1 - c, vb);
}

// ------------------------------------------------------------ points

ValuationPoint vertex_point(const FineMonoid& m) {
  ValuationPoint x;
  for (std::size_t i = 0; i < m.size(); ++i) x.log_values.push_back(m.unit_generators()[i] ? ExtQ::of(0) : ExtQ::inf());
  return x;
}

ValuationPoint point_from_functional(const FineMonoid& m, const QVector& lambda) {
  if (lambda.size() != m.ambient().free_rank) fail(ErrorKind::InvalidArgument, "functional has wrong length");
  ValuationPoint x;
  for (const auto& g : m.generators()) {
    QVector v = m.ambient().free_part(g);
    Q s = 0;
    for (std::size_t r = 0; r < v.size(); ++r) s += lambda[r] * v[r];
    x.log_values.push_back(ExtQ::of(s));
  }
  return x;
}

bool is_consistent(const FineMonoid& m, const ValuationPoint& x) {
  if (x.log_values.size() != m.size()) return false;
  const ZMatrix& L = m.relation_lattice();
  for (std::size_t j = 0; j < L.cols; ++j) {
    ExtQ pos = ExtQ::of(0), neg = ExtQ::of(0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (L(i, j) > 0) pos = pos + scale(Q(L(i, j)), x.log_values[i]);
      if (L(i, j) < 0) neg = neg + scale(Q(-L(i, j)), x.log_values[i]);
    }
    if (pos != neg) return false;
  }
  return true;
}

std::optional<std::vector<std::int64_t>> nonneg_decomposition(Explorer& ex, const Element& g) {
  const FineMonoid& m = ex.monoid();
  if (!ex.contains(g)) return std::nullopt;
  std::vector<std::int64_t> a(m.size(), 0);
  Element cur = m.ambient().reduce(g);
  std::int64_t h = m.weight(cur);
  while (h > 0) {
    bool stepped = false;
    for (std::size_t i = 0; i < m.size() && !stepped; ++i) {
      const std::int64_t wi = m.weights()[i];
      if (m.unit_generators()[i] || wi > h) continue;
      Element next = m.ambient().sub(cur, m.generators()[i]);
      if (ex.contains(next)) {
        ++a[i];
        cur = next;
        h -= wi;
        stepped = true;
      }
    }
    if (!stepped) fail(ErrorKind::InvalidArgument, "membership and decomposition disagree");
  }
  return a;
}

ExtQ point_value(Explorer& ex, const ValuationPoint& x, const Element& g) {
  auto a = nonneg_decomposition(ex, g);
  if (!a) fail(ErrorKind::InvalidArgument, "point values are only defined on monoid elements");
  ExtQ v = ExtQ::of(0);
  for (std::size_t i = 0; i < a->size(); ++i)
    if ((*a)[i] > 0) v = v + scale(Q(static_cast<long>((*a)[i])), x.log_values[i]);
  return v;
}

bool point_in_polyannulus(const FineMonoid& m, const ValuationPoint& x, const Radius& qa, const Radius& qb) {
  if (qa < qb) fail(ErrorKind::InvalidArgument, "interval must satisfy a <= b");
  if (x.log_values.size() != m.size()) fail(ErrorKind::InvalidArgument, "point has wrong number of values");
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Q h(static_cast<long>(m.weights()[i]));
    const ExtQ& v = x.log_values[i];
    if (v > scale(h, qa) || v < scale(h, qb)) return false;
  }
  return true;
}

// ------------------------------------------------------------ saturation invariance

SaturationInvarianceReport saturation_invariance_check(const FineMonoid& m, const Radius& qa, const Radius& qb,
                                                       const std::vector<ValuationPoint>& samples,
                                                       std::int64_t weight_bound, std::int64_t element_bound) {
  if (qa.infinite || qa < qb) fail(ErrorKind::InvalidArgument, "need 0 < a <= b");
  SaturationResult sat = saturation_bounded(m, weight_bound);
  if (!sat.complete) fail(ErrorKind::SaturationIncomplete, "saturation search did not stabilise below the bound");
  const FineMonoid& ms = sat.saturation;
  const AmbientGroup& amb = m.ambient();
  SaturationInvarianceReport rep;

  Explorer exm(m);
  HCalculator hm(m), hs(ms);
  std::vector<std::int64_t> nmult(ms.size(), 1);
  Element s = amb.zero();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const Element& g = ms.generators()[i];
    std::int64_t n = 1;
    while (!exm.contains(amb.scale(n, g))) {
      if (++n > weight_bound) fail(ErrorKind::SaturationIncomplete, "no multiple of a generator lies in the monoid");
    }
    nmult[i] = n;
    Element mprime = hm.values(amb.neg(g)).witness;
    s = amb.add(s, amb.scale(n - 1, mprime));
  }
  rep.correction_weight = m.weight(s);

  for (const auto& x : samples) {
    if (!is_consistent(m, x)) fail(ErrorKind::InvalidArgument, "sample point violates a monoid relation");
    ValuationPoint xs;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      ExtQ v = point_value(exm, x, amb.scale(nmult[i], ms.generators()[i]));
      xs.log_values.push_back(scale(Q(1, nmult[i]), v));
    }
    bool in_m = point_in_polyannulus(m, x, qa, qb);
    bool in_s = point_in_polyannulus(ms, xs, qa, qb);
    ++rep.points_checked;
    if (in_m != in_s) {
      rep.ok = false;
      std::ostringstream os;
      os << "point " << rep.points_checked - 1 << ": membership " << in_m << " vs " << in_s;
      rep.failures.push_back(os.str());
    }
  }

  auto elems = exm.elements_up_to(element_bound);
  for (const auto& y : elems)
    for (const auto& z : elems) {
      Element d = amb.sub(y, z);
      HValues a = hm.values(d), b = hs.values(d);
      ++rep.elements_checked;
      bool ok = b.plus <= a.plus && a.plus <= b.plus + rep.correction_weight && b.minus <= a.minus &&
                a.minus <= b.minus + rep.correction_weight;
      if (!ok) {
        rep.ok = false;
        std::ostringstream os;
        os << "h bounds fail at a difference of weight " << m.weight(d);
        rep.failures.push_back(os.str());
      }
    }
  return rep;
}

}  // namespace logmon
