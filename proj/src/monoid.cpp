#include "logmon/monoid.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "logmon/lp.hpp"

namespace logmon {

std::int64_t to_i64(const Z& z) {
  if (!z.fits_slong_p()) fail(ErrorKind::BudgetExceeded, "integer coordinate exceeds 64 bits");
  return z.get_si();
}

// ------------------------------------------------------------ AmbientGroup

namespace {
std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}
std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::BudgetExceeded, "coordinate overflow");
  return r;
}
std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::BudgetExceeded, "coordinate overflow");
  return r;
}
}  // namespace

void AmbientGroup::check(const Element& x) const {
  if (x.size() != dim()) fail(ErrorKind::InvalidArgument, "element has wrong number of coordinates");
}

Element AmbientGroup::reduce(Element x) const {
  check(x);
  for (std::size_t j = 0; j < torsion.size(); ++j) x[free_rank + j] = mod_pos(x[free_rank + j], torsion[j]);
  return x;
}

Element AmbientGroup::add(const Element& x, const Element& y) const {
  check(x);
  check(y);
  Element r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = checked_add(x[i], y[i]);
  return reduce(std::move(r));
}

Element AmbientGroup::neg(const Element& x) const { return scale(-1, x); }

Element AmbientGroup::sub(const Element& x, const Element& y) const { return add(x, neg(y)); }

Element AmbientGroup::scale(std::int64_t c, const Element& x) const {
  check(x);
  Element r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = checked_mul(c, x[i]);
  return reduce(std::move(r));
}

QVector AmbientGroup::free_part(const Element& x) const {
  check(x);
  QVector v(free_rank);
  for (std::size_t i = 0; i < free_rank; ++i) v[i] = Q(static_cast<long>(x[i]));
  return v;
}

const char* to_string(Tri t) {
  switch (t) {
    case Tri::False: return "false";
    case Tri::True: return "true";
    case Tri::Unknown: return "unknown";
  }
  return "unknown";
}

// ------------------------------------------------------------ lattice quotients

namespace {

// Z^n modulo the span of the columns of R, with canonical coordinates.
struct LatticeQuotient {
  std::size_t n = 0;
  Smith s;
  std::vector<std::size_t> free_rows, tors_rows;
  std::vector<std::int64_t> moduli;
  AbelianGroup group;

  static LatticeQuotient of(std::size_t n, const ZMatrix& R) {
    LatticeQuotient q;
    q.n = n;
    q.s = smith(R);
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= q.s.rank) {
        q.free_rows.push_back(i);
      } else if (q.s.diag(i) > 1) {
        q.tors_rows.push_back(i);
        q.moduli.push_back(to_i64(q.s.diag(i)));
      }
    }
    q.group.free_rank = q.free_rows.size();
    q.group.torsion_invariants = q.moduli;
    return q;
  }

  Element canon(const std::vector<Z>& c) const {
    Element out;
    auto row = [&](std::size_t i) {
      Z y = 0;
      for (std::size_t j = 0; j < n; ++j) y += s.U(i, j) * c[j];
      return y;
    };
    for (auto i : free_rows) out.push_back(to_i64(row(i)));
    for (std::size_t t = 0; t < tors_rows.size(); ++t) {
      Z y = row(tors_rows[t]);
      Z r;
      mpz_fdiv_r(r.get_mpz_t(), y.get_mpz_t(), s.D(tors_rows[t], tors_rows[t]).get_mpz_t());
      out.push_back(to_i64(r));
    }
    return out;
  }

  std::vector<Z> lift(const Element& y) const {
    std::vector<Z> full(n, Z(0));
    std::size_t k = 0;
    for (auto i : free_rows) full[i] = Z(static_cast<long>(y[k++]));
    for (auto i : tors_rows) full[i] = Z(static_cast<long>(y[k++]));
    std::vector<Z> c(n, Z(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[i] += s.Uinv(i, j) * full[j];
    return c;
  }

  Element unit_vector_image(std::size_t i) const {
    std::vector<Z> e(n, Z(0));
    e[i] = 1;
    return canon(e);
  }
};

ZMatrix concat_columns(const ZMatrix& a, const std::vector<std::vector<Z>>& extra, std::size_t n) {
  ZMatrix r(n, a.cols + extra.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) r(i, j) = a(i, j);
    for (std::size_t j = 0; j < extra.size(); ++j) r(i, a.cols + j) = extra[j][i];
  }
  return r;
}

}  // namespace

// ------------------------------------------------------------ FineMonoid

struct FineMonoid::Impl {
  AmbientGroup ambient;
  std::vector<Element> gens;
  std::size_t n = 0;
  Smith pres;
  ZMatrix L;
  LatticeQuotient gpq;
  AbelianGroup gp;
  std::vector<bool> units;
  bool sharp = true;
  std::vector<std::int64_t> weights;
  LatticeQuotient unitq;
  QMatrix gfree;
};

namespace {

bool is_unit_generator(const QMatrix& gfree, std::size_t i) {
  // Some non-negative combination with c_i = 1 sums to zero in the free part;
  // torsion is cleared by scaling.
  LinearProgram lp;
  lp.nvars = gfree.cols;
  for (std::size_t r = 0; r < gfree.rows; ++r) {
    LpRow row;
    row.a = QVector(gfree.cols);
    for (std::size_t j = 0; j < gfree.cols; ++j) row.a[j] = gfree(r, j);
    row.op = LpRow::EQ;
    row.b = 0;
    lp.rows.push_back(row);
  }
  LpRow fix;
  fix.a = QVector(gfree.cols, Q(0));
  fix.a[i] = 1;
  fix.op = LpRow::EQ;
  fix.b = 1;
  lp.rows.push_back(fix);
  return solve_lp(lp).status == LpStatus::Optimal;
}

// Linear functional on the free ambient part, zero on units and >= 1 on other
// generators, minimising the total generator weight; scaled to be integral.
std::vector<std::int64_t> default_weights(const QMatrix& gfree, const std::vector<bool>& units) {
  const std::size_t k = gfree.rows, n = gfree.cols;
  LinearProgram lp;
  lp.nvars = k;
  lp.free_var.assign(k, true);
  lp.objective.assign(k, Q(0));
  for (std::size_t i = 0; i < n; ++i) {
    LpRow row;
    row.a = QVector(k);
    for (std::size_t r = 0; r < k; ++r) row.a[r] = gfree(r, i);
    row.op = units[i] ? LpRow::EQ : LpRow::GE;
    row.b = units[i] ? 0 : 1;
    lp.rows.push_back(row);
    if (!units[i])
      for (std::size_t r = 0; r < k; ++r) lp.objective[r] += gfree(r, i);
  }
  LpResult res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) fail(ErrorKind::NoPositiveFunctional, "no functional positive off the units");
  Z l = lcm_den(res.x);
  std::vector<std::int64_t> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    Q v = 0;
    for (std::size_t r = 0; r < k; ++r) v += res.x[r] * Q(l) * gfree(r, i);
    w[i] = to_i64(v.get_num());
  }
  return w;
}

std::shared_ptr<FineMonoid::Impl> build_impl(AmbientGroup ambient, std::vector<Element> gens) {
  auto impl = std::make_shared<FineMonoid::Impl>();
  for (auto t : ambient.torsion)
    if (t < 2) fail(ErrorKind::InvalidArgument, "torsion moduli must be >= 2");
  for (auto& g : gens) g = ambient.reduce(g);
  const std::size_t k = ambient.free_rank, t = ambient.torsion.size(), n = gens.size();
  ZMatrix A(k + t, n + t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < k + t; ++r) A(r, i) = Z(static_cast<long>(gens[i][r]));
  for (std::size_t j = 0; j < t; ++j) A(k + j, n + j) = Z(static_cast<long>(ambient.torsion[j]));
  impl->pres = smith(A);
  ZMatrix K = integer_kernel(impl->pres);
  impl->L = ZMatrix(n, K.cols);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < K.cols; ++j) impl->L(i, j) = K(i, j);
  impl->gpq = LatticeQuotient::of(n, impl->L);
  impl->gp = impl->gpq.group;
  impl->gfree = QMatrix(k, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < k; ++r) impl->gfree(r, i) = Q(static_cast<long>(gens[i][r]));
  impl->units.assign(n, false);
  std::vector<std::vector<Z>> unit_cols;
  for (std::size_t i = 0; i < n; ++i) {
    impl->units[i] = is_unit_generator(impl->gfree, i);
    if (impl->units[i]) {
      impl->sharp = false;
      std::vector<Z> e(n, Z(0));
      e[i] = 1;
      unit_cols.push_back(e);
    }
  }
  impl->unitq = LatticeQuotient::of(n, concat_columns(impl->L, unit_cols, n));
  impl->ambient = std::move(ambient);
  impl->gens = std::move(gens);
  impl->n = n;
  impl->weights = default_weights(impl->gfree, impl->units);
  return impl;
}

}  // namespace

FineMonoid FineMonoid::from_generators(AmbientGroup ambient, std::vector<Element> generators) {
  for (const auto& g : generators) ambient.check(g);
  return FineMonoid(build_impl(std::move(ambient), std::move(generators)));
}

FineMonoid FineMonoid::from_presentation(std::size_t n, const std::vector<Relation>& relations) {
  ZMatrix R(n, relations.size());
  for (std::size_t j = 0; j < relations.size(); ++j) {
    const auto& [u, v] = relations[j];
    if (u.size() != n || v.size() != n) fail(ErrorKind::InvalidArgument, "relation has wrong length");
    for (std::size_t i = 0; i < n; ++i) {
      if (u[i] < 0 || v[i] < 0) fail(ErrorKind::InvalidArgument, "relations must be non-negative vectors");
      R(i, j) = Z(static_cast<long>(u[i] - v[i]));
    }
  }
  LatticeQuotient q = LatticeQuotient::of(n, R);
  std::vector<Element> gens;
  for (std::size_t i = 0; i < n; ++i) gens.push_back(q.unit_vector_image(i));
  return from_generators(AmbientGroup::of(q.group), std::move(gens));
}

FineMonoid FineMonoid::with_weighting(std::vector<std::int64_t> w) const {
  if (w.size() != impl_->n) fail(ErrorKind::InvalidArgument, "weighting has wrong length");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0) fail(ErrorKind::InvalidArgument, "weights must be non-negative");
    if ((w[i] == 0) != impl_->units[i])
      fail(ErrorKind::InvalidArgument, "weight must vanish exactly on units");
  }
  for (std::size_t j = 0; j < impl_->L.cols; ++j) {
    Z s = 0;
    for (std::size_t i = 0; i < impl_->n; ++i) s += impl_->L(i, j) * w[i];
    if (s != 0) fail(ErrorKind::InvalidArgument, "weighting does not extend to a homomorphism");
  }
  auto copy = std::make_shared<Impl>(*impl_);
  copy->weights = std::move(w);
  return FineMonoid(copy);
}

const AmbientGroup& FineMonoid::ambient() const { return impl_->ambient; }
const std::vector<Element>& FineMonoid::generators() const { return impl_->gens; }
std::size_t FineMonoid::size() const { return impl_->n; }
const AbelianGroup& FineMonoid::gp() const { return impl_->gp; }
const std::vector<std::int64_t>& FineMonoid::weights() const { return impl_->weights; }
const std::vector<bool>& FineMonoid::unit_generators() const { return impl_->units; }
bool FineMonoid::is_sharp() const { return impl_->sharp; }
const ZMatrix& FineMonoid::relation_lattice() const { return impl_->L; }
QMatrix FineMonoid::free_generator_matrix() const { return impl_->gfree; }

std::optional<std::vector<Z>> FineMonoid::coefficients(const Element& x) const {
  impl_->ambient.check(x);
  Element xr = impl_->ambient.reduce(x);
  std::vector<Z> b(xr.size());
  for (std::size_t i = 0; i < xr.size(); ++i) b[i] = Z(static_cast<long>(xr[i]));
  auto z = solve_integer(impl_->pres, b);
  if (!z) return std::nullopt;
  z->resize(impl_->n);
  return z;
}

bool FineMonoid::in_gp(const Element& x) const { return coefficients(x).has_value(); }

std::int64_t FineMonoid::weight(const Element& x) const {
  auto c = coefficients(x);
  if (!c) fail(ErrorKind::NotInGroupSpan, "element is not in the group generated by the monoid");
  Z s = 0;
  for (std::size_t i = 0; i < impl_->n; ++i) s += (*c)[i] * impl_->weights[i];
  return to_i64(s);
}

std::optional<QVector> FineMonoid::rational_coefficients(const QVector& xi) const {
  if (xi.size() != impl_->ambient.free_rank) fail(ErrorKind::InvalidArgument, "rational vector has wrong length");
  auto sol = solve(impl_->gfree, column(xi));
  if (!sol) return std::nullopt;
  return column_of(*sol, 0);
}

Q FineMonoid::weight_q(const QVector& xi) const {
  auto c = rational_coefficients(xi);
  if (!c) fail(ErrorKind::NotInGroupSpan, "vector is not in the rational span of the monoid");
  Q s = 0;
  for (std::size_t i = 0; i < impl_->n; ++i) s += (*c)[i] * Q(static_cast<long>(impl_->weights[i]));
  return s;
}

Element FineMonoid::gp_coordinates(const Element& x) const {
  auto c = coefficients(x);
  if (!c) fail(ErrorKind::NotInGroupSpan, "element is not in the group generated by the monoid");
  return impl_->gpq.canon(*c);
}

Element FineMonoid::gp_coordinates_of(const std::vector<Z>& coeffs) const { return impl_->gpq.canon(coeffs); }

Element FineMonoid::from_gp_coordinates(const Element& y) const {
  if (y.size() != impl_->gp.free_rank + impl_->gp.torsion_invariants.size())
    fail(ErrorKind::InvalidArgument, "group coordinates have wrong length");
  std::vector<Z> c = impl_->gpq.lift(y);
  Element x = impl_->ambient.zero();
  for (std::size_t i = 0; i < impl_->n; ++i)
    x = impl_->ambient.add(x, impl_->ambient.scale(to_i64(c[i]), impl_->gens[i]));
  return x;
}

// ------------------------------------------------------------ Explorer

Explorer::Explorer(FineMonoid m, std::size_t element_cap) : m_(std::move(m)), cap_(element_cap) {
  const auto& q = m_.impl_->unitq;
  for (std::size_t i = 0; i < m_.size(); ++i) gen_keys_.push_back(q.unit_vector_image(i));
}

Element Explorer::add_keys(const Element& a, const Element& b) const {
  const auto& q = m_.impl_->unitq;
  Element r(a.size());
  const std::size_t f = q.free_rows.size();
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_add(a[i], b[i]);
  for (std::size_t t = 0; t < q.moduli.size(); ++t) r[f + t] = mod_pos(r[f + t], q.moduli[t]);
  return r;
}

Element Explorer::sub_keys(const Element& a, const Element& b) const {
  Element nb(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) nb[i] = -b[i];
  return add_keys(a, nb);
}

Element Explorer::key(const Element& x) const {
  auto c = m_.coefficients(x);
  if (!c) fail(ErrorKind::NotInGroupSpan, "element is not in the group generated by the monoid");
  return m_.impl_->unitq.canon(*c);
}

const std::map<Element, Element>& Explorer::level(std::int64_t w) {
  static const std::map<Element, Element> empty;
  if (w < 0) return empty;
  const auto& impl = *m_.impl_;
  while (static_cast<std::int64_t>(levels_.size()) <= w) {
    const std::int64_t v = static_cast<std::int64_t>(levels_.size());
    std::map<Element, Element> cur;
    if (v == 0) {
      const auto& q = impl.unitq;
      cur.emplace(Element(q.free_rows.size() + q.moduli.size(), 0), impl.ambient.zero());
    } else {
      for (std::size_t i = 0; i < impl.n; ++i) {
        const std::int64_t wi = impl.weights[i];
        if (impl.units[i] || wi <= 0 || wi > v) continue;
        for (const auto& [k, rep] : levels_[static_cast<std::size_t>(v - wi)])
          cur.emplace(add_keys(k, gen_keys_[i]), impl.ambient.add(rep, impl.gens[i]));
      }
    }
    count_ += cur.size();
    if (count_ > cap_) fail(ErrorKind::BudgetExceeded, "monoid enumeration exceeded its element cap");
    levels_.push_back(std::move(cur));
  }
  return levels_[static_cast<std::size_t>(w)];
}

bool Explorer::contains(const Element& x) {
  auto c = m_.coefficients(x);
  if (!c) return false;
  Z s = 0;
  for (std::size_t i = 0; i < m_.size(); ++i) s += (*c)[i] * m_.weights()[i];
  std::int64_t w = to_i64(s);
  if (w < 0) return false;
  return level(w).count(m_.impl_->unitq.canon(*c)) > 0;
}

std::pair<std::int64_t, Element> Explorer::h_plus(const Element& m) {
  auto c = m_.coefficients(m);
  if (!c) fail(ErrorKind::NotInGroupSpan, "element is not in the group generated by the monoid");
  const auto& impl = *m_.impl_;
  Z upper = 0, hm = 0;
  for (std::size_t i = 0; i < impl.n; ++i) {
    hm += (*c)[i] * impl.weights[i];
    if ((*c)[i] > 0) upper += (*c)[i] * impl.weights[i];
  }
  const std::int64_t h = to_i64(hm), ub = to_i64(upper);
  const Element km = impl.unitq.canon(*c);
  for (std::int64_t w = std::max<std::int64_t>(0, h); w <= ub; ++w) {
    // Copy: level() may grow the cache and invalidate references.
    const auto lw = level(w);
    const auto& lower = level(w - h);
    for (const auto& [k, rep] : lw)
      if (lower.count(sub_keys(k, km))) return {w, rep};
  }
  fail(ErrorKind::NotInGroupSpan, "no decomposition found below the seeded bound");
}

std::vector<Element> Explorer::elements_up_to(std::int64_t w) {
  std::vector<Element> out;
  for (std::int64_t v = 0; v <= w; ++v) {
    std::vector<Element> lv;
    for (const auto& [k, rep] : level(v)) lv.push_back(rep);
    std::sort(lv.begin(), lv.end());
    out.insert(out.end(), lv.begin(), lv.end());
  }
  return out;
}

bool membership(const FineMonoid& m, const Element& g) {
  Explorer ex(m);
  return ex.contains(g);
}

bool divides(const FineMonoid& m, const Element& a, const Element& b) {
  return membership(m, m.ambient().sub(b, a));
}

std::vector<Element> units(const FineMonoid& m) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.unit_generators()[i]) out.push_back(m.generators()[i]);
  return out;
}

// ------------------------------------------------------------ homomorphisms

MonoidHom::MonoidHom(FineMonoid source, FineMonoid target, std::vector<Element> images)
    : src_(std::move(source)), tgt_(std::move(target)), images_(std::move(images)) {
  if (images_.size() != src_.size()) fail(ErrorKind::InvalidArgument, "one image per source generator required");
  for (auto& im : images_) im = tgt_.ambient().reduce(im);
  const ZMatrix& L = src_.relation_lattice();
  for (std::size_t j = 0; j < L.cols; ++j) {
    Element s = tgt_.ambient().zero();
    for (std::size_t i = 0; i < src_.size(); ++i)
      s = tgt_.ambient().add(s, tgt_.ambient().scale(to_i64(L(i, j)), images_[i]));
    if (s != tgt_.ambient().zero()) fail(ErrorKind::InvalidArgument, "images do not respect the source relations");
  }
  Explorer ex(tgt_);
  for (const auto& im : images_)
    if (!ex.contains(im)) fail(ErrorKind::InvalidArgument, "image of a generator is not in the target monoid");
}

Element MonoidHom::apply(const Element& x) const {
  auto c = src_.coefficients(x);
  if (!c) fail(ErrorKind::NotInGroupSpan, "element is not in the source group");
  Element r = tgt_.ambient().zero();
  for (std::size_t i = 0; i < src_.size(); ++i)
    r = tgt_.ambient().add(r, tgt_.ambient().scale(to_i64((*c)[i]), images_[i]));
  return r;
}

// ------------------------------------------------------------ faces and quotients

std::vector<Element> face_generators(const FineMonoid& m, const Face& f) {
  std::vector<Element> out;
  for (auto i : f.generators) out.push_back(m.generators()[i]);
  return out;
}

namespace {

// S spans a face iff some functional vanishes on S and is positive on every
// other generator (faces of a fine monoid match faces of its rational cone).
bool supports_face(const QMatrix& gfree, const std::vector<bool>& in_s) {
  LinearProgram lp;
  lp.nvars = gfree.rows;
  lp.free_var.assign(gfree.rows, true);
  for (std::size_t i = 0; i < gfree.cols; ++i) {
    LpRow row;
    row.a = QVector(gfree.rows);
    for (std::size_t r = 0; r < gfree.rows; ++r) row.a[r] = gfree(r, i);
    row.op = in_s[i] ? LpRow::EQ : LpRow::GE;
    row.b = in_s[i] ? 0 : 1;
    lp.rows.push_back(row);
  }
  return solve_lp(lp).status == LpStatus::Optimal;
}

}  // namespace

std::vector<Face> faces(const FineMonoid& m, std::size_t generator_cap) {
  const std::size_t n = m.size();
  if (n > generator_cap) fail(ErrorKind::BudgetExceeded, "face enumeration exceeds the generator cap");
  const QMatrix g = m.free_generator_matrix();
  std::vector<Face> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<bool> in_s(n);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      in_s[i] = (mask >> i) & 1;
      if (m.unit_generators()[i] && !in_s[i]) ok = false;
    }
    if (!ok || !supports_face(g, in_s)) continue;
    Face f;
    for (std::size_t i = 0; i < n; ++i)
      if (in_s[i]) f.generators.push_back(i);
    out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const Face& a, const Face& b) {
    if (a.generators.size() != b.generators.size()) return a.generators.size() < b.generators.size();
    return a.generators < b.generators;
  });
  return out;
}

std::vector<Face> facets(const FineMonoid& m, std::size_t generator_cap) {
  auto all = faces(m, generator_cap);
  std::vector<Face> out;
  auto subset = [](const Face& a, const Face& b) {
    return std::includes(b.generators.begin(), b.generators.end(), a.generators.begin(), a.generators.end());
  };
  for (const auto& f : all) {
    if (f.generators.size() == m.size()) continue;
    bool maximal = true;
    for (const auto& g : all)
      if (g.generators.size() != m.size() && g.generators.size() > f.generators.size() && subset(f, g))
        maximal = false;
    if (maximal) out.push_back(f);
  }
  return out;
}

GroupQuotient quotient_group(const FineMonoid& m, const std::vector<Element>& sub) {
  std::vector<std::vector<Z>> cols;
  for (const auto& x : sub) {
    auto c = m.coefficients(x);
    if (!c) fail(ErrorKind::NotInGroupSpan, "quotient element is not in the group");
    cols.push_back(*c);
  }
  LatticeQuotient q = LatticeQuotient::of(m.size(), concat_columns(m.relation_lattice(), cols, m.size()));
  GroupQuotient out;
  out.group = q.group;
  for (std::size_t i = 0; i < m.size(); ++i) out.generator_images.push_back(q.unit_vector_image(i));
  return out;
}

std::pair<FineMonoid, MonoidHom> quotient(const FineMonoid& m, const std::vector<Element>& sub) {
  Explorer ex(m);
  for (const auto& x : sub)
    if (!ex.contains(x)) fail(ErrorKind::NotSubmonoid, "quotient element is not in the monoid");
  GroupQuotient gq = quotient_group(m, sub);
  // Images of N are zero; keep them out of the generator list so the quotient of M by its units is sharp.
  const AmbientGroup amb = AmbientGroup::of(gq.group);
  std::vector<Element> gens;
  for (const auto& g : gq.generator_images)
    if (g != amb.zero() && std::find(gens.begin(), gens.end(), g) == gens.end()) gens.push_back(g);
  FineMonoid q = FineMonoid::from_generators(amb, gens);
  return {q, MonoidHom(m, q, gq.generator_images)};
}

std::pair<FineMonoid, MonoidHom> sharp_quotient(const FineMonoid& m) { return quotient(m, units(m)); }

FineMonoid localize(const FineMonoid& m, const Face& f) {
  std::vector<Element> gens = m.generators();
  for (auto i : f.generators) gens.push_back(m.ambient().neg(m.generators()[i]));
  return FineMonoid::from_generators(m.ambient(), gens);
}

bool is_semi_saturated(const FineMonoid& m) {
  for (const auto& f : faces(m))
    if (!quotient_group(m, face_generators(m, f)).group.torsion_free()) return false;
  return true;
}

// ------------------------------------------------------------ saturation

namespace {

bool in_rational_cone(const QMatrix& gens, const QVector& x) {
  LinearProgram lp;
  lp.nvars = gens.cols;
  for (std::size_t r = 0; r < gens.rows; ++r) {
    LpRow row;
    row.a = QVector(gens.cols);
    for (std::size_t j = 0; j < gens.cols; ++j) row.a[j] = gens(r, j);
    row.op = LpRow::EQ;
    row.b = x[r];
    lp.rows.push_back(row);
  }
  return solve_lp(lp).status == LpStatus::Optimal;
}

}  // namespace

SaturationResult saturation_bounded(const FineMonoid& m, std::int64_t bound) {
  if (!m.is_sharp()) fail(ErrorKind::InvalidArgument, "saturation search requires a sharp monoid");
  const std::size_t n = m.size();
  const AbelianGroup& gp = m.gp();
  const std::size_t f = gp.free_rank;
  std::vector<Element> y(n);
  QMatrix yfree(f, n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = m.gp_coordinates(m.generators()[i]);
    for (std::size_t r = 0; r < f; ++r) yfree(r, i) = Q(static_cast<long>(y[i][r]));
  }
  // Weight functional on canonical free coordinates.
  QMatrix wrow(1, n);
  for (std::size_t i = 0; i < n; ++i) wrow(0, i) = Q(static_cast<long>(m.weights()[i]));
  auto mu = solve(transpose(yfree), transpose(wrow));
  if (!mu) fail(ErrorKind::InvalidArgument, "weighting is not linear on the group");
  std::vector<std::int64_t> box(f, 0);
  for (std::size_t r = 0; r < f; ++r) {
    Q b = 0;
    for (std::size_t i = 0; i < n; ++i)
      b += Q(bound, m.weights()[i]) * Q(static_cast<long>(std::llabs(y[i][r])));
    box[r] = to_i64(floor_q(b).get_num());
  }
  std::size_t total = 1;
  for (std::size_t r = 0; r < f; ++r) {
    total *= static_cast<std::size_t>(2 * box[r] + 1);
    if (total > 5000000) fail(ErrorKind::BudgetExceeded, "saturation search box too large");
  }
  for (auto d : gp.torsion_invariants) total *= static_cast<std::size_t>(d);
  if (total > 5000000) fail(ErrorKind::BudgetExceeded, "saturation search box too large");

  Explorer ex(m);
  SaturationResult res{m, false, {}};
  bool unresolved = false;
  Element cur(f + gp.torsion_invariants.size(), 0);
  for (std::size_t r = 0; r < f; ++r) cur[r] = -box[r];
  const std::size_t dims = cur.size();
  std::vector<std::int64_t> lo(dims), hi(dims);
  for (std::size_t r = 0; r < f; ++r) {
    lo[r] = -box[r];
    hi[r] = box[r];
  }
  for (std::size_t t = 0; t < gp.torsion_invariants.size(); ++t) {
    lo[f + t] = 0;
    hi[f + t] = gp.torsion_invariants[t] - 1;
  }
  for (std::size_t d = 0; d < dims; ++d) cur[d] = lo[d];
  bool done = dims == 0;
  std::vector<Element> extra;
  while (!done) {
    QVector xf(f);
    for (std::size_t r = 0; r < f; ++r) xf[r] = Q(static_cast<long>(cur[r]));
    Q hx = 0;
    for (std::size_t r = 0; r < f; ++r) hx += (*mu)(r, 0) * xf[r];
    if (hx >= 0 && hx <= bound) {
      Element amb = m.from_gp_coordinates(cur);
      if (!ex.contains(amb) && in_rational_cone(yfree, xf)) {
        std::int64_t found = 0;
        for (std::int64_t k = 2; k <= bound && !found; ++k)
          if (ex.contains(m.ambient().scale(k, amb))) found = k;
        if (found) {
          res.witnesses.push_back({amb, found});
          extra.push_back(amb);
        } else {
          unresolved = true;
        }
      }
    }
    std::size_t d = 0;
    while (d < dims) {
      if (cur[d] < hi[d]) {
        ++cur[d];
        break;
      }
      cur[d] = lo[d];
      ++d;
    }
    if (d == dims) done = true;
  }
  std::int64_t total_weight = 0;
  for (auto w : m.weights()) total_weight += w;
  // Every element of the saturation is a generator sum plus a lattice point of
  // the half-open zonotope, whose weights stay below the total generator weight.
  res.complete = !unresolved && bound >= total_weight;
  if (!extra.empty()) {
    std::sort(res.witnesses.begin(), res.witnesses.end(),
              [&](const SaturationWitness& a, const SaturationWitness& b) {
                auto wa = m.weight(a.g), wb = m.weight(b.g);
                return wa != wb ? wa < wb : a.g < b.g;
              });
    std::vector<Element> gens = m.generators();
    std::vector<std::int64_t> w = m.weights();
    for (const auto& wt : res.witnesses) {
      gens.push_back(wt.g);
      w.push_back(m.weight(wt.g));
    }
    res.saturation = FineMonoid::from_generators(m.ambient(), gens).with_weighting(w);
  }
  return res;
}

Tri is_saturated_bounded(const FineMonoid& m, std::int64_t bound) {
  auto r = saturation_bounded(m, bound);
  if (!r.witnesses.empty()) return Tri::False;
  return r.complete ? Tri::True : Tri::Unknown;
}

// ------------------------------------------------------------ sections

namespace {

// Target canonical free coordinates of f applied to a source canonical basis vector.
ZMatrix gp_matrix(const MonoidHom& f) {
  const FineMonoid& n = f.source();
  const FineMonoid& m = f.target();
  const std::size_t fn = n.gp().free_rank, tn = n.gp().torsion_invariants.size();
  const std::size_t fm = m.gp().free_rank;
  ZMatrix F(fm, fn);
  for (std::size_t j = 0; j < fn + tn; ++j) {
    Element e(fn + tn, 0);
    e[j] = 1;
    Element img = m.gp_coordinates(f.apply(n.from_gp_coordinates(e)));
    for (std::size_t r = 0; r < fm; ++r) {
      if (j < fn) {
        F(r, j) = Z(static_cast<long>(img[r]));
      } else if (img[r] != 0) {
        fail(ErrorKind::TorsionTarget, "torsion maps to a non-torsion element");
      }
    }
  }
  return F;
}

Element apply_matrix(const ZMatrix& F, const Element& x) {
  Element r(F.rows, 0);
  for (std::size_t i = 0; i < F.rows; ++i) {
    Z s = 0;
    for (std::size_t j = 0; j < F.cols; ++j) s += F(i, j) * Z(static_cast<long>(x[j]));
    r[i] = to_i64(s);
  }
  return r;
}

}  // namespace

SectionData section(const MonoidHom& f, std::int64_t search_bound) {
  const FineMonoid& N = f.source();
  const FineMonoid& M = f.target();
  if (!M.gp().torsion_free()) fail(ErrorKind::TorsionTarget, "target group has torsion");
  {
    std::vector<Element> imgs = f.images();
    FineMonoid image = FineMonoid::from_generators(M.ambient(), imgs);
    Explorer ex(image);
    for (const auto& g : M.generators())
      if (!ex.contains(g)) fail(ErrorKind::NotSurjective, "a target generator is not in the image");
  }
  const std::size_t fn = N.gp().free_rank, tn = N.gp().torsion_invariants.size();
  const std::size_t fm = M.gp().free_rank;
  AmbientGroup amb{fn, N.gp().torsion_invariants};
  ZMatrix F = gp_matrix(f);
  Smith sf = smith(F);

  // Lift of each canonical target basis vector.
  std::vector<Element> basis_lift;
  for (std::size_t j = 0; j < fm; ++j) {
    std::vector<Z> e(fm, Z(0));
    e[j] = 1;
    auto z = solve_integer(sf, e);
    if (!z) fail(ErrorKind::NotSurjective, "group map is not surjective");
    Element x(fn + tn, 0);
    for (std::size_t r = 0; r < fn; ++r) x[r] = to_i64((*z)[r]);
    basis_lift.push_back(x);
  }
  auto s_of = [&](const Element& target_elem) {
    Element y = M.gp_coordinates(target_elem);
    Element x = amb.zero();
    for (std::size_t j = 0; j < fm; ++j) x = amb.add(x, amb.scale(y[j], basis_lift[j]));
    return x;
  };

  std::vector<Element> kernel_gens;
  ZMatrix K = integer_kernel(sf);
  for (std::size_t c = 0; c < K.cols; ++c) {
    Element x(fn + tn, 0);
    for (std::size_t r = 0; r < fn; ++r) x[r] = to_i64(K(r, c));
    kernel_gens.push_back(x);
  }
  for (std::size_t t = 0; t < tn; ++t) {
    Element x(fn + tn, 0);
    x[fn + t] = 1;
    kernel_gens.push_back(x);
  }

  std::vector<Element> sect_images, nt_gens;
  for (const auto& g : M.generators()) sect_images.push_back(s_of(g));
  nt_gens = sect_images;
  for (std::size_t c = 0; c < K.cols; ++c) {
    nt_gens.push_back(kernel_gens[c]);
    nt_gens.push_back(amb.neg(kernel_gens[c]));
  }
  for (std::size_t t = 0; t < tn; ++t) nt_gens.push_back(kernel_gens[K.cols + t]);
  FineMonoid ntilde = FineMonoid::from_generators(amb, nt_gens);
  MonoidHom sect(M, ntilde, sect_images);

  SectionChecks chk;
  chk.composition_identity = true;
  for (std::size_t i = 0; i < M.size(); ++i) {
    Element fx = apply_matrix(F, Element(sect_images[i].begin(), sect_images[i].begin() + fn));
    if (fx != M.gp_coordinates(M.generators()[i])) chk.composition_identity = false;
  }
  chk.kernel_maps_to_zero = true;
  for (std::size_t c = 0; c < K.cols; ++c) {
    Element fx = apply_matrix(F, Element(kernel_gens[c].begin(), kernel_gens[c].begin() + fn));
    if (fx != Element(fm, 0)) chk.kernel_maps_to_zero = false;
  }
  {
    ZMatrix S(fn, fn);
    for (std::size_t j = 0; j < fm; ++j)
      for (std::size_t r = 0; r < fn; ++r) S(r, j) = Z(static_cast<long>(basis_lift[j][r]));
    for (std::size_t c = 0; c < K.cols; ++c)
      for (std::size_t r = 0; r < fn; ++r) S(r, fm + c) = K(r, c);
    Smith ss = smith(S);
    chk.splitting = fm + K.cols == fn && ss.rank == fn;
    for (std::size_t i = 0; i < ss.rank; ++i)
      if (ss.diag(i) != 1) chk.splitting = false;
  }
  chk.sharp_identity_applicable = M.is_sharp();
  if (chk.sharp_identity_applicable) {
    chk.sharp_identity = true;
    Explorer em(M), en(N);
    auto as = em.elements_up_to(search_bound);
    auto bs = en.elements_up_to(search_bound);
    for (const auto& a : as) {
      Element sa = s_of(a);
      for (const auto& b : bs) {
        Element z = amb.add(sa, N.gp_coordinates(b));
        if (apply_matrix(F, Element(z.begin(), z.begin() + fn)) != Element(fm, 0)) continue;
        Element zn = N.from_gp_coordinates(z);
        if (!en.contains(zn) || f.apply(zn) != M.ambient().zero()) chk.sharp_identity = false;
      }
    }
  }
  AbelianGroup kernel{fn - fm, N.gp().torsion_invariants};
  return SectionData{f, ntilde, sect, kernel, kernel_gens, chk};
}

Tri is_vertical(const MonoidHom& f, std::int64_t search_bound) {
  const FineMonoid& N = f.source();
  const FineMonoid& M = f.target();
  Explorer en(N), em(M);
  auto ns = en.elements_up_to(search_bound);
  std::vector<Element> images;
  for (const auto& x : ns) images.push_back(f.apply(x));
  bool all = true;
  for (const auto& g : M.generators()) {
    bool witnessed = false;
    for (const auto& y : images)
      if (em.contains(M.ambient().sub(y, g))) {
        witnessed = true;
        break;
      }
    if (witnessed) continue;
    all = false;
    // Certificate: g outside cone(f(N)) - cone(M) rules out any witness.
    const std::size_t k = M.ambient().free_rank;
    QMatrix cols(k, N.size() + M.size());
    for (std::size_t i = 0; i < N.size(); ++i) {
      QVector v = M.ambient().free_part(f.images()[i]);
      for (std::size_t r = 0; r < k; ++r) cols(r, i) = v[r];
    }
    for (std::size_t j = 0; j < M.size(); ++j) {
      QVector v = M.ambient().free_part(M.generators()[j]);
      for (std::size_t r = 0; r < k; ++r) cols(r, N.size() + j) = -v[r];
    }
    if (!in_rational_cone(cols, M.ambient().free_part(g))) return Tri::False;
  }
  return all ? Tri::True : Tri::Unknown;
}

}  // namespace logmon
