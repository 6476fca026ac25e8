#include "logmon/connection.hpp"

#include <algorithm>
#include <future>
#include <sstream>

namespace logmon {

namespace {

QMatrix scalar_matrix(std::size_t n, const Q& c) {
  QMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) r(i, i) = c;
  return r;
}

QMatrix vstack(const std::vector<QMatrix>& parts, std::size_t cols) {
  std::size_t rows = 0;
  for (const auto& p : parts) rows += p.rows;
  QMatrix r(rows, cols);
  std::size_t at = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) r(at + i, j) = p(i, j);
    at += p.rows;
  }
  return r;
}

QMatrix mat_pow(const QMatrix& x, std::size_t k) {
  QMatrix r = QMatrix::identity(x.rows);
  for (std::size_t i = 0; i < k; ++i) r = r * x;
  return r;
}

bool is_integer(const Q& x) { return x.get_den() == 1; }

Q phi_coord(const FineMonoid& m, const Embedding& e, const Element& x, std::size_t i) {
  QVector v = m.ambient().free_part(x);
  Q s = 0;
  for (std::size_t j = 0; j < v.size(); ++j) s += e.phi(i, j) * v[j];
  return s;
}

std::string elem_str(const Element& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

// Columns of the free generator matrix forming a basis of gp (x) Q.
QMatrix gp_basis(const FineMonoid& m) {
  QMatrix g = m.free_generator_matrix();
  return select_columns(g, independent_columns(g));
}

// Weight cache for monoid elements.
class Weights {
 public:
  explicit Weights(const FineMonoid& m) : m_(m) {}
  std::int64_t operator()(const Element& x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    std::int64_t w = m_.weight(x);
    cache_.emplace(x, w);
    return w;
  }

 private:
  const FineMonoid& m_;
  std::map<Element, std::int64_t> cache_;
};

}  // namespace

const char* to_string(IntervalKind k) {
  switch (k) {
    case IntervalKind::Disk: return "disk";
    case IntervalKind::Annulus: return "annulus";
    case IntervalKind::Point: return "point";
  }
  return "disk";
}

// ------------------------------------------------------------ embeddings

std::vector<QVector> facet_functionals(const FineMonoid& m) {
  const QMatrix g = m.free_generator_matrix();
  std::vector<QVector> out;
  for (const auto& f : facets(m)) {
    GroupQuotient gq = quotient_group(m, face_generators(m, f));
    if (gq.group.free_rank != 1 || !gq.group.torsion_free())
      fail(ErrorKind::NotSemiSaturated, "a facet quotient group is not isomorphic to Z");
    QVector y(m.size());
    bool negative = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      y[i] = Q(static_cast<long>(gq.generator_images[i][0]));
      if (y[i] < 0) negative = true;
    }
    if (negative)
      for (auto& v : y) v = -v;
    for (const auto& v : y)
      if (v < 0) fail(ErrorKind::InvalidArgument, "facet quotient is not a sharp submonoid of Z");
    auto lam = solve(transpose(g), column(y));
    if (!lam) fail(ErrorKind::InvalidArgument, "facet quotient map is not linear on the free part");
    out.push_back(column_of(*lam, 0));
  }
  return out;
}

Embedding facet_embedding(const FineMonoid& m) {
  if (!m.is_sharp()) fail(ErrorKind::InvalidArgument, "facet embedding needs a sharp monoid");
  auto fs = facet_functionals(m);
  const QMatrix g = m.free_generator_matrix();
  const std::size_t k = m.ambient().free_rank;
  QMatrix rows(fs.size(), k);
  for (std::size_t r = 0; r < fs.size(); ++r)
    for (std::size_t j = 0; j < k; ++j) rows(r, j) = fs[r][j];
  auto keep = independent_columns(transpose(rows * g));
  // Descending lexicographic row order: N^k gets the identity.
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < k; ++j)
      if (rows(a, j) != rows(b, j)) return rows(a, j) > rows(b, j);
    return a < b;
  });
  Embedding e;
  e.phi = QMatrix(keep.size(), k);
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t j = 0; j < k; ++j) e.phi(r, j) = rows(keep[r], j);
  validate_embedding(m, e);
  return e;
}

void validate_embedding(const FineMonoid& m, const Embedding& e) {
  if (e.phi.cols != m.ambient().free_rank) fail(ErrorKind::InvalidArgument, "embedding has wrong number of columns");
  const QMatrix g = m.free_generator_matrix();
  QMatrix img = e.phi * g;
  for (const auto& v : img.a) {
    if (!is_integer(v)) fail(ErrorKind::InvalidArgument, "embedding is not integral on the monoid");
    if (v < 0) fail(ErrorKind::InvalidArgument, "embedding sends a generator outside N^r");
  }
  const std::size_t rk = rank(g);
  if (rank(img) != rk || e.r() != rk)
    fail(ErrorKind::InvalidArgument, "embedding is not an isomorphism after tensoring with Q");
}

bool check_sd(const FineMonoid& m, const ExponentSet& sigma, SdClass) {
  for (const auto& lam : facet_functionals(m)) {
    std::vector<Q> vals;
    for (const auto& s : sigma.elements) {
      if (s.size() != lam.size()) fail(ErrorKind::InvalidArgument, "exponent has wrong length");
      Q v = 0;
      for (std::size_t j = 0; j < s.size(); ++j) v += lam[j] * s[j];
      vals.push_back(v);
    }
    for (const auto& a : vals)
      for (const auto& b : vals) {
        Q d = a - b;
        if (d != 0 && is_integer(d)) return false;
      }
  }
  return true;
}

// ------------------------------------------------------------ modules

LogNablaModule LogNablaModule::make(FineMonoid m, Embedding e, std::size_t rank, std::int64_t truncation,
                                    std::vector<MatSeries> a, IntervalKind interval, std::vector<QMatrix> base) {
  validate_embedding(m, e);
  if (rank == 0) fail(ErrorKind::InvalidArgument, "module rank must be positive");
  if (truncation < 0) fail(ErrorKind::InvalidArgument, "truncation must be non-negative");
  if (a.size() != e.r()) fail(ErrorKind::InvalidArgument, "need one connection matrix per embedding coordinate");
  LogNablaModule out{m, e, rank, truncation, interval, {}, {}};
  Explorer ex(m);
  for (const auto& series : a) {
    MatSeries clean;
    for (const auto& [x, mat] : series) {
      if (mat.rows != rank || mat.cols != rank) fail(ErrorKind::InvalidArgument, "connection matrix has wrong shape");
      Element key = m.ambient().reduce(x);
      if (!ex.contains(key)) fail(ErrorKind::InvalidArgument, "connection term outside the monoid");
      if (m.weight(key) > truncation) continue;
      auto it = clean.find(key);
      if (it == clean.end())
        clean.emplace(key, mat);
      else
        it->second = it->second + mat;
    }
    for (auto it = clean.begin(); it != clean.end();) it = it->second.is_zero() ? clean.erase(it) : std::next(it);
    out.A.push_back(std::move(clean));
  }
  for (const auto& d : base)
    if (d.rows != rank || d.cols != rank) fail(ErrorKind::InvalidArgument, "base matrix has wrong shape");
  out.base = std::move(base);
  return out;
}

QMatrix LogNablaModule::term(std::size_t i, const Element& x) const {
  auto it = A.at(i).find(x);
  return it == A[i].end() ? QMatrix(rank, rank) : it->second;
}

MatSeries mat_series_mul(const FineMonoid& m, const MatSeries& x, const MatSeries& y, std::int64_t truncation) {
  Weights w(m);
  MatSeries out;
  for (const auto& [a, ma] : x) {
    const std::int64_t wa = w(a);
    if (wa > truncation) continue;
    for (const auto& [b, mb] : y) {
      if (wa + w(b) > truncation) continue;
      Element c = m.ambient().add(a, b);
      QMatrix prod = ma * mb;
      auto it = out.find(c);
      if (it == out.end())
        out.emplace(c, prod);
      else
        it->second = it->second + prod;
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

MatSeries mat_series_derivative(const FineMonoid& m, const Embedding& emb, const MatSeries& x, std::size_t i) {
  MatSeries out;
  for (const auto& [a, ma] : x) {
    Q c = phi_coord(m, emb, a, i);
    if (c != 0) out.emplace(a, c * ma);
  }
  return out;
}

bool mat_series_equal(const MatSeries& x, const MatSeries& y) {
  auto nz = [](const MatSeries& s) {
    MatSeries r;
    for (const auto& [k, v] : s)
      if (!v.is_zero()) r.emplace(k, v);
    return r;
  };
  return nz(x) == nz(y);
}

MatSeries mat_series_inverse(const FineMonoid& m, const MatSeries& g, std::int64_t truncation) {
  if (!m.is_sharp()) fail(ErrorKind::InvalidArgument, "series inversion needs a sharp monoid");
  const Element zero = m.ambient().zero();
  auto c0 = g.find(zero);
  if (c0 == g.end()) fail(ErrorKind::NonInvertibleConstantTerm, "constant term is zero");
  auto inv0 = inverse(c0->second);
  if (!inv0) fail(ErrorKind::NonInvertibleConstantTerm, "constant term is singular");
  const std::size_t n = inv0->rows;
  MatSeries out{{zero, *inv0}};
  Explorer ex(m);
  for (const auto& x : ex.elements_up_to(truncation)) {
    if (x == zero) continue;
    QMatrix acc(n, n);
    for (const auto& [y, gy] : g) {
      if (y == zero) continue;
      auto it = out.find(m.ambient().sub(x, y));
      if (it != out.end()) acc = acc - gy * it->second;
    }
    acc = (*inv0) * acc;
    if (!acc.is_zero()) out.emplace(x, acc);
  }
  return out;
}

namespace {

MatSeries add_series(const MatSeries& x, const MatSeries& y) {
  MatSeries out = x;
  for (const auto& [k, v] : y) {
    auto it = out.find(k);
    if (it == out.end())
      out.emplace(k, v);
    else
      it->second = it->second + v;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

MatSeries identity_series(const FineMonoid& m, std::size_t n) { return {{m.ambient().zero(), QMatrix::identity(n)}}; }

}  // namespace

IntegrabilityReport validate_integrability(const LogNablaModule& e) {
  IntegrabilityReport rep;
  const FineMonoid& m = e.monoid;
  const std::size_t r = e.embedding.r();
  for (std::size_t i = 0; i < r && rep.ok; ++i)
    for (std::size_t j = i + 1; j < r && rep.ok; ++j) {
      MatSeries neg = mat_series_derivative(m, e.embedding, e.A[i], j);
      for (auto& [k, v] : neg) v = Q(-1) * v;
      MatSeries total = add_series(mat_series_derivative(m, e.embedding, e.A[j], i), neg);
      MatSeries ij = mat_series_mul(m, e.A[i], e.A[j], e.truncation);
      MatSeries ji = mat_series_mul(m, e.A[j], e.A[i], e.truncation);
      for (auto& [k, v] : ji) v = Q(-1) * v;
      total = add_series(total, add_series(ij, ji));
      if (!total.empty()) {
        rep.ok = false;
        rep.first_failure = "coordinates " + std::to_string(i + 1) + "," + std::to_string(j + 1) + " at t^" +
                            elem_str(total.begin()->first);
      }
    }
  for (std::size_t b = 0; b < e.base.size() && rep.ok; ++b) {
    for (std::size_t c = b + 1; c < e.base.size(); ++c)
      if (!(e.base[b] * e.base[c] == e.base[c] * e.base[b])) {
        rep.ok = false;
        rep.first_failure = "base matrices do not commute";
      }
    for (std::size_t i = 0; i < r && rep.ok; ++i)
      for (const auto& [k, v] : e.A[i])
        if (!(e.base[b] * v == v * e.base[b])) {
          rep.ok = false;
          rep.first_failure = "base direction does not commute with coordinate " + std::to_string(i + 1) + " at t^" +
                              elem_str(k);
          break;
        }
  }
  return rep;
}

std::vector<QMatrix> residue(const LogNablaModule& e) {
  std::vector<QMatrix> out;
  for (std::size_t i = 0; i < e.embedding.r(); ++i) out.push_back(e.term(i, e.monoid.ambient().zero()));
  return out;
}

// ------------------------------------------------------------ exponents

ExponentData joint_decomposition(const std::vector<QMatrix>& mats) {
  if (mats.empty()) fail(ErrorKind::InvalidArgument, "no matrices to decompose");
  const std::size_t n = mats[0].rows;
  for (std::size_t a = 0; a < mats.size(); ++a)
    for (std::size_t b = a + 1; b < mats.size(); ++b)
      if (!(mats[a] * mats[b] == mats[b] * mats[a])) fail(ErrorKind::NonCommutingResidues, "residues do not commute");
  struct Blk {
    QMatrix w;
    QVector vals;
  };
  std::vector<Blk> cur{{QMatrix::identity(n), {}}};
  for (const auto& x : mats) {
    std::vector<Blk> next;
    for (const auto& b : cur) {
      auto r = solve(b.w, x * b.w);
      if (!r) fail(ErrorKind::NonCommutingResidues, "block is not invariant");
      RootSplit rs = rational_roots(charpoly(*r));
      if (rs.residual_degree > 0) fail(ErrorKind::IrrationalExponent, "characteristic polynomial has irrational roots");
      for (const auto& [lam, mult] : rs.roots) {
        QMatrix shifted = *r - scalar_matrix(r->rows, lam);
        QMatrix ker = kernel(mat_pow(shifted, static_cast<std::size_t>(mult)));
        QVector vals = b.vals;
        vals.push_back(lam);
        next.push_back({b.w * ker, vals});
      }
    }
    cur = std::move(next);
  }
  std::sort(cur.begin(), cur.end(), [](const Blk& a, const Blk& b) { return a.vals < b.vals; });
  ExponentData out;
  out.change_of_basis = QMatrix(n, 0);
  for (const auto& b : cur) {
    ExponentBlock eb;
    eb.phi_values = b.vals;
    eb.basis = b.w;
    eb.multiplicity = b.w.cols;
    out.change_of_basis = hstack(out.change_of_basis, b.w);
    out.blocks.push_back(eb);
  }
  return out;
}

ExponentData exponents_of(const FineMonoid& m, const Embedding& emb, const std::vector<QMatrix>& res) {
  ExponentData d = joint_decomposition(res);
  QMatrix g = gp_basis(m);
  QMatrix pg = emb.phi * g;
  for (auto& b : d.blocks) {
    auto c = solve(pg, column(b.phi_values));
    if (!c) fail(ErrorKind::InvalidArgument, "exponent does not lie in the group tensored with Q");
    b.xi = g * column_of(*c, 0);
  }
  return d;
}

ExponentData exponents(const LogNablaModule& e) { return exponents_of(e.monoid, e.embedding, residue(e)); }

// ------------------------------------------------------------ shear

bool BoundReport::ok() const {
  for (const auto& r : rows)
    if (!r.ok) return false;
  for (const auto& r : inverse_rows)
    if (!r.ok) return false;
  return true;
}

namespace {

// Matrix of X -> A X - X A on row-major vectorised n x n matrices.
QMatrix ad_matrix(const QMatrix& a) {
  const std::size_t n = a.rows, n2 = n * n;
  QMatrix l(n2, n2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < n; ++c) {
        l(i * n + j, c * n + j) += a(i, c);
        l(i * n + j, i * n + c) -= a(c, j);
      }
  return l;
}

QVector vec(const QMatrix& x) { return x.a; }
QMatrix unvec(const QVector& v, std::size_t n) {
  QMatrix r(n, n);
  r.a = v;
  return r;
}

Q log_norm(const QMatrix& x, unsigned long p) {
  ExtQ v = valuation(x, p);
  return v.infinite ? Q(0) : Q(-v.value);
}

// log_p z = max(0, max v(xi_j - xi_j' + s)); +inf when some difference vanishes.
ExtQ log_z(const ExponentData& d, std::size_t i, const Q& s, unsigned long p) {
  ExtQ best = ExtQ::of(0);
  for (const auto& a : d.blocks)
    for (const auto& b : d.blocks) best = std::max(best, vp(a.phi_values[i] - b.phi_values[i] + s, p));
  return best;
}

BoundReport make_bound_report(const LogNablaModule& e, const ExponentData& exps, const MatSeries& B,
                              const std::vector<Element>& order, const std::map<std::pair<std::size_t, Q>, QMatrix>& inv,
                              unsigned long p) {
  const FineMonoid& m = e.monoid;
  const std::size_t n = e.rank, r = e.embedding.r();
  BoundReport rep;
  QMatrix w = exps.change_of_basis;
  auto winv = inverse(w);
  Q log_kappa = log_norm(w, p) + log_norm(*winv, p);
  Q log_c = std::max(Q(0), Q(2 * log_kappa));
  std::size_t e_idx = 1;
  auto res = residue(e);
  for (std::size_t i = 0; i < r; ++i) {
    QMatrix diag(n, n);
    std::size_t at = 0;
    for (const auto& b : exps.blocks)
      for (std::size_t t = 0; t < b.multiplicity; ++t, ++at) diag(at, at) = b.phi_values[i];
    QMatrix semis = w * diag * (*winv);
    QMatrix nil = res[i] - semis;
    if (!nil.is_zero()) log_c = std::max(log_c, log_norm(nil, p));
    auto idx = nilpotency_index(ad_matrix(nil));
    if (idx) e_idx = std::max(e_idx, *idx);
  }
  rep.e = e_idx;
  rep.log_c = log_c;
  rep.log_C = Q(static_cast<long>(2 * e_idx - 1)) * log_c;
  Weights wt(m);
  bool have = false;
  Q qa = 0;
  for (std::size_t i = 0; i < r; ++i)
    for (const auto& [x, mat] : e.A[i]) {
      std::int64_t h = wt(x);
      if (h == 0) continue;
      Q cand = (log_norm(mat, p) - rep.log_C) / Q(static_cast<long>(h));
      if (!have || cand > qa) qa = cand;
      have = true;
    }
  rep.q_a = qa;

  for (const auto& [key, mat] : inv) {
    InverseBoundRow row;
    row.i = key.first;
    row.s = key.second;
    row.actual_log = log_norm(mat, p);
    ExtQ lz = log_z(exps, key.first, key.second, p);
    row.predicted_log = lz.infinite ? Q(0) : rep.log_C + Q(static_cast<long>(rep.e)) * lz.value;
    row.ok = lz.infinite || row.actual_log <= row.predicted_log;
    rep.inverse_rows.push_back(row);
  }

  // Longest chain of zeta values, refined to generator steps.
  Explorer ex(m);
  std::map<Element, ExtQ> logZ;
  for (const auto& x : order) {
    ExtQ zeta = ExtQ::inf();
    for (std::size_t i = 0; i < r; ++i) {
      Q mi = phi_coord(m, e.embedding, x, i);
      if (mi == 0) continue;
      zeta = min(zeta, log_z(exps, i, -mi, p));
    }
    ExtQ best = ExtQ::of(0);
    for (std::size_t g = 0; g < m.size(); ++g) {
      Element y = m.ambient().sub(x, m.generators()[g]);
      auto it = logZ.find(y);
      if (it != logZ.end()) best = std::max(best, it->second);
    }
    logZ[x] = zeta + best;
  }
  for (const auto& x : order) {
    auto it = B.find(x);
    if (it == B.end()) continue;
    BoundRow row;
    row.m = x;
    row.weight = wt(x);
    row.actual_log = log_norm(it->second, p);
    const ExtQ& z = logZ[x];
    Q h(static_cast<long>(row.weight));
    if (z.infinite) {
      row.predicted_log = 0;
      row.ok = true;
    } else {
      row.predicted_log = Q(static_cast<long>(rep.e)) * z.value + 2 * h * rep.log_C + h * rep.q_a;
      row.ok = row.actual_log <= row.predicted_log;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace

ShearResult shear(const LogNablaModule& e, const ShearOptions& opt) {
  const unsigned long p = opt.prime;
  const FineMonoid& m = e.monoid;
  if (!m.is_sharp()) fail(ErrorKind::InvalidArgument, "shearing needs a sharp monoid");
  const std::size_t n = e.rank, n2 = n * n, r = e.embedding.r();
  const auto& amb = m.ambient();
  ShearResult out;
  out.constant_model = residue(e);
  ExponentData exps = exponents(e);

  Explorer ex(m);
  std::vector<Element> order;
  for (const auto& x : ex.elements_up_to(e.truncation))
    if (x != amb.zero()) order.push_back(x);
  out.order = order;
  Weights wt(m);

  std::vector<QMatrix> ads;
  for (std::size_t i = 0; i < r; ++i) ads.push_back(ad_matrix(out.constant_model[i]));
  std::map<std::pair<std::size_t, Q>, QMatrix> inv;
  auto pick = [&](const Element& x) {
    for (std::size_t i = 0; i < r; ++i) {
      Q c = phi_coord(m, e.embedding, x, i);
      if (c != 0) return std::make_pair(i, c);
    }
    fail(ErrorKind::InvalidArgument, "embedding vanishes on a non-zero monoid element");
  };

  MatSeries& B = out.gauge;
  B.emplace(amb.zero(), QMatrix::identity(n));
  auto solve_one = [&](const Element& x, std::size_t i0, const QMatrix& op) {
    QMatrix rhs(n, n);
    const std::int64_t wx = wt(x);
    for (const auto& [y, ay] : e.A[i0]) {
      if (y == amb.zero()) continue;
      auto it = B.find(amb.sub(x, y));
      if (it == B.end()) continue;
      (void)wx;
      rhs = rhs - ay * it->second;
    }
    return unvec(op * vec(rhs), n);
  };

  std::size_t pos = 0;
  while (pos < order.size()) {
    const std::int64_t w = wt(order[pos]);
    std::size_t end = pos;
    while (end < order.size() && wt(order[end]) == w) ++end;
    std::vector<std::pair<std::size_t, Q>> picks;
    for (std::size_t k = pos; k < end; ++k) {
      auto key = pick(order[k]);
      picks.push_back(key);
      if (!inv.count(key)) {
        QMatrix op = ads[key.first] + scalar_matrix(n2, key.second);
        auto v = inverse(op);
        if (!v) fail(ErrorKind::SingularSylvester, "g + s id is singular; exponent differences meet the integers");
        inv.emplace(key, *v);
      }
    }
    std::vector<QMatrix> results(end - pos);
    if (opt.parallel && end - pos > 1) {
      std::vector<std::future<QMatrix>> fut;
      for (std::size_t k = pos; k < end; ++k) {
        const QMatrix& op = inv.at(picks[k - pos]);
        fut.push_back(std::async(std::launch::async, [&, k, &op = op] { return solve_one(order[k], picks[k - pos].first, op); }));
      }
      for (std::size_t k = 0; k < fut.size(); ++k) results[k] = fut[k].get();
    } else {
      for (std::size_t k = pos; k < end; ++k) results[k - pos] = solve_one(order[k], picks[k - pos].first, inv.at(picks[k - pos]));
    }
    for (std::size_t k = pos; k < end; ++k)
      if (!results[k - pos].is_zero()) B.emplace(order[k], results[k - pos]);
    pos = end;
  }

  MatSeries& Bp = out.gauge_inverse;
  Bp.emplace(amb.zero(), QMatrix::identity(n));
  for (const auto& x : order) {
    QMatrix acc(n, n);
    for (const auto& [y, by] : B) {
      if (y == amb.zero()) continue;
      auto it = Bp.find(amb.sub(x, y));
      if (it == Bp.end()) continue;
      acc = acc - by * it->second;
    }
    if (!acc.is_zero()) Bp.emplace(x, acc);
  }

  if (opt.check) {
    ShearChecks& c = out.checks;
    c.equations_all_i = true;
    for (std::size_t i = 0; i < r && c.equations_all_i; ++i) {
      const QMatrix& a0 = out.constant_model[i];
      for (const auto& x : order) {
        QMatrix bx = B.count(x) ? B.at(x) : QMatrix(n, n);
        QMatrix lhs = a0 * bx - bx * a0 + phi_coord(m, e.embedding, x, i) * bx;
        for (const auto& [y, ay] : e.A[i]) {
          if (y == amb.zero()) continue;
          auto it = B.find(amb.sub(x, y));
          if (it != B.end()) lhs = lhs + ay * it->second;
        }
        if (!lhs.is_zero()) {
          c.equations_all_i = false;
          break;
        }
      }
    }
    MatSeries id = identity_series(m, n);
    c.gauge_inverse = mat_series_equal(mat_series_mul(m, B, Bp, e.truncation), id) &&
                      mat_series_equal(mat_series_mul(m, Bp, B, e.truncation), id);
    LogNablaModule model = apply_UI(m, e.embedding, out.constant_model, std::nullopt, e.interval, e.truncation);
    LogNablaModule back = gauge_transform(model, Bp, B);
    c.round_trip = true;
    for (std::size_t i = 0; i < r; ++i)
      if (!mat_series_equal(back.A[i], e.A[i])) c.round_trip = false;
    c.base_constant = true;
    for (const auto& d : e.base) {
      MatSeries ds{{amb.zero(), d}};
      if (!mat_series_equal(mat_series_mul(m, mat_series_mul(m, Bp, ds, e.truncation), B, e.truncation), ds))
        c.base_constant = false;
    }
  }
  out.bound = make_bound_report(e, exps, B, order, inv, p);
  return out;
}

LogNablaModule gauge_transform(const LogNablaModule& e, const MatSeries& g, const MatSeries& ginv) {
  LogNablaModule out = e;
  for (std::size_t i = 0; i < e.embedding.r(); ++i) {
    MatSeries ag = mat_series_mul(e.monoid, e.A[i], g, e.truncation);
    MatSeries dg = mat_series_derivative(e.monoid, e.embedding, g, i);
    out.A[i] = mat_series_mul(e.monoid, ginv, add_series(ag, dg), e.truncation);
  }
  return out;
}

LogNablaModule apply_UI(FineMonoid m, Embedding emb, const std::vector<QMatrix>& model,
                        const std::optional<QVector>& xi_twist, IntervalKind interval, std::int64_t truncation) {
  if (model.size() != emb.r()) fail(ErrorKind::InvalidArgument, "need one constant matrix per coordinate");
  for (std::size_t a = 0; a < model.size(); ++a)
    for (std::size_t b = a + 1; b < model.size(); ++b)
      if (!(model[a] * model[b] == model[b] * model[a]))
        fail(ErrorKind::NonCommutingResidues, "constant model matrices do not commute");
  const std::size_t n = model.empty() ? 0 : model[0].rows;
  QVector shift(emb.r(), Q(0));
  if (xi_twist) shift = emb.apply(*xi_twist);
  std::vector<MatSeries> a;
  for (std::size_t i = 0; i < model.size(); ++i)
    a.push_back({{m.ambient().zero(), model[i] + scalar_matrix(n, shift[i])}});
  return LogNablaModule::make(m, emb, n, truncation, a, interval);
}

LogNablaModule twist_by(const LogNablaModule& e, const Element& x) {
  LogNablaModule out = e;
  const Element zero = e.monoid.ambient().zero();
  for (std::size_t i = 0; i < e.embedding.r(); ++i) {
    QMatrix a0 = e.term(i, zero) + scalar_matrix(e.rank, phi_coord(e.monoid, e.embedding, x, i));
    if (a0.is_zero())
      out.A[i].erase(zero);
    else
      out.A[i][zero] = a0;
  }
  return out;
}

// ------------------------------------------------------------ twist reduction

TwistReduction twist_reduce(const FineMonoid& m, const Embedding& emb, const QVector& xi, IntervalKind interval) {
  if (interval != IntervalKind::Annulus) fail(ErrorKind::InvalidArgument, "twist reduction needs 0 outside the interval");
  const std::size_t r = emb.r(), n = m.size();
  QMatrix pq = emb.phi * m.free_generator_matrix();
  ZMatrix P(r, n), U = ZMatrix::identity(n);
  for (std::size_t i = 0; i < pq.a.size(); ++i) {
    if (!is_integer(pq.a[i])) fail(ErrorKind::InvalidArgument, "embedding is not integral on the monoid");
    P.a[i] = pq.a[i].get_num();
  }
  auto col_axpy = [&](std::size_t dst, std::size_t src, const Z& q) {
    for (std::size_t i = 0; i < r; ++i) P(i, dst) -= q * P(i, src);
    for (std::size_t i = 0; i < n; ++i) U(i, dst) -= q * U(i, src);
  };
  std::vector<bool> active(n, true);
  std::vector<std::optional<std::size_t>> pivot(r);
  for (std::size_t jj = 0; jj < r; ++jj) {
    for (;;) {
      std::optional<std::size_t> best;
      std::size_t nonzero = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (!active[c] || P(jj, c) == 0) continue;
        ++nonzero;
        if (!best || abs(P(jj, c)) < abs(P(jj, *best))) best = c;
      }
      if (!best) break;
      if (nonzero == 1) {
        if (P(jj, *best) < 0) {
          for (std::size_t i = 0; i < r; ++i) P(i, *best) = -P(i, *best);
          for (std::size_t i = 0; i < n; ++i) U(i, *best) = -U(i, *best);
        }
        pivot[jj] = *best;
        active[*best] = false;
        break;
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (!active[c] || c == *best || P(jj, c) == 0) continue;
        Z q;
        mpz_fdiv_q(q.get_mpz_t(), Z(P(jj, c)).get_mpz_t(), Z(P(jj, *best)).get_mpz_t());
        col_axpy(c, *best, q);
      }
    }
  }
  QVector x = emb.apply(xi);
  std::vector<Z> coeff(n, Z(0));
  for (std::size_t jj = 0; jj < r; ++jj) {
    if (!pivot[jj]) continue;
    const std::size_t c = *pivot[jj];
    Z k = floor_q(x[jj] / Q(P(jj, c))).get_num();
    if (k == 0) continue;
    for (std::size_t i = 0; i < r; ++i) x[i] -= Q(k * P(i, c));
    for (std::size_t i = 0; i < n; ++i) coeff[i] += k * U(i, c);
  }
  TwistReduction out;
  out.shift = m.ambient().zero();
  out.xi = xi;
  // Twist only when it shrinks the image; keeps the result independent of row order on ties.
  auto l1 = [](const QVector& v) {
    Q t = 0;
    for (const auto& c : v) t += abs(c);
    return t;
  };
  if (l1(x) >= l1(emb.apply(xi))) return out;
  for (std::size_t i = 0; i < n; ++i)
    out.shift = m.ambient().add(out.shift, m.ambient().scale(to_i64(coeff[i]), m.generators()[i]));
  QVector sf = m.ambient().free_part(out.shift);
  for (std::size_t j = 0; j < xi.size(); ++j) out.xi[j] -= sf[j];
  return out;
}

// ------------------------------------------------------------ unipotence

namespace {

// Dimensions of the successive quotients of the joint kernel filtration.
std::vector<std::size_t> kernel_layers(const std::vector<QMatrix>& nils, std::size_t d) {
  std::vector<std::size_t> out;
  QMatrix wk(d, 0);
  std::size_t have = 0;
  while (have < d) {
    QMatrix proj = wk.cols == 0 ? QMatrix::identity(d) : transpose(kernel(transpose(wk)));
    std::vector<QMatrix> parts;
    for (const auto& x : nils) parts.push_back(proj * x);
    QMatrix next = nils.empty() ? QMatrix::identity(d) : kernel(vstack(parts, d));
    if (next.cols <= have) fail(ErrorKind::InvalidArgument, "block matrices are not nilpotent");
    out.push_back(next.cols - have);
    have = next.cols;
    wk = next;
  }
  return out;
}

}  // namespace

UnipotenceReport is_sigma_unipotent(const LogNablaModule& e, const ExponentSet& sigma, const Face& face,
                                    const ShearOptions& opt) {
  const FineMonoid& m = e.monoid;
  if (!check_sd(m, sigma)) fail(ErrorKind::InvalidArgument, "exponent set has integer differences along a facet");
  auto integ = validate_integrability(e);
  if (!integ.ok) fail(ErrorKind::NonIntegrable, "connection is not integrable: " + integ.first_failure);
  ShearResult sh = shear(e, opt);
  if (!sh.checks.all() && opt.check) fail(ErrorKind::NonIntegrable, "shearing identities failed");
  ExponentData exps = exponents_of(m, e.embedding, sh.constant_model);

  GroupQuotient gq = quotient_group(m, face_generators(m, face));
  const std::size_t fq = gq.group.free_rank;
  auto project = [&](const QVector& xi) {
    auto c = m.rational_coefficients(xi);
    if (!c) fail(ErrorKind::NotInGroupSpan, "exponent is outside the group tensored with Q");
    QVector out(fq, Q(0));
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < fq; ++j) out[j] += (*c)[i] * Q(static_cast<long>(gq.generator_images[i][j]));
    return out;
  };
  std::vector<QVector> sig;
  for (const auto& s : sigma.elements) sig.push_back(project(s));

  UnipotenceReport rep;
  rep.verdict = true;
  for (const auto& b : exps.blocks) {
    rep.sheared_exponents.push_back(b.xi);
    QVector px = project(b.xi);
    rep.projected_exponents.push_back(px);
    bool matched = false;
    for (const auto& s : sig) {
      bool ok = true;
      for (std::size_t j = 0; j < fq; ++j) {
        Q d = px[j] - s[j];
        if (e.interval == IntervalKind::Annulus ? !is_integer(d) : d != 0) ok = false;
      }
      if (ok) matched = true;
    }
    if (!matched) rep.verdict = false;
    std::vector<QMatrix> nils;
    for (std::size_t i = 0; i < e.embedding.r(); ++i) {
      auto rr = solve(b.basis, sh.constant_model[i] * b.basis);
      nils.push_back(*rr - scalar_matrix(b.multiplicity, b.phi_values[i]));
    }
    for (auto k : kernel_layers(nils, b.multiplicity)) rep.filtration_ranks.push_back(k);
  }
  if (!rep.verdict) rep.offending_face = face;
  return rep;
}

// ------------------------------------------------------------ difference operators

TruncatedSeries dl_constant_term(const Embedding& emb, const TruncatedSeries& f, std::int64_t l) {
  const FineMonoid& m = f.monoid();
  std::map<Element, Q> terms;
  for (const auto& [x, c] : f.terms()) {
    Q factor = 1;
    for (std::size_t i = 0; i < emb.r(); ++i) {
      Q mi = phi_coord(m, emb, x, i);
      for (std::int64_t j = -l; j <= l; ++j)
        if (j != 0) factor *= (mi - j) / Q(static_cast<long>(j));
    }
    if (factor != 0) terms[x] = c * factor;
  }
  return TruncatedSeries::from_terms(m, f.kind(), f.truncation(), terms);
}

namespace {

Poly linear_power(const Q& root, std::size_t k) {
  Poly p{Q(1)};
  for (std::size_t i = 0; i < k; ++i) p = poly_mul(p, Poly{-root, Q(1)});
  return p;
}

QMatrix restricted(const QMatrix& x, const QMatrix& basis) { return *solve(basis, x * basis); }

QMatrix total_operator(const DlSetup& s) {
  const std::size_t n = s.res[0].rows;
  QMatrix op = QMatrix::identity(n);
  for (std::size_t i = 0; i < s.res.size(); ++i) op = poly_eval(s.Q[i], s.res[i]) * op;
  return op;
}

void fill_common(DlSetup& s, const std::vector<QMatrix>& res, std::size_t target) {
  s.res = res;
  s.exps = joint_decomposition(res);
  if (target >= s.exps.blocks.size()) fail(ErrorKind::InvalidArgument, "target block out of range");
  s.target_block = target;
  s.q = 1;
  for (const auto& b : s.exps.blocks)
    for (std::size_t i = 0; i < res.size(); ++i) {
      QMatrix nb = restricted(res[i], b.basis) - scalar_matrix(b.multiplicity, b.phi_values[i]);
      s.q = std::max(s.q, nilpotency_index(nb).value_or(1));
    }
}

}  // namespace

DlSetup dl_setup(const std::vector<QMatrix>& res, std::size_t target) {
  DlSetup s;
  fill_common(s, res, target);
  const auto& blocks = s.exps.blocks;
  const auto& tb = blocks[target];
  const std::size_t r = res.size();
  s.Q.assign(r, Poly{Q(1)});
  for (std::size_t i = 0; i < r; ++i) {
    std::map<Q, std::size_t> nu;
    for (const auto& b : blocks) {
      if (b.phi_values[i] == tb.phi_values[i]) continue;
      QMatrix nb = restricted(res[i], b.basis) - scalar_matrix(b.multiplicity, b.phi_values[i]);
      std::size_t idx = nilpotency_index(nb).value_or(1);
      nu[b.phi_values[i]] = std::max(nu[b.phi_values[i]], idx);
    }
    for (const auto& [lam, k] : nu) s.Q[i] = poly_mul(s.Q[i], linear_power(lam, k));
  }
  QMatrix image = total_operator(s) * tb.basis;
  std::vector<std::size_t> e(r, 0);
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t i = 0; i < r && !moved; ++i) {
      QMatrix next = (res[i] - scalar_matrix(res[i].rows, tb.phi_values[i])) * image;
      if (!next.is_zero()) {
        image = next;
        ++e[i];
        moved = true;
      }
    }
  }
  for (std::size_t i = 0; i < r; ++i) s.Q[i] = poly_mul(s.Q[i], linear_power(tb.phi_values[i], e[i]));
  if (total_operator(s).is_zero()) fail(ErrorKind::ZeroProjection, "projection polynomials annihilate the module");
  return s;
}

DlSetup dl_setup_with(const std::vector<QMatrix>& res, std::vector<Poly> q_polys, std::size_t target) {
  DlSetup s;
  fill_common(s, res, target);
  if (q_polys.size() != res.size()) fail(ErrorKind::InvalidArgument, "need one polynomial per residue");
  s.Q = std::move(q_polys);
  QMatrix op = total_operator(s);
  if (op.is_zero()) fail(ErrorKind::ZeroProjection, "projection polynomials annihilate the module");
  const auto& tb = s.exps.blocks[target];
  for (std::size_t i = 0; i < res.size(); ++i)
    if (!((res[i] - scalar_matrix(res[i].rows, tb.phi_values[i])) * op).is_zero())
      fail(ErrorKind::InvalidArgument, "projection image is not a joint eigenspace");
  return s;
}

VecSeries dl_projection(const FineMonoid& m, const Embedding& emb, const DlSetup& s, const VecSeries& v,
                        std::int64_t l) {
  const std::size_t n = s.res[0].rows;
  const auto& blocks = s.exps.blocks;
  const auto& tb = blocks[s.target_block];
  VecSeries out;
  for (const auto& [x, w] : v) {
    if (w.size() != n) fail(ErrorKind::InvalidArgument, "section vector has wrong length");
    QVector y = w;
    for (std::size_t i = 0; i < s.res.size(); ++i) {
      QMatrix xi = s.res[i] + scalar_matrix(n, phi_coord(m, emb, x, i));
      QMatrix op = poly_eval(s.Q[i], xi);
      for (const auto& b : blocks) {
        QMatrix shifted = xi - scalar_matrix(n, b.phi_values[i]);
        const Q diff = tb.phi_values[i] - b.phi_values[i];
        for (std::int64_t j = 1; j <= l; ++j) {
          const Q jq(static_cast<long>(j));
          const Q den = (jq - diff) * (jq + diff);
          if (den == 0) fail(ErrorKind::DenominatorVanishes, "exponent difference is a non-zero integer within range");
          QMatrix f = (scalar_matrix(n, jq) - shifted) * (scalar_matrix(n, jq) + shifted);
          f = (1 / den) * f;
          op = mat_pow(f, s.q) * op;
        }
      }
      y = op * y;
    }
    bool zero = std::all_of(y.begin(), y.end(), [](const Q& c) { return c == 0; });
    if (!zero) out.emplace(x, y);
  }
  return out;
}

QVector dl_limit(const DlSetup& s, const VecSeries& v, std::size_t rank) {
  QVector w(rank, Q(0));
  for (const auto& [x, c] : v) {
    bool zero = std::all_of(x.begin(), x.end(), [](std::int64_t t) { return t == 0; });
    if (zero) w = c;
  }
  for (std::size_t i = 0; i < s.res.size(); ++i) w = poly_eval(s.Q[i], s.res[i]) * w;
  return w;
}

bool in_eigenspace(const DlSetup& s, const QVector& w) {
  const auto& tb = s.exps.blocks[s.target_block];
  for (std::size_t i = 0; i < s.res.size(); ++i) {
    QVector rw = s.res[i] * w;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (rw[k] != tb.phi_values[i] * w[k]) return false;
  }
  return true;
}

// ------------------------------------------------------------ homotopy

namespace {

int wedge_sign(std::uint32_t mask, std::size_t i) {
  return (__builtin_popcount(mask & ((1u << i) - 1u)) % 2) ? -1 : 1;
}

void add_form(Forms& f, const FormKey& k, const Q& c) {
  if (c == 0) return;
  auto it = f.find(k);
  if (it == f.end()) {
    f.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second == 0) f.erase(it);
}

}  // namespace

Forms nabla_F(const FineMonoid& m, const Embedding& emb, const QVector& eta, const Forms& w) {
  Forms out;
  for (const auto& [key, c] : w) {
    const auto& [x, mask] = key;
    for (std::size_t i = 0; i < emb.r(); ++i) {
      if (mask & (1u << i)) continue;
      Q coef = phi_coord(m, emb, x, i) + eta[i];
      add_form(out, {x, mask | (1u << i)}, Q(wedge_sign(mask, i)) * coef * c);
    }
  }
  return out;
}

Forms homotopy_phi(const FineMonoid& m, const Embedding& emb, const QVector& eta, const Forms& w) {
  Forms out;
  for (const auto& [key, c] : w) {
    const auto& [x, mask] = key;
    if (x == m.ambient().zero()) continue;
    std::optional<std::size_t> l;
    for (std::size_t i = 0; i < emb.r() && !l; ++i)
      if (phi_coord(m, emb, x, i) != 0) l = i;
    if (!l) fail(ErrorKind::InvalidArgument, "embedding vanishes on a non-zero exponent");
    if (!(mask & (1u << *l))) continue;
    Q den = phi_coord(m, emb, x, *l) + eta[*l];
    if (den == 0) fail(ErrorKind::DenominatorVanishes, "m_l + xi'_l - xi_l vanishes");
    add_form(out, {x, mask & ~(1u << *l)}, Q(wedge_sign(mask, *l)) * c / den);
  }
  return out;
}

HomotopyReport homotopy_check(const FineMonoid& m, const Embedding& emb, const QVector& xi, const QVector& xi_prime,
                              const std::vector<Forms>& tests) {
  if (emb.r() > 31) fail(ErrorKind::InvalidArgument, "too many coordinates for wedge masks");
  QVector diff(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) diff[j] = xi_prime[j] - xi[j];
  QVector eta = emb.apply(diff);
  HomotopyReport rep;
  for (const auto& w : tests) {
    Forms total = nabla_F(m, emb, eta, homotopy_phi(m, emb, eta, w));
    for (const auto& [k, c] : homotopy_phi(m, emb, eta, nabla_F(m, emb, eta, w))) add_form(total, k, c);
    for (const auto& [k, c] : w)
      if (k.first != m.ambient().zero()) add_form(total, k, -c);
    ++rep.forms_checked;
    for (const auto& [k, c] : total) {
      rep.zero = false;
      rep.nonzero_terms.push_back("t^" + elem_str(k.first) + " mask " + std::to_string(k.second) + ": " + to_string(c));
    }
  }
  return rep;
}

// ------------------------------------------------------------ log-convergence

LogConvergenceReport log_convergence_check(const LogNablaModule& e, const Radius& qa, const Q& q_eta,
                                           std::int64_t depth, unsigned long p) {
  if (q_eta <= 0) fail(ErrorKind::InvalidArgument, "eta must lie in (0,1)");
  const FineMonoid& m = e.monoid;
  const std::size_t n = e.rank, r = e.embedding.r();
  Weights wt(m);
  auto derive = [&](const VecSeries& v, std::size_t i, const Q& shift, const Q& divisor) {
    VecSeries out;
    auto add = [&](const Element& x, const QVector& c) {
      auto it = out.find(x);
      if (it == out.end()) {
        out.emplace(x, c);
      } else {
        for (std::size_t k = 0; k < n; ++k) it->second[k] += c[k];
      }
    };
    for (const auto& [x, c] : v) {
      Q f = (phi_coord(m, e.embedding, x, i) - shift) / divisor;
      QVector s(n);
      for (std::size_t k = 0; k < n; ++k) s[k] = f * c[k];
      add(x, s);
      for (const auto& [y, ay] : e.A[i]) {
        if (wt(x) + wt(y) > e.truncation) continue;
        QVector t = ay * c;
        for (auto& val : t) val /= divisor;
        add(m.ambient().add(x, y), t);
      }
    }
    for (auto it = out.begin(); it != out.end();)
      it = std::all_of(it->second.begin(), it->second.end(), [](const Q& c) { return c == 0; }) ? out.erase(it)
                                                                                                : std::next(it);
    return out;
  };
  auto norm = [&](const VecSeries& v) {
    ExtQ best = ExtQ::inf();
    for (const auto& [x, c] : v)
      for (const auto& val : c)
        if (val != 0) best = min(best, vp(val, p) + scale(Q(static_cast<long>(wt(x))), qa));
    return best;
  };

  LogConvergenceReport rep;
  std::vector<std::map<std::vector<std::int64_t>, std::vector<VecSeries>>> layers(depth + 1);
  {
    std::vector<VecSeries> basis;
    for (std::size_t k = 0; k < n; ++k) {
      QVector v(n, Q(0));
      v[k] = 1;
      basis.push_back({{m.ambient().zero(), v}});
    }
    layers[0][std::vector<std::int64_t>(r, 0)] = basis;
  }
  ExtQ running = ExtQ::inf();
  for (std::int64_t d = 0; d <= depth; ++d) {
    if (d > 0)
      for (const auto& [k, vs] : layers[d - 1])
        for (std::size_t i = 0; i < r; ++i) {
          std::vector<std::int64_t> kn = k;
          ++kn[i];
          // Extend only along the first non-zero index so each multi-index is built once.
          std::size_t first = 0;
          while (first < r && kn[first] == 0) ++first;
          if (first != i) continue;
          std::vector<VecSeries> next;
          for (const auto& v : vs)
            next.push_back(derive(v, i, Q(static_cast<long>(k[i])), Q(static_cast<long>(k[i] + 1))));
          layers[d][kn] = next;
        }
    ExtQ worst = ExtQ::inf();
    for (const auto& [k, vs] : layers[d])
      for (const auto& v : vs) worst = min(worst, norm(v));
    if (!worst.infinite) worst = ExtQ::of(worst.value + Q(static_cast<long>(d)) * q_eta);
    rep.rows.push_back({d, worst});
    if (d > 0 && worst < running) rep.verdict = false;
    running = min(running, worst);
  }
  return rep;
}

}  // namespace logmon
