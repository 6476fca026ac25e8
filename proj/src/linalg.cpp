#include "logmon/linalg.hpp"

#include <algorithm>
#include <stdexcept>

#include "logmon/errors.hpp"

namespace logmon {

QMatrix operator*(const QMatrix& x, const QMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix product: shape mismatch");
  QMatrix r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const Q& xik = x(i, k);
      if (xik == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

ZMatrix operator*(const ZMatrix& x, const ZMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix product: shape mismatch");
  ZMatrix r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      if (x(i, k) == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
    }
  return r;
}

QMatrix operator+(const QMatrix& x, const QMatrix& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix sum: shape mismatch");
  QMatrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

QMatrix operator-(const QMatrix& x, const QMatrix& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix difference: shape mismatch");
  QMatrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

QMatrix operator*(const Q& c, const QMatrix& x) {
  QMatrix r = x;
  for (auto& v : r.a) v *= c;
  return r;
}

QVector operator*(const QMatrix& x, const QVector& v) {
  if (x.cols != v.size()) throw std::invalid_argument("matrix-vector product: shape mismatch");
  QVector r(x.rows, Q(0));
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) r[i] += x(i, j) * v[j];
  return r;
}

QMatrix to_q(const ZMatrix& m) {
  QMatrix r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = Q(m.a[i]);
  return r;
}

QMatrix transpose(const QMatrix& m) {
  QMatrix r(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r(j, i) = m(i, j);
  return r;
}

QMatrix column(const QVector& v) {
  QMatrix r(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) r(i, 0) = v[i];
  return r;
}

QVector column_of(const QMatrix& m, std::size_t j) {
  QVector v(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) v[i] = m(i, j);
  return v;
}

QMatrix hstack(const QMatrix& x, const QMatrix& y) {
  if (x.rows != y.rows) throw std::invalid_argument("hstack: row mismatch");
  QMatrix r(x.rows, x.cols + y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) r(i, j) = x(i, j);
    for (std::size_t j = 0; j < y.cols; ++j) r(i, x.cols + j) = y(i, j);
  }
  return r;
}

QMatrix select_columns(const QMatrix& m, const std::vector<std::size_t>& cols) {
  QMatrix r(m.rows, cols.size());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) r(i, j) = m(i, cols[j]);
  return r;
}

// ---------------------------------------------------------------- Smith form

namespace {

struct SmithWork {
  Smith& s;
  std::size_t m, n;

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < n; ++c) std::swap(s.D(i, c), s.D(j, c));
    for (std::size_t c = 0; c < m; ++c) std::swap(s.U(i, c), s.U(j, c));
    for (std::size_t r = 0; r < m; ++r) std::swap(s.Uinv(r, i), s.Uinv(r, j));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < m; ++r) std::swap(s.D(r, i), s.D(r, j));
    for (std::size_t r = 0; r < n; ++r) std::swap(s.V(r, i), s.V(r, j));
  }
  // row dst += q * row src
  void add_row(std::size_t dst, std::size_t src, const Z& q) {
    if (q == 0) return;
    for (std::size_t c = 0; c < n; ++c) s.D(dst, c) += q * s.D(src, c);
    for (std::size_t c = 0; c < m; ++c) s.U(dst, c) += q * s.U(src, c);
    for (std::size_t r = 0; r < m; ++r) s.Uinv(r, src) -= q * s.Uinv(r, dst);
  }
  // col dst += q * col src
  void add_col(std::size_t dst, std::size_t src, const Z& q) {
    if (q == 0) return;
    for (std::size_t r = 0; r < m; ++r) s.D(r, dst) += q * s.D(r, src);
    for (std::size_t r = 0; r < n; ++r) s.V(r, dst) += q * s.V(r, src);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < n; ++c) s.D(i, c) = -s.D(i, c);
    for (std::size_t c = 0; c < m; ++c) s.U(i, c) = -s.U(i, c);
    for (std::size_t r = 0; r < m; ++r) s.Uinv(r, i) = -s.Uinv(r, i);
  }
};

Z fdiv(const Z& a, const Z& b) {
  Z q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

Smith smith(const ZMatrix& A) {
  Smith s;
  const std::size_t m = A.rows, n = A.cols;
  s.D = A;
  s.U = ZMatrix::identity(m);
  s.Uinv = ZMatrix::identity(m);
  s.V = ZMatrix::identity(n);
  SmithWork w{s, m, n};
  auto& D = s.D;
  std::size_t t = 0;
  while (t < std::min(m, n)) {
    bool found = false;
    std::size_t pi = 0, pj = 0;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (D(i, j) != 0 && (!found || abs(D(i, j)) < abs(D(pi, pj)))) {
          found = true;
          pi = i;
          pj = j;
        }
    if (!found) break;
    w.swap_rows(t, pi);
    w.swap_cols(t, pj);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i)
        if (D(i, t) != 0) {
          w.add_row(i, t, -fdiv(D(i, t), D(t, t)));
          if (D(i, t) != 0) clean = false;
        }
      for (std::size_t j = t + 1; j < n; ++j)
        if (D(t, j) != 0) {
          w.add_col(j, t, -fdiv(D(t, j), D(t, t)));
          if (D(t, j) != 0) clean = false;
        }
      if (!clean) {
        std::size_t bi = t, bj = t;
        for (std::size_t i = t + 1; i < m; ++i)
          if (D(i, t) != 0 && abs(D(i, t)) < abs(D(bi, bj))) { bi = i; bj = t; }
        for (std::size_t j = t + 1; j < n; ++j)
          if (D(t, j) != 0 && abs(D(t, j)) < abs(D(bi, bj))) { bi = t; bj = j; }
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        continue;
      }
      bool divisible = true;
      for (std::size_t i = t + 1; i < m && divisible; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) {
            w.add_row(t, i, 1);
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (D(t, t) < 0) w.negate_row(t);
    ++t;
  }
  s.rank = t;
  return s;
}

std::optional<std::vector<Z>> solve_integer(const Smith& s, const std::vector<Z>& b) {
  const std::size_t m = s.D.rows, n = s.D.cols;
  if (b.size() != m) throw std::invalid_argument("solve_integer: size mismatch");
  std::vector<Z> y(m, Z(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) y[i] += s.U(i, j) * b[j];
  std::vector<Z> wv(n, Z(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (i < s.rank) {
      if (!mpz_divisible_p(y[i].get_mpz_t(), s.D(i, i).get_mpz_t())) return std::nullopt;
      wv[i] = y[i] / s.D(i, i);
    } else if (y[i] != 0) {
      return std::nullopt;
    }
  }
  std::vector<Z> z(n, Z(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) z[i] += s.V(i, j) * wv[j];
  return z;
}

ZMatrix integer_kernel(const Smith& s) {
  const std::size_t n = s.D.cols;
  ZMatrix k(n, n - s.rank);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = s.rank; j < n; ++j) k(i, j - s.rank) = s.V(i, j);
  return k;
}

// ---------------------------------------------------------------- over Q

Rref rref(const QMatrix& m) {
  Rref out{m, {}};
  QMatrix& r = out.r;
  std::size_t row = 0;
  for (std::size_t c = 0; c < r.cols && row < r.rows; ++c) {
    std::size_t piv = row;
    while (piv < r.rows && r(piv, c) == 0) ++piv;
    if (piv == r.rows) continue;
    if (piv != row)
      for (std::size_t j = 0; j < r.cols; ++j) std::swap(r(piv, j), r(row, j));
    Q inv = 1 / r(row, c);
    for (std::size_t j = c; j < r.cols; ++j) r(row, j) *= inv;
    for (std::size_t i = 0; i < r.rows; ++i) {
      if (i == row || r(i, c) == 0) continue;
      Q f = r(i, c);
      for (std::size_t j = c; j < r.cols; ++j) r(i, j) -= f * r(row, j);
    }
    out.pivots.push_back(c);
    ++row;
  }
  return out;
}

std::size_t rank(const QMatrix& m) { return rref(m).pivots.size(); }

QMatrix kernel(const QMatrix& m) {
  Rref rr = rref(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto p : rr.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  QMatrix k(m.cols, free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    k(free_cols[f], f) = 1;
    for (std::size_t i = 0; i < rr.pivots.size(); ++i) k(rr.pivots[i], f) = -rr.r(i, free_cols[f]);
  }
  return k;
}

std::optional<QMatrix> solve(const QMatrix& A, const QMatrix& B) {
  if (A.rows != B.rows) throw std::invalid_argument("solve: row mismatch");
  Rref rr = rref(hstack(A, B));
  QMatrix X(A.cols, B.cols);
  for (std::size_t i = 0; i < rr.pivots.size(); ++i) {
    std::size_t c = rr.pivots[i];
    if (c >= A.cols) return std::nullopt;
    for (std::size_t j = 0; j < B.cols; ++j) X(c, j) = rr.r(i, A.cols + j);
  }
  return X;
}

std::optional<QMatrix> inverse(const QMatrix& A) {
  if (A.rows != A.cols) return std::nullopt;
  Rref rr = rref(hstack(A, QMatrix::identity(A.rows)));
  for (std::size_t i = 0; i < A.rows; ++i)
    if (i >= rr.pivots.size() || rr.pivots[i] != i) return std::nullopt;
  QMatrix inv(A.rows, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.rows; ++j) inv(i, j) = rr.r(i, A.rows + j);
  return inv;
}

std::vector<std::size_t> independent_columns(const QMatrix& m) { return rref(m).pivots; }

// ---------------------------------------------------------------- polynomials

Poly poly_trim(Poly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Q(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return poly_trim(r);
}

Q poly_eval(const Poly& p, const Q& x) {
  Q r = 0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

QMatrix poly_eval(const Poly& p, const QMatrix& m) {
  QMatrix r(m.rows, m.cols);
  for (std::size_t i = p.size(); i-- > 0;) r = r * m + p[i] * QMatrix::identity(m.rows);
  return r;
}

Poly charpoly(const QMatrix& a) {
  const std::size_t n = a.rows;
  Poly c(n + 1, Q(0));
  c[n] = 1;
  QMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = a * mk + c[n - k + 1] * QMatrix::identity(n);
    QMatrix am = a * mk;
    Q tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    c[n - k] = -tr / Q(static_cast<long>(k));
  }
  return c;
}

namespace {

std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b) {
  Poly bt = poly_trim(b);
  if (bt.empty()) throw std::invalid_argument("polynomial division by zero");
  a = poly_trim(a);
  if (a.size() < bt.size()) return {{}, a};
  Poly q(a.size() - bt.size() + 1, Q(0));
  for (std::size_t k = q.size(); k-- > 0;) {
    Q coef = a[k + bt.size() - 1] / bt.back();
    q[k] = coef;
    for (std::size_t j = 0; j < bt.size(); ++j) a[k + j] -= coef * bt[j];
  }
  return {poly_trim(q), poly_trim(a)};
}

Poly poly_gcd(Poly a, Poly b) {
  a = poly_trim(a);
  b = poly_trim(b);
  while (!b.empty()) {
    Poly r = poly_divmod(a, b).second;
    a = b;
    b = r;
  }
  if (!a.empty()) {
    Q lead = a.back();
    for (auto& x : a) x /= lead;
  }
  return a;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Q(static_cast<long>(i)));
  return poly_trim(d);
}

std::vector<Z> divisors(Z x) {
  x = abs(x);
  std::vector<std::pair<Z, int>> factors;
  Z d = 2;
  long steps = 0;
  while (d * d <= x) {
    if (mpz_probab_prime_p(x.get_mpz_t(), 30) == 2) break;
    if (++steps > 20000000) fail(ErrorKind::BudgetExceeded, "rational root search: coefficient too large to factor");
    if (mpz_divisible_p(x.get_mpz_t(), d.get_mpz_t())) {
      int e = 0;
      while (mpz_divisible_p(x.get_mpz_t(), d.get_mpz_t())) {
        x /= d;
        ++e;
      }
      factors.push_back({d, e});
    }
    d += (d == 2) ? 1 : 2;
  }
  if (x > 1) factors.push_back({x, 1});
  std::vector<Z> divs{Z(1)};
  for (const auto& [pf, e] : factors) {
    std::vector<Z> next;
    for (const auto& dv : divs) {
      Z pw = 1;
      for (int k = 0; k <= e; ++k) {
        next.push_back(dv * pw);
        pw *= pf;
      }
    }
    divs = std::move(next);
  }
  return divs;
}

}  // namespace

RootSplit rational_roots(const Poly& p_in) {
  RootSplit out;
  Poly p = poly_trim(p_in);
  if (p.size() <= 1) return out;
  std::vector<std::pair<Q, int>> roots;
  int zero_mult = 0;
  while (p.size() > 1 && p[0] == 0) {
    p.erase(p.begin());
    ++zero_mult;
  }
  if (zero_mult > 0) roots.push_back({Q(0), zero_mult});
  if (p.size() > 1) {
    Poly sq = poly_divmod(p, poly_gcd(p, derivative(p))).first;
    Z l = lcm_den(sq);
    std::vector<Z> ints;
    for (const auto& c : sq) ints.push_back(Q(c * l).get_num());
    Z content = 0;
    for (const auto& c : ints) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
    for (auto& c : ints) c /= content;
    std::vector<Z> dn = divisors(ints.front());
    std::vector<Z> dd = divisors(ints.back());
    std::vector<Q> cands;
    for (const auto& a : dn)
      for (const auto& b : dd) {
        Q c(a, b);
        c.canonicalize();
        cands.push_back(c);
        cands.push_back(-c);
      }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (const auto& c : cands) {
      if (poly_eval(sq, c) != 0) continue;
      int mult = 0;
      Poly lin{-c, Q(1)};
      for (;;) {
        auto [q, r] = poly_divmod(p, lin);
        if (!r.empty()) break;
        p = q;
        ++mult;
      }
      roots.push_back({c, mult});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  out.roots = roots;
  out.residual_degree = static_cast<int>(poly_trim(p).size()) - 1;
  return out;
}

std::optional<std::size_t> nilpotency_index(const QMatrix& m) {
  const std::size_t n = m.rows;
  QMatrix pw = QMatrix::identity(n);
  for (std::size_t e = 0; e <= n; ++e) {
    if (pw.is_zero()) return e;
    pw = pw * m;
  }
  return std::nullopt;
}

ExtQ valuation(const QMatrix& m, unsigned long p) {
  ExtQ v = ExtQ::inf();
  for (const auto& x : m.a) v = min(v, vp(x, p));
  return v;
}

}  // namespace logmon
