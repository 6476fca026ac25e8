// Dense exact linear algebra over Z and Q: Smith normal form, row reduction,
// kernels, solves, characteristic polynomials and rational root isolation.
#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "logmon/rational.hpp"

namespace logmon {

template <class T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}

  T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  bool operator==(const Matrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
  bool is_zero() const {
    for (const auto& x : a)
      if (x != 0) return false;
    return true;
  }
};

using ZMatrix = Matrix<Z>;
using QMatrix = Matrix<Q>;
using QVector = std::vector<Q>;

QMatrix operator*(const QMatrix& x, const QMatrix& y);
QMatrix operator+(const QMatrix& x, const QMatrix& y);
QMatrix operator-(const QMatrix& x, const QMatrix& y);
QMatrix operator*(const Q& c, const QMatrix& x);
QVector operator*(const QMatrix& x, const QVector& v);
ZMatrix operator*(const ZMatrix& x, const ZMatrix& y);

QMatrix to_q(const ZMatrix& m);
QMatrix transpose(const QMatrix& m);
QMatrix column(const QVector& v);
QVector column_of(const QMatrix& m, std::size_t j);
QMatrix hstack(const QMatrix& x, const QMatrix& y);
QMatrix select_columns(const QMatrix& m, const std::vector<std::size_t>& cols);

// Smith normal form: U * A * V = D with U, V unimodular; D diagonal with
// non-negative entries d_0 | d_1 | ... followed by zeros.
struct Smith {
  ZMatrix U, Uinv, V, D;
  std::size_t rank = 0;
  Z diag(std::size_t i) const { return D(i, i); }
};
Smith smith(const ZMatrix& A);

// Integer solution of A z = b, if any.
std::optional<std::vector<Z>> solve_integer(const Smith& s, const std::vector<Z>& b);
// Basis (columns) of the integer kernel of A.
ZMatrix integer_kernel(const Smith& s);

struct Rref {
  QMatrix r;
  std::vector<std::size_t> pivots;
};
Rref rref(const QMatrix& m);
std::size_t rank(const QMatrix& m);
// Columns form a basis of the right kernel.
QMatrix kernel(const QMatrix& m);
// Some X with A X = B, or nullopt if inconsistent.
std::optional<QMatrix> solve(const QMatrix& A, const QMatrix& B);
std::optional<QMatrix> inverse(const QMatrix& A);
// Indices of a maximal linearly independent subset of the columns, greedy from the left.
std::vector<std::size_t> independent_columns(const QMatrix& m);

// Polynomials are coefficient vectors, lowest degree first.
using Poly = std::vector<Q>;
Poly charpoly(const QMatrix& m);
Poly poly_trim(Poly p);
Poly poly_mul(const Poly& a, const Poly& b);
Q poly_eval(const Poly& p, const Q& x);
QMatrix poly_eval(const Poly& p, const QMatrix& m);

struct RootSplit {
  std::vector<std::pair<Q, int>> roots;  // ascending, with multiplicity
  int residual_degree = 0;               // degree of the factor without rational roots
};
RootSplit rational_roots(const Poly& p);

// Smallest e >= 0 with m^e = 0, or nullopt when m is not nilpotent.
std::optional<std::size_t> nilpotency_index(const QMatrix& m);

// Minimum p-adic valuation of the entries (+inf for the zero matrix).
ExtQ valuation(const QMatrix& m, unsigned long p);

}  // namespace logmon
