// Exact rationals, p-adic valuations and the extended value type used for
// valuations and radius exponents.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace logmon {

using Z = mpz_class;
using Q = mpq_class;

// A rational number or +infinity. Used for p-adic valuations (v(0) = +inf)
// and for radius exponents (radius p^{-q}, q = +inf meaning radius 0).
struct ExtQ {
  bool infinite = false;
  Q value = 0;

  static ExtQ inf() { return ExtQ{true, 0}; }
  static ExtQ of(const Q& v) { return ExtQ{false, v}; }
};

bool operator==(const ExtQ& a, const ExtQ& b);
bool operator<(const ExtQ& a, const ExtQ& b);
inline bool operator!=(const ExtQ& a, const ExtQ& b) { return !(a == b); }
inline bool operator<=(const ExtQ& a, const ExtQ& b) { return !(b < a); }
inline bool operator>(const ExtQ& a, const ExtQ& b) { return b < a; }
inline bool operator>=(const ExtQ& a, const ExtQ& b) { return !(a < b); }
ExtQ operator+(const ExtQ& a, const ExtQ& b);
// Multiplication by a non-negative rational; 0 * inf = 0.
ExtQ scale(const Q& c, const ExtQ& a);
ExtQ min(const ExtQ& a, const ExtQ& b);

// p-adic valuation of a non-zero integer.
long vp(const Z& x, unsigned long p);
// p-adic valuation of a rational, +inf for zero.
ExtQ vp(const Q& x, unsigned long p);

bool is_prime(long p);

Q floor_q(const Q& x);
Z lcm_den(const std::vector<Q>& xs);

// Canonical text form: "a" or "a/b" in lowest terms.
std::string to_string(const Q& x);
std::string to_string(const ExtQ& x);
// Accepts "a", "-a", "a/b"; throws std::invalid_argument on malformed input.
Q parse_q(const std::string& s);

Q factorial(long n);

}  // namespace logmon
