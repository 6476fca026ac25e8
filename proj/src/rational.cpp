#include "logmon/rational.hpp"

#include <stdexcept>

namespace logmon {

bool operator==(const ExtQ& a, const ExtQ& b) {
  if (a.infinite || b.infinite) return a.infinite == b.infinite;
  return a.value == b.value;
}

bool operator<(const ExtQ& a, const ExtQ& b) {
  if (a.infinite) return false;
  if (b.infinite) return true;
  return a.value < b.value;
}

ExtQ operator+(const ExtQ& a, const ExtQ& b) {
  if (a.infinite || b.infinite) return ExtQ::inf();
  return ExtQ::of(a.value + b.value);
}

ExtQ scale(const Q& c, const ExtQ& a) {
  if (c < 0) throw std::invalid_argument("scale: negative factor");
  if (c == 0) return ExtQ::of(0);
  if (a.infinite) return ExtQ::inf();
  return ExtQ::of(c * a.value);
}

ExtQ min(const ExtQ& a, const ExtQ& b) { return b < a ? b : a; }

long vp(const Z& x, unsigned long p) {
  if (x == 0) throw std::invalid_argument("vp of zero");
  Z y = abs(x);
  long v = 0;
  while (mpz_divisible_ui_p(y.get_mpz_t(), p)) {
    mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
    ++v;
  }
  return v;
}

ExtQ vp(const Q& x, unsigned long p) {
  if (x == 0) return ExtQ::inf();
  return ExtQ::of(Q(vp(x.get_num(), p) - vp(x.get_den(), p)));
}

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

Q floor_q(const Q& x) {
  Z f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return Q(f);
}

Z lcm_den(const std::vector<Q>& xs) {
  Z l = 1;
  for (const auto& x : xs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

std::string to_string(const Q& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_string(const ExtQ& x) { return x.infinite ? "inf" : to_string(x.value); }

Q parse_q(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  auto parse_int = [&](const std::string& t) {
    if (t.empty()) throw std::invalid_argument("malformed rational: " + s);
    size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (start == t.size()) throw std::invalid_argument("malformed rational: " + s);
    for (size_t i = start; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') throw std::invalid_argument("malformed rational: " + s);
    return Z(t[0] == '+' ? t.substr(1) : t);
  };
  if (slash == std::string::npos) return Q(parse_int(s));
  Z num = parse_int(s.substr(0, slash));
  Z den = parse_int(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator: " + s);
  Q q(num, den);
  q.canonicalize();
  return q;
}

Q factorial(long n) {
  Z f = 1;
  for (long k = 2; k <= n; ++k) f *= k;
  return Q(f);
}

}  // namespace logmon
