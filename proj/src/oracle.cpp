#include "logmon/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace logmon::oracle {

namespace {

std::map<Element, std::int64_t> ball(const FineMonoid& m, const std::vector<std::size_t>& gens,
                                     const EnumerationBudget& b) {
  if (!m.is_sharp()) fail(ErrorKind::InvalidArgument, "enumeration needs a sharp monoid");
  const auto& amb = m.ambient();
  std::map<Element, std::int64_t> seen{{amb.zero(), 0}};
  std::deque<Element> queue{amb.zero()};
  while (!queue.empty()) {
    Element x = queue.front();
    queue.pop_front();
    const std::int64_t w = seen[x];
    for (auto g : gens) {
      const std::int64_t wn = w + m.weights()[g];
      if (wn > b.weight_bound) continue;
      Element y = amb.add(x, m.generators()[g]);
      if (seen.count(y)) continue;
      if (seen.size() >= b.element_cap) fail(ErrorKind::BudgetExceeded, "enumeration exceeded the element cap");
      seen.emplace(y, wn);
      queue.push_back(y);
    }
  }
  return seen;
}

std::vector<std::size_t> all_generators(const FineMonoid& m) {
  std::vector<std::size_t> g(m.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = i;
  return g;
}

}  // namespace

std::vector<Element> enumerate_monoid(const FineMonoid& m, const EnumerationBudget& b) {
  auto s = ball(m, all_generators(m), b);
  std::vector<std::pair<std::int64_t, Element>> v;
  for (const auto& [x, w] : s) v.emplace_back(w, x);
  std::sort(v.begin(), v.end());
  std::vector<Element> out;
  for (auto& [w, x] : v) out.push_back(x);
  return out;
}

bool brute_contains(const FineMonoid& m, const Element& g, const EnumerationBudget& b) {
  Element x = m.ambient().reduce(g);
  if (m.weight(x) > b.weight_bound) fail(ErrorKind::BudgetExceeded, "element is heavier than the enumeration bound");
  return ball(m, all_generators(m), b).count(x) > 0;
}

std::vector<std::set<Element>> brute_faces(const FineMonoid& m, const EnumerationBudget& b) {
  const std::size_t n = m.size();
  if (n > 20) fail(ErrorKind::BudgetExceeded, "too many generators for subset enumeration");
  auto full = ball(m, all_generators(m), b);
  std::vector<Element> elems;
  for (const auto& [x, w] : full) elems.push_back(x);
  std::vector<std::set<Element>> out;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::vector<std::size_t> gens;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ull << i)) gens.push_back(i);
    std::set<Element> f;
    for (const auto& [x, w] : ball(m, gens, b)) f.insert(x);
    bool ok = true;
    for (std::size_t i = 0; i < elems.size() && ok; ++i)
      for (std::size_t j = i; j < elems.size() && ok; ++j) {
        Element s = m.ambient().add(elems[i], elems[j]);
        if (!full.count(s) || !f.count(s)) continue;
        if (!f.count(elems[i]) || !f.count(elems[j])) ok = false;
      }
    if (ok && std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return out;
}

std::set<Element> face_ball(const FineMonoid& m, const Face& f, const EnumerationBudget& b) {
  std::set<Element> out;
  for (const auto& [x, w] : ball(m, f.generators, b)) out.insert(x);
  return out;
}

std::int64_t brute_h_plus(const FineMonoid& m, const Element& x, const EnumerationBudget& b) {
  auto full = ball(m, all_generators(m), b);
  std::optional<std::int64_t> best;
  for (const auto& [y, w] : full) {
    if (best && w >= *best) continue;
    if (full.count(m.ambient().sub(y, x))) best = w;
  }
  if (!best) fail(ErrorKind::BudgetExceeded, "no witness inside the enumeration bound");
  return *best;
}

MatSeries brute_shear_order(const LogNablaModule& e, std::int64_t k) {
  const FineMonoid& m = e.monoid;
  const auto& amb = m.ambient();
  const std::size_t n = e.rank, n2 = n * n, r = e.embedding.r();
  EnumerationBudget b{k, 200000};
  std::vector<Element> elems;
  for (const auto& x : enumerate_monoid(m, b))
    if (x != amb.zero()) elems.push_back(x);
  std::map<Element, std::size_t> index;
  for (std::size_t t = 0; t < elems.size(); ++t) index[elems[t]] = t;
  const std::size_t unknowns = elems.size() * n2;
  QMatrix sys(r * elems.size() * n2, unknowns);
  QMatrix rhs(r * elems.size() * n2, 1);
  const Element zero = amb.zero();
  for (std::size_t i = 0; i < r; ++i) {
    const QMatrix a0 = e.term(i, zero);
    for (std::size_t t = 0; t < elems.size(); ++t) {
      const Element& x = elems[t];
      const Q mi = e.embedding.apply(m, x)[i];
      const std::size_t row0 = (i * elems.size() + t) * n2;
      // a0 B_x - B_x a0 + m_i B_x
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          const std::size_t row = row0 + p * n + q;
          for (std::size_t c = 0; c < n; ++c) {
            sys(row, t * n2 + c * n + q) += a0(p, c);
            sys(row, t * n2 + p * n + c) -= a0(c, q);
          }
          sys(row, t * n2 + p * n + q) += mi;
        }
      // + sum over y != 0 of A_y B_{x-y}, with B_0 = I moved to the right-hand side
      for (const auto& [y, ay] : e.A[i]) {
        if (y == zero) continue;
        Element rest = amb.sub(x, y);
        if (rest == zero) {
          for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) rhs(row0 + p * n + q, 0) -= ay(p, q);
          continue;
        }
        auto it = index.find(rest);
        if (it == index.end()) continue;
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q)
            for (std::size_t c = 0; c < n; ++c) sys(row0 + p * n + q, it->second * n2 + c * n + q) += ay(p, c);
      }
    }
  }
  if (rank(sys) != unknowns) fail(ErrorKind::SingularSystem, "gauge system is not uniquely solvable");
  auto sol = solve(sys, rhs);
  if (!sol) fail(ErrorKind::SingularSystem, "gauge system is inconsistent");
  MatSeries out{{zero, QMatrix::identity(n)}};
  for (std::size_t t = 0; t < elems.size(); ++t) {
    QMatrix bx(n, n);
    for (std::size_t c = 0; c < n2; ++c) bx.a[c] = (*sol)(t * n2 + c, 0);
    if (!bx.is_zero()) out.emplace(elems[t], bx);
  }
  return out;
}

}  // namespace logmon::oracle
