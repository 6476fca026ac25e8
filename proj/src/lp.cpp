#include "logmon/lp.hpp"

#include <stdexcept>

namespace logmon {

namespace {

struct Tableau {
  std::vector<QVector> t;  // rows, last entry is the right-hand side
  QVector obj;             // reduced costs, last entry is -objective value
  std::vector<std::size_t> basis;
  std::size_t ncols = 0;

  void pivot(std::size_t r, std::size_t c) {
    Q inv = 1 / t[r][c];
    for (auto& x : t[r]) x *= inv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || t[i][c] == 0) continue;
      Q f = t[i][c];
      for (std::size_t j = 0; j <= ncols; ++j) t[i][j] -= f * t[r][j];
    }
    if (obj[c] != 0) {
      Q f = obj[c];
      for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  void price(const QVector& cost) {
    obj.assign(ncols + 1, Q(0));
    for (std::size_t j = 0; j < ncols; ++j) obj[j] = cost[j];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Q& cb = cost[basis[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= cb * t[i][j];
    }
  }

  // Returns false when unbounded.
  bool run(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = ncols;
      for (std::size_t j = 0; j < ncols; ++j)
        if (allowed[j] && obj[j] < 0) {
          enter = j;
          break;
        }
      if (enter == ncols) return true;
      std::size_t leave = t.size();
      Q best;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i][enter] <= 0) continue;
        Q ratio = t[i][ncols] / t[i][enter];
        if (leave == t.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.size()) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.nvars;
  auto is_free = [&](std::size_t j) { return !lp.free_var.empty() && lp.free_var[j]; };
  // Column layout: split variables, then one slack per inequality, then artificials.
  std::vector<std::size_t> pos(n), neg(n, SIZE_MAX);
  std::size_t col = 0;
  for (std::size_t j = 0; j < n; ++j) {
    pos[j] = col++;
    if (is_free(j)) neg[j] = col++;
  }
  const std::size_t nstruct = col;
  std::size_t nslack = 0;
  for (const auto& r : lp.rows)
    if (r.op != LpRow::EQ) ++nslack;
  const std::size_t m = lp.rows.size();
  Tableau tb;
  tb.ncols = nstruct + nslack + m;
  tb.t.assign(m, QVector(tb.ncols + 1, Q(0)));
  tb.basis.resize(m);
  std::size_t slack = nstruct;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = lp.rows[i];
    if (r.a.size() != n) throw std::invalid_argument("solve_lp: row length mismatch");
    auto& row = tb.t[i];
    for (std::size_t j = 0; j < n; ++j) {
      row[pos[j]] = r.a[j];
      if (neg[j] != SIZE_MAX) row[neg[j]] = -r.a[j];
    }
    if (r.op == LpRow::LE) row[slack++] = 1;
    if (r.op == LpRow::GE) row[slack++] = -1;
    row[tb.ncols] = r.b;
    if (r.b < 0)
      for (auto& x : row) x = -x;
    row[nstruct + nslack + i] = 1;
    tb.basis[i] = nstruct + nslack + i;
  }
  const std::size_t art0 = nstruct + nslack;

  QVector cost1(tb.ncols, Q(0));
  for (std::size_t i = 0; i < m; ++i) cost1[art0 + i] = 1;
  tb.price(cost1);
  std::vector<bool> allowed(tb.ncols, true);
  tb.run(allowed);
  LpResult res;
  if (-tb.obj[tb.ncols] > 0) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  // Drive remaining artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < tb.t.size();) {
    if (tb.basis[i] < art0) {
      ++i;
      continue;
    }
    std::size_t c = art0;
    for (std::size_t j = 0; j < art0; ++j)
      if (tb.t[i][j] != 0) {
        c = j;
        break;
      }
    if (c < art0) {
      tb.pivot(i, c);
      ++i;
    } else {
      tb.t.erase(tb.t.begin() + static_cast<long>(i));
      tb.basis.erase(tb.basis.begin() + static_cast<long>(i));
    }
  }
  for (std::size_t j = art0; j < tb.ncols; ++j) allowed[j] = false;
  QVector cost2(tb.ncols, Q(0));
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) {
    cost2[pos[j]] = lp.objective[j];
    if (neg[j] != SIZE_MAX) cost2[neg[j]] = -lp.objective[j];
  }
  tb.price(cost2);
  if (!tb.run(allowed)) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  QVector xs(tb.ncols, Q(0));
  for (std::size_t i = 0; i < tb.t.size(); ++i) xs[tb.basis[i]] = tb.t[i][tb.ncols];
  res.x.assign(n, Q(0));
  for (std::size_t j = 0; j < n; ++j) {
    res.x[j] = xs[pos[j]];
    if (neg[j] != SIZE_MAX) res.x[j] -= xs[neg[j]];
  }
  res.objective = 0;
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) res.objective += lp.objective[j] * res.x[j];
  res.status = LpStatus::Optimal;
  return res;
}

}  // namespace logmon
