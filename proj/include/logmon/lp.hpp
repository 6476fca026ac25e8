// Exact rational linear programming (two-phase simplex with Bland's rule).
#pragma once

#include <vector>

#include "logmon/linalg.hpp"

namespace logmon {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpRow {
  enum Op { LE, EQ, GE };
  QVector a;
  Op op = EQ;
  Q b = 0;
};

struct LinearProgram {
  std::size_t nvars = 0;
  std::vector<bool> free_var;  // empty means every variable is non-negative
  std::vector<LpRow> rows;
  QVector objective;           // minimised; empty means pure feasibility
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  QVector x;
  Q objective = 0;
};

LpResult solve_lp(const LinearProgram& lp);

}  // namespace logmon
