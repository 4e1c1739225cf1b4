#pragma once
// Dense revised simplex for the small/medium LPs this project builds.
//   minimize c'v  subject to  A v (<= or =) b,  v >= 0
// Two phases with explicit artificials, Dantzig pricing with a Bland's-rule
// fallback once degeneracy drags on, and an explicitly maintained dense basis
// inverse (periodically refactorized).

#include <string>
#include <utility>
#include <vector>

namespace fulfill {

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  char relation = '<';                         // '<' means <=, '=' equality
  double rhs = 0;
};

struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;  // size num_vars
  std::vector<LpRow> rows;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double feas_tol = 1e-7;
  long long max_iterations = 0;   // 0: 200*(rows+vars)+1000
  long long degenerate_switch = 0;  // pivots before Bland's rule; 0: 10*(rows+vars)
  int refactor_every = 200;
};

struct SimplexResult {
  LpStatus status = LpStatus::optimal;
  double objective = 0;
  std::vector<double> values;  // structural variables only
  long long iterations = 0;
  double max_residual = 0;  // max constraint violation at exit
  std::string note;         // on failure: certificate of the last basis
};

SimplexResult solve_simplex(const LpProblem& lp, const SimplexOptions& opts = {});

}  // namespace fulfill
