#include "fulfill/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace fulfill {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
  }
  return "?";
}

namespace {

using Col = std::vector<std::pair<int, double>>;  // (row, value)

struct Tableau {
  int m = 0;                 // rows
  int total = 0;             // all columns (structural + slack + artificial)
  int structural = 0;
  int first_artificial = 0;  // columns >= this are artificials
  std::vector<Col> cols;
  std::vector<double> b;         // normalized rhs (>= 0)
  std::vector<double> cost;      // phase-2 cost per column
  std::vector<int> basis;        // basic column per row
  std::vector<char> in_basis;    // per column
  std::vector<double> binv;      // dense m x m, row-major
  std::vector<double> xb;        // basic variable values

  double& Binv(int r, int c) { return binv[size_t(r) * m + c]; }
};

// direction = Binv * A_col (dense result from a sparse column)
void ftran(Tableau& t, const Col& col, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (auto [r, v] : col)
    for (int i = 0; i < t.m; ++i) out[i] += t.Binv(i, r) * v;
}

// Rebuilds Binv from the basis columns by Gauss-Jordan with partial
// pivoting, then recomputes xb.  Returns false on a (numerically) singular
// basis.
bool refactorize(Tableau& t) {
  const int m = t.m;
  std::vector<double> work(size_t(m) * m, 0.0);  // basis matrix, row-major
  for (int c = 0; c < m; ++c)
    for (auto [r, v] : t.cols[t.basis[c]]) work[size_t(r) * m + c] = v;
  std::vector<double> inv(size_t(m) * m, 0.0);
  for (int i = 0; i < m; ++i) inv[size_t(i) * m + i] = 1.0;
  for (int c = 0; c < m; ++c) {
    int piv = -1;
    double best = 1e-12;
    for (int r = c; r < m; ++r) {
      double v = std::fabs(work[size_t(r) * m + c]);
      if (v > best) { best = v; piv = r; }
    }
    if (piv < 0) return false;
    if (piv != c) {
      for (int j = 0; j < m; ++j) {
        std::swap(work[size_t(piv) * m + j], work[size_t(c) * m + j]);
        std::swap(inv[size_t(piv) * m + j], inv[size_t(c) * m + j]);
      }
    }
    double d = work[size_t(c) * m + c];
    for (int j = 0; j < m; ++j) {
      work[size_t(c) * m + j] /= d;
      inv[size_t(c) * m + j] /= d;
    }
    for (int r = 0; r < m; ++r) {
      if (r == c) continue;
      double f = work[size_t(r) * m + c];
      if (f == 0.0) continue;
      for (int j = 0; j < m; ++j) {
        work[size_t(r) * m + j] -= f * work[size_t(c) * m + j];
        inv[size_t(r) * m + j] -= f * inv[size_t(c) * m + j];
      }
    }
  }
  t.binv.swap(inv);
  for (int i = 0; i < m; ++i) {
    double s = 0;
    for (int j = 0; j < m; ++j) s += t.Binv(i, j) * t.b[j];
    t.xb[i] = s;
  }
  return true;
}

enum class StepOutcome { moved, optimal, unbounded, singular };

// One simplex iteration under the given per-column costs.
StepOutcome step(Tableau& t, const std::vector<double>& cost,
                 const std::vector<char>& may_enter, bool bland,
                 const SimplexOptions& opts, long long* degenerate) {
  const int m = t.m;
  // y = c_B Binv
  std::vector<double> y(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double cb = cost[t.basis[i]];
    if (cb == 0.0) continue;
    for (int j = 0; j < m; ++j) y[j] += cb * t.Binv(i, j);
  }
  int enter = -1;
  double best = -opts.pivot_tol;
  for (int j = 0; j < t.total; ++j) {
    if (t.in_basis[j] || !may_enter[j]) continue;
    double d = cost[j];
    for (auto [r, v] : t.cols[j]) d -= y[r] * v;
    if (d < best) {
      if (bland) { enter = j; break; }
      best = d;
      enter = j;
    }
  }
  if (enter < 0) return StepOutcome::optimal;

  std::vector<double> w(m);
  ftran(t, t.cols[enter], w);

  // Basic artificials pinned at zero leave first (keeps them at zero for
  // good); then the usual ratio test.
  int leave = -1;
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] >= t.first_artificial && std::fabs(t.xb[i]) <= opts.feas_tol &&
        std::fabs(w[i]) > opts.pivot_tol) {
      leave = i;
      break;
    }
  }
  double step_len = 0;
  if (leave < 0) {
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (w[i] > opts.pivot_tol) {
        double ratio = t.xb[i] / w[i];
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             ((t.basis[i] >= t.first_artificial) >
                  (t.basis[leave] >= t.first_artificial) ||
              (bland && t.basis[i] < t.basis[leave])))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return StepOutcome::unbounded;
    step_len = std::max(0.0, best_ratio);
  }

  if (std::fabs(w[leave]) <= opts.pivot_tol) return StepOutcome::singular;
  if (step_len <= 1e-12) ++*degenerate;

  // pivot: basis row `leave` now hosts `enter`
  double piv = w[leave];
  for (int i = 0; i < m; ++i) {
    if (i == leave) continue;
    t.xb[i] -= step_len * w[i];
    if (t.xb[i] < 0 && t.xb[i] > -1e-11) t.xb[i] = 0;
  }
  t.xb[leave] = step_len;
  // Binv <- E * Binv
  for (int j = 0; j < m; ++j) t.Binv(leave, j) /= piv;
  for (int i = 0; i < m; ++i) {
    if (i == leave) continue;
    double f = w[i];
    if (f == 0.0) continue;
    for (int j = 0; j < m; ++j) t.Binv(i, j) -= f * t.Binv(leave, j);
  }
  t.in_basis[t.basis[leave]] = 0;
  t.in_basis[enter] = 1;
  t.basis[leave] = enter;
  return StepOutcome::moved;
}

std::string basis_note(const Tableau& t, const char* phase) {
  int artificials_basic = 0;
  for (int i = 0; i < t.m; ++i)
    if (t.basis[i] >= t.first_artificial) ++artificials_basic;
  return std::string(phase) + "; m=" + std::to_string(t.m) +
         "; basic artificials=" + std::to_string(artificials_basic);
}

}  // namespace

SimplexResult solve_simplex(const LpProblem& lp, const SimplexOptions& opts) {
  SimplexResult res;
  const int m = (int)lp.rows.size();
  const int ns = lp.num_vars;
  Tableau t;
  t.m = m;
  t.structural = ns;

  // Normalize rows to rhs >= 0 and build sparse columns.
  std::vector<double> sign(m, 1.0);
  std::vector<char> needs_artificial(m, 0);
  t.b.resize(m);
  t.cols.assign(ns, {});
  for (int r = 0; r < m; ++r) {
    const LpRow& row = lp.rows[r];
    double s = row.rhs < 0 ? -1.0 : 1.0;
    sign[r] = s;
    t.b[r] = row.rhs * s;
    if (row.relation == '=') {
      needs_artificial[r] = 1;
    } else if (s < 0) {
      needs_artificial[r] = 1;  // flipped <= becomes >=: surplus + artificial
    }
  }
  for (int r = 0; r < m; ++r)
    for (auto [j, v] : lp.rows[r].coeffs) {
      if (j < 0 || j >= ns) {
        res.status = LpStatus::infeasible;
        res.note = "malformed row: variable index out of range";
        return res;
      }
      t.cols[j].push_back({r, v * sign[r]});
    }

  // slack (+1) for kept <=, surplus (-1) for flipped ones
  std::vector<int> slack_col(m, -1);
  for (int r = 0; r < m; ++r) {
    if (lp.rows[r].relation == '=') continue;
    slack_col[r] = (int)t.cols.size();
    t.cols.push_back({{r, sign[r] < 0 ? -1.0 : 1.0}});
  }
  t.first_artificial = (int)t.cols.size();
  std::vector<int> art_col(m, -1);
  for (int r = 0; r < m; ++r) {
    if (!needs_artificial[r]) continue;
    art_col[r] = (int)t.cols.size();
    t.cols.push_back({{r, 1.0}});
  }
  t.total = (int)t.cols.size();

  t.cost.assign(t.total, 0.0);
  for (int j = 0; j < ns; ++j) t.cost[j] = lp.objective[j];

  t.basis.resize(m);
  t.in_basis.assign(t.total, 0);
  for (int r = 0; r < m; ++r) {
    int c = needs_artificial[r] ? art_col[r] : slack_col[r];
    t.basis[r] = c;
    t.in_basis[c] = 1;
  }
  t.binv.assign(size_t(m) * m, 0.0);
  for (int i = 0; i < m; ++i) t.Binv(i, i) = 1.0;
  t.xb = t.b;

  long long max_iter = opts.max_iterations > 0
                           ? opts.max_iterations
                           : 200LL * (m + t.total) + 1000;
  long long bland_after = opts.degenerate_switch > 0
                              ? opts.degenerate_switch
                              : 10LL * (m + t.total);
  long long degenerate = 0;

  std::vector<char> enter_any(t.total, 1);
  std::vector<char> enter_no_art(t.total, 1);
  for (int j = t.first_artificial; j < t.total; ++j) enter_no_art[j] = 0;

  auto run_phase = [&](const std::vector<double>& cost,
                       const std::vector<char>& may_enter,
                       const char* tag) -> LpStatus {
    int since_refactor = 0;
    while (true) {
      if (res.iterations >= max_iter) {
        res.note = "iteration limit; " + basis_note(t, tag);
        return LpStatus::iteration_limit;
      }
      bool bland = degenerate >= bland_after;
      StepOutcome out = step(t, cost, may_enter, bland, opts, &degenerate);
      if (out == StepOutcome::optimal) return LpStatus::optimal;
      if (out == StepOutcome::unbounded) return LpStatus::unbounded;
      if (out == StepOutcome::singular) {
        if (!refactorize(t)) {
          res.note = "singular basis; " + basis_note(t, tag);
          return LpStatus::iteration_limit;
        }
        continue;
      }
      ++res.iterations;
      if (++since_refactor >= opts.refactor_every) {
        since_refactor = 0;
        if (!refactorize(t)) {
          res.note = "singular basis; " + basis_note(t, tag);
          return LpStatus::iteration_limit;
        }
      }
    }
  };

  // Phase 1: minimize the artificial sum.
  bool any_artificial = t.total > t.first_artificial;
  if (any_artificial) {
    std::vector<double> phase1(t.total, 0.0);
    for (int j = t.first_artificial; j < t.total; ++j) phase1[j] = 1.0;
    LpStatus st = run_phase(phase1, enter_any, "phase 1");
    if (st != LpStatus::optimal) {
      res.status = st == LpStatus::unbounded ? LpStatus::infeasible : st;
      return res;
    }
    double infeas = 0;
    for (int i = 0; i < m; ++i)
      if (t.basis[i] >= t.first_artificial) infeas += t.xb[i];
    if (infeas > opts.feas_tol) {
      res.status = LpStatus::infeasible;
      res.note = basis_note(t, "phase 1");
      return res;
    }
    // Drive remaining zero-valued artificials out where a pivot exists.
    std::vector<double> w(m);
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < t.first_artificial) continue;
      for (int j = 0; j < t.first_artificial; ++j) {
        if (t.in_basis[j]) continue;
        ftran(t, t.cols[j], w);
        if (std::fabs(w[i]) > opts.pivot_tol) {
          double piv = w[i];
          for (int jj = 0; jj < m; ++jj) t.Binv(i, jj) /= piv;
          for (int ii = 0; ii < m; ++ii) {
            if (ii == i) continue;
            double f = w[ii];
            if (f == 0.0) continue;
            for (int jj = 0; jj < m; ++jj) t.Binv(ii, jj) -= f * t.Binv(i, jj);
          }
          t.in_basis[t.basis[i]] = 0;
          t.in_basis[j] = 1;
          t.basis[i] = j;
          t.xb[i] = 0;
          break;
        }
      }
      // No pivot found: the row is redundant and the artificial stays
      // pinned at zero (no column can ever move it).
    }
  }

  // Phase 2.
  LpStatus st = run_phase(t.cost, enter_no_art, "phase 2");
  if (st != LpStatus::optimal) {
    res.status = st;
    return res;
  }

  res.values.assign(ns, 0.0);
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < ns) {
      double v = t.xb[i];
      if (v < 0 && v > -opts.feas_tol) v = 0;
      res.values[t.basis[i]] = v;
    }
  }
  res.objective = 0;
  for (int j = 0; j < ns; ++j) res.objective += lp.objective[j] * res.values[j];
  double resid = 0;
  for (const LpRow& row : lp.rows) {
    double lhs = 0;
    for (auto [j, v] : row.coeffs) lhs += v * res.values[j];
    double viol = row.relation == '=' ? std::fabs(lhs - row.rhs)
                                      : std::max(0.0, lhs - row.rhs);
    resid = std::max(resid, viol);
  }
  res.max_residual = resid;
  res.status = LpStatus::optimal;
  return res;
}

}  // namespace fulfill
