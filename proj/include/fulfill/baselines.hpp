#pragma once
// Benchmark baselines: the exact per-order myopic optimizer, the
// time-aggregate LP relaxation over order types, and the IPFC policy that
// rounds the LP fractions into per-item DC choices.

#include <memory>
#include <string>
#include <vector>

#include "fulfill/model.hpp"
#include "fulfill/rng.hpp"
#include "fulfill/simplex.hpp"

namespace fulfill {

struct MyopicLimits {
  int max_K = 20;  // activation subsets are enumerated, 2^(K+1) of them
};

// Exact single-period cost minimizer.  Enumerates DC activation subsets
// (branch-and-bound on fixed cost), fills units greedily within a subset,
// and breaks cost ties by fewer activated DCs, then lexicographically
// smaller subset, then lexicographically smaller plan.
Plan myopic_decide(const std::vector<i64>& order,
                   const std::vector<std::vector<i64>>& inventory,   // [K][n]
                   const std::vector<std::vector<double>>& cost_col,  // [K+1][n]
                   const std::vector<double>& fixed_costs,
                   const MyopicLimits& limits = {});

std::unique_ptr<Policy> make_myopic_policy();

// ---- time-aggregate LP ---------------------------------------------------

// One block per order type (the per-type inventory caps make types
// independent, so the LP decomposes).  Block variable layout: for the type's
// p-th item, x-variables occupy p*(K+1)+k for k = 0..K; the y-variables
// follow at |q|*(K+1)+k.
struct AggregateLp {
  int n = 0, K = 0;
  double T = 0;
  std::vector<std::vector<int>> types;  // sorted item ids per type
  std::vector<double> lambda;
  std::vector<LpProblem> blocks;
};

// costs must be the invariant [K+1][n] matrix; order types must be binary.
// Throws ConfigError on non-binary types or malformed probabilities.
AggregateLp build_aggregate_lp(const OrderTypeDistribution& dist,
                               const std::vector<double>& fixed_costs,
                               const std::vector<std::vector<double>>& costs,
                               const std::vector<std::vector<i64>>& inventory,
                               double T);

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  double objective = 0;
  std::vector<std::vector<std::vector<double>>> x;  // [type][pos in type][k]
  std::vector<std::vector<double>> y;               // [type][k]
  double max_residual = 0;
  long long iterations = 0;
  std::string note;
};

LpSolution solve_lp(const AggregateLp& lp);

// Serialization for caching solves across processes.
std::string lp_solution_to_json(const LpSolution& sol);
LpSolution lp_solution_from_json(const std::string& text);

// One IPFC period: for each ordered item, sample its DC from the type's LP
// fractions; a sampled FDC without stock falls back to the RDC.  q_index < 0
// means the order's item set is not an LP type: the whole order goes to the
// RDC.  Sets *fallback when any repair or unknown-type routing happened.
Plan ipfc_decide(const std::vector<i64>& order, int q_index,
                 const AggregateLp& lp, const LpSolution& sol,
                 const std::vector<std::vector<i64>>& inventory, Rng& rng,
                 bool* fallback = nullptr);

std::unique_ptr<Policy> make_ipfc_policy();

}  // namespace fulfill
