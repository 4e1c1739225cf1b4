#pragma once
// Domain types and the online simulation loop.
//
// Network: one unlimited regional DC (index 0, "RDC") plus K finite front DCs
// ("FDC" 1..K).  Shipping anything from DC k in a period incurs the fixed
// charge f_k once, plus c[t][k][i] per unit of item i.  FDC stock is never
// replenished; the RDC backstops every order.  A policy sees, at period t,
// only the current order, the period-t cost column, the live inventory, and
// its own state.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fulfill {

using i64 = long long;

enum class CostRegime { varying, invariant };

inline const char* to_string(CostRegime r) {
  return r == CostRegime::varying ? "time-varying" : "time-invariant";
}

// Binary-demand order types with arrival probabilities; the stochastic
// generator embeds this so forecast-based policies can see the true mixture.
struct OrderTypeDistribution {
  std::vector<std::vector<int>> types;  // each: sorted item indices
  std::vector<double> probs;            // same length, sums to 1
};

struct InstanceMeta {
  std::string family;   // generator family id ("" for ad-hoc instances)
  std::string variant;  // "I1"/"I2" for paired families, else ""
  std::optional<double> opt_exact;        // analytic clairvoyant optimum
  std::optional<double> opt_upper_bound;  // analytic upper bound on it
  std::optional<OrderTypeDistribution> distribution;
  std::string params_json;  // family parameters as serialized JSON ("" if n/a)
};

struct Instance {
  int n = 0;  // items
  int K = 0;  // front DCs
  int T = 0;  // periods
  std::vector<double> fixed_costs;                 // size K+1, [0] is the RDC
  CostRegime regime = CostRegime::varying;
  std::vector<std::vector<std::vector<double>>> costs;  // [T][K+1][n]
  std::vector<std::vector<i64>> inventory;              // [K][n], FDC k-1 row
  std::vector<std::vector<i64>> orders;                 // [T][n]
  std::optional<std::pair<double, double>> cost_bounds;  // (a,b), 0<a<=b
  InstanceMeta meta;

  double cost_at(int t, int k, int i) const { return costs[t][k][i]; }
};

// One period's shipment matrix, m[k][i] over k in 0..K.
struct Plan {
  int K = 0, n = 0;
  std::vector<i64> q;  // (K+1) x n, row-major by DC
  Plan() = default;
  Plan(int K_, int n_) : K(K_), n(n_), q(size_t(K_ + 1) * size_t(n_), 0) {}
  i64& at(int k, int i) { return q[size_t(k) * n + i]; }
  i64 at(int k, int i) const { return q[size_t(k) * n + i]; }
  void clear() { std::fill(q.begin(), q.end(), 0); }
  bool operator==(const Plan& o) const { return K == o.K && n == o.n && q == o.q; }
};

struct InventoryState {
  std::vector<std::vector<i64>> levels;  // [K][n]
  int period = 0;                        // completed periods
};

inline InventoryState initial_state(const Instance& inst) {
  return InventoryState{inst.inventory, 0};
}

// Σ_k [ f_k·1(DC k ships) + Σ_i c_k^i·m_k^i ] for one period.
double period_cost(const Plan& plan, const std::vector<double>& fixed_costs,
                   const std::vector<std::vector<double>>& cost_col);

struct InfeasiblePlan : std::runtime_error {
  std::string constraint;  // "demand" | "inventory" | "negativity" | "shape"
  int k = -1, i = -1;
  InfeasiblePlan(std::string c, int k_, int i_, const std::string& msg)
      : std::runtime_error(msg), constraint(std::move(c)), k(k_), i(i_) {}
};

// Decrements FDC levels by the plan after checking all three feasibility
// constraints (demand match, inventory caps, non-negativity).  Throws
// InfeasiblePlan naming the violated constraint and index.
void apply_plan(InventoryState& state, const Plan& plan,
                const std::vector<i64>& order);

struct ValidationIssue {
  std::string pointer;  // JSON-pointer-ish index path
  std::string message;
};
std::vector<ValidationIssue> validate_instance(const Instance& inst);

// ---- policies ----------------------------------------------------------

// Everything a policy may know before the first order.  Costs appear here
// only under the time-invariant regime (they are announced up front there);
// under time-varying costs policies learn each column on arrival.
struct InstanceHeader {
  int n = 0, K = 0;
  int T = 0;  // 0 when unknown (open-ended service sessions)
  std::vector<double> fixed_costs;
  CostRegime regime = CostRegime::varying;
  std::optional<std::pair<double, double>> cost_bounds;
  std::vector<std::vector<i64>> inventory0;
  std::vector<std::vector<double>> invariant_costs;  // [K+1][n]; empty if varying
  std::optional<OrderTypeDistribution> distribution;
};

InstanceHeader header_of(const Instance& inst);

struct StepInfo {
  bool gated = false;          // the gating branch fired this period
  const Plan* proposal = nullptr;  // greedy quantities before gating, if any
  bool fallback = false;       // rounding policy had to repair via the RDC
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual const char* id() const = 0;
  // Throws ConfigError when the header violates the policy's regime.
  virtual void begin(const InstanceHeader& h, std::uint64_t seed) = 0;
  virtual void decide(int t, const std::vector<i64>& order,
                      const std::vector<std::vector<double>>& cost_col,
                      const InventoryState& inv, Plan& out, StepInfo& info) = 0;
  // Per item, the FDCs preceding the RDC in this policy's ranking, best
  // first.  Empty for policies without a time-independent ranking.
  virtual std::vector<std::vector<int>> fdc_preference() const { return {}; }
};

enum class TraceMode { none, costs, full };

struct PeriodRecord {
  int period = 0;  // 1-based
  bool gated = false;
  double period_cost = 0;
  Plan plan;
  Plan proposal;  // greedy quantities m̂ (zero plan when the policy has none)
  std::vector<std::vector<i64>> inventory_after;
};

struct RunResult {
  std::string policy_id;
  std::uint64_t seed = 0;
  double total_cost = 0;
  i64 gated_periods = 0;
  double wall_time = 0;    // whole run, seconds
  double decide_time = 0;  // summed time inside Policy::decide
  i64 decisions = 0;       // periods fed to decide()
  i64 rounding_fallbacks = 0;
  std::vector<double> period_costs;          // costs/full modes
  std::vector<PeriodRecord> trace;           // full mode
  // Per item: the FDCs that precede the RDC in the policy's ranking, best
  // first.  Filled only by policies with time-independent rankings.
  std::vector<std::vector<int>> fdc_pref;
};

struct PolicySpec;  // policies.hpp
RunResult run_policy(const Instance& inst, const PolicySpec& spec,
                     std::uint64_t seed, TraceMode mode = TraceMode::costs);
RunResult run_policy(const Instance& inst, Policy& policy, std::uint64_t seed,
                     TraceMode mode = TraceMode::costs);

}  // namespace fulfill
