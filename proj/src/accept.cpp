#include "fulfill/accept.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fulfill/baselines.hpp"
#include "fulfill/instances.hpp"
#include "fulfill/model.hpp"
#include "fulfill/oracles.hpp"
#include "fulfill/policies.hpp"
#include "fulfill/rng.hpp"
#include "fulfill/service.hpp"
#include "fulfill/simplex.hpp"
#include "json.hpp"

namespace fulfill {
namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// ---- tiny random instances ----------------------------------------------
// Small enough that the memoized brute force answers in milliseconds, rich
// enough to exercise every ranking/gating branch: n <= 3, K <= 3 (K*n <= 6
// keeps the search bounded), T <= max_T, order quantities and inventories in
// 0..3, variable costs uniform in a declared [a, b] with a > 0, all fixed
// costs strictly positive.

struct TinyOpts {
  bool invariant = false;
  bool single_fdc = false;
  int max_T = 5;
};

Instance make_tiny(Rng& rng, const TinyOpts& o) {
  Instance inst;
  inst.n = 1 + int(rng.below(3));
  if (o.single_fdc) {
    inst.K = 1;
  } else {
    do {
      inst.K = 1 + int(rng.below(3));
    } while (inst.K * inst.n > 6);
  }
  inst.T = 1 + int(rng.below(std::uint64_t(o.max_T)));
  inst.regime = o.invariant ? CostRegime::invariant : CostRegime::varying;
  double a = 0.5 + rng.u01() * 2.5;
  double b = a * (1.0 + rng.u01() * 4.0);
  inst.cost_bounds = {a, b};
  inst.fixed_costs.push_back(0.5 + rng.u01() * 59.5);
  for (int k = 1; k <= inst.K; ++k) inst.fixed_costs.push_back(0.5 + rng.u01() * 9.5);

  std::vector<std::vector<double>> col(size_t(inst.K) + 1,
                                       std::vector<double>(size_t(inst.n)));
  auto draw_col = [&] {
    for (auto& row : col)
      for (auto& c : row) c = a + rng.u01() * (b - a);
  };
  inst.costs.resize(size_t(inst.T));
  if (inst.regime == CostRegime::invariant) draw_col();
  for (int t = 0; t < inst.T; ++t) {
    if (inst.regime == CostRegime::varying) draw_col();
    inst.costs[t] = col;
  }

  inst.inventory.assign(size_t(inst.K), std::vector<i64>(size_t(inst.n)));
  for (auto& row : inst.inventory)
    for (auto& v : row) v = i64(rng.below(4));
  inst.orders.assign(size_t(inst.T), std::vector<i64>(size_t(inst.n)));
  i64 total = 0;
  for (auto& row : inst.orders)
    for (auto& v : row) total += (v = i64(rng.below(4)));
  if (total == 0) inst.orders[0][rng.below(std::uint64_t(inst.n))] = 1 + i64(rng.below(3));
  return inst;
}

// One feasible plan sequence drawn uniformly-ish: per item, visit the FDCs in
// a shuffled order taking a random amount within stock, remainder to the RDC.
std::vector<Plan> random_plans(const Instance& inst, Rng& rng) {
  std::vector<Plan> seq;
  auto inv = inst.inventory;
  std::vector<int> ks(size_t(inst.K));
  for (int k = 0; k < inst.K; ++k) ks[size_t(k)] = k + 1;
  for (int t = 0; t < inst.T; ++t) {
    Plan p(inst.K, inst.n);
    for (int i = 0; i < inst.n; ++i) {
      for (size_t j = ks.size(); j > 1; --j)
        std::swap(ks[j - 1], ks[rng.below(j)]);
      i64 rem = inst.orders[size_t(t)][size_t(i)];
      for (int k : ks) {
        i64 cap = std::min(rem, inv[size_t(k - 1)][size_t(i)]);
        i64 x = i64(rng.below(std::uint64_t(cap) + 1));
        p.at(k, i) = x;
        inv[size_t(k - 1)][size_t(i)] -= x;
        rem -= x;
      }
      p.at(0, i) = rem;
    }
    seq.push_back(std::move(p));
  }
  return seq;
}

// Gated-greedy instantiations whose greedy proposals obey the prefix
// dominance property on this instance.  order-size-adjv-priority is excluded
// by design: its FDC-side gate ships the whole order from the FDC even where
// the greedy proposal is zero, so its shipped plan is not a gated restriction
// of the proposal and the property does not apply to it.
std::vector<PolicySpec> dominance_specs(const Instance& inst) {
  std::vector<PolicySpec> specs;
  auto add = [&](const char* name, const char* rule = nullptr) {
    PolicySpec s;
    s.name = name;
    if (rule) s.greedy_rule = rule;
    specs.push_back(std::move(s));
  };
  add("order-size-f-priority");
  add("pure-greedy", "f-priority");
  add("all-rdc");
  if (inst.regime == CostRegime::invariant) {
    add("cost-comparison-v-priority");
    add("pure-greedy", "v-priority");
    if (inst.K == 1) add("randomized-cc-v-priority");
  }
  if (inst.K == 1) add("cost-comparison-adjv-priority");
  return specs;
}

// Checks the prefix dominance property of the greedy quantities against one
// alternative feasible plan sequence.  For policies with a per-item static
// ranking: for every item, every ranking prefix, and every period set B that
// contains all periods where the shipped plan used an FDC for that item,
// the proposal's prefix total must weakly dominate the alternative's.  For
// the single-FDC time-dependent ranking the dominated quantity is instead
// the stock-greedy amount min(order, remaining stock) along the policy's
// own trajectory (the ranking may legitimately route an item to the RDC in
// some periods, so the ranking-aware proposal can undershoot), under the
// hypothesis that each shipped quantity is that amount or zero.  Returns ""
// or a violation description.
std::string dominance_violation(const Instance& inst, const RunResult& rr,
                                const std::vector<std::vector<Plan>>& alts) {
  const int T = inst.T, K = inst.K, n = inst.n;
  const bool static_rank = !rr.fdc_pref.empty();
  for (int i = 0; i < n; ++i) {
    std::vector<int> pref;
    std::vector<i64> stock_greedy;
    if (static_rank) {
      pref = rr.fdc_pref[size_t(i)];
    } else {
      if (K != 1) return "no ranking for a multi-FDC policy";
      stock_greedy.resize(size_t(T));
      for (int t = 0; t < T; ++t) {
        i64 stock = t == 0 ? inst.inventory[0][size_t(i)]
                           : rr.trace[size_t(t) - 1].inventory_after[0][size_t(i)];
        stock_greedy[size_t(t)] = std::min(inst.orders[size_t(t)][size_t(i)], stock);
        i64 m = rr.trace[size_t(t)].plan.at(1, i);
        if (m != stock_greedy[size_t(t)] && m != 0)
          return "shipped quantity is neither the stock-greedy amount nor zero "
                 "(t=" + std::to_string(t + 1) + ", i=" + std::to_string(i) + ")";
      }
      pref = {1};
    }
    std::vector<char> active(size_t(T), 0);
    for (int t = 0; t < T; ++t) {
      i64 s = 0;
      for (int k = 1; k <= K; ++k) s += rr.trace[size_t(t)].plan.at(k, i);
      active[size_t(t)] = s > 0;
    }
    for (size_t ai = 0; ai < alts.size(); ++ai) {
      for (int all_periods = 0; all_periods < 2; ++all_periods) {
        for (size_t j = 1; j <= pref.size(); ++j) {
          i64 lhs = 0, rhs = 0;
          for (int t = 0; t < T; ++t) {
            if (!all_periods && !active[size_t(t)]) continue;
            for (size_t l = 0; l < j; ++l) {
              lhs += static_rank ? rr.trace[size_t(t)].proposal.at(pref[l], i)
                                 : stock_greedy[size_t(t)];
              rhs += alts[ai][size_t(t)].at(pref[l], i);
            }
          }
          if (lhs < rhs)
            return "prefix total " + std::to_string(lhs) + " < " +
                   std::to_string(rhs) + " (item " + std::to_string(i) +
                   ", prefix " + std::to_string(j) + ", policy " +
                   rr.policy_id + ")";
        }
      }
    }
  }
  return "";
}

// Shared loop for the per-instance ratio-compliance criteria: run `spec` on
// `count` tiny instances, compare cost/OPT against bound(inst) + 1e-9.
void ratio_compliance(CriterionResult& r, int count, const TinyOpts& opts,
                      std::uint64_t seed, const PolicySpec& spec,
                      const std::function<double(const Instance&)>& bound_of) {
  Rng rng(seed);
  int violations = 0;
  double worst_margin = -1e300, worst_ratio = 0, worst_bound = 0;
  for (int s = 0; s < count; ++s) {
    Instance inst = make_tiny(rng, opts);
    OptResult opt = bruteforce_opt(inst);
    RunResult rr = run_policy(inst, spec, std::uint64_t(s));
    double bound = bound_of(inst);
    double ratio = competitive_ratio(rr.total_cost, opt).value;
    double margin = ratio - bound;
    if (margin > worst_margin) {
      worst_margin = margin;
      worst_ratio = ratio;
      worst_bound = bound;
    }
    if (ratio > bound + 1e-9) ++violations;
  }
  r.pass = violations == 0;
  r.detail = std::to_string(count) + " instances, " + std::to_string(violations) +
             " violations; tightest case ratio " + num(worst_ratio) +
             " vs bound " + num(worst_bound);
}

// ---- criterion bodies ----------------------------------------------------

void c1_example1(CriterionResult& r) {
  // Single item, single FDC stocked with M units, fixed costs (1, 0), unit
  // cost 1/M: FDC-first greedy burns the stock in period 1 and pays the RDC
  // charge M times after; all-RDC pays it M+1 times; clairvoyantly rationing
  // one unit per period costs 3.  The greedy/all-RDC targets are exact in
  // real arithmetic; the simulator accumulates per period, so they are
  // checked to 1e-9 while the brute-force optimum must hit 3.0 bitwise.
  std::ostringstream d;
  r.pass = true;
  for (i64 M : {2, 5, 10}) {
    Instance inst = gen_adversarial("example-1", "{\"M\":" + std::to_string(M) + "}");
    PolicySpec greedy;
    greedy.name = "pure-greedy";
    PolicySpec rdc;
    rdc.name = "all-rdc";
    double g = run_policy(inst, greedy, 1).total_cost;
    double a = run_policy(inst, rdc, 1).total_cost;
    OptResult opt = bruteforce_opt(inst);
    bool ok = std::abs(g - double(M + 2)) <= 1e-9 &&
              std::abs(a - double(M + 3)) <= 1e-9 && opt.opt_cost == 3.0;
    if (!ok) r.pass = false;
    d << "M=" << M << ": greedy " << num(g) << ", all-RDC " << num(a)
      << ", OPT " << num(opt.opt_cost) << (ok ? "; " : " MISMATCH; ");
  }
  r.detail = d.str();
}

void c2_dominance(CriterionResult& r) {
  Rng rng(0xACC2);
  const int kInstances = 1000, kRandomPlans = 100;
  int checked_runs = 0;
  for (int s = 0; s < kInstances; ++s) {
    TinyOpts o;
    o.invariant = rng.below(2) == 1;
    Instance inst = make_tiny(rng, o);

    BruteForceLimits lim;
    lim.want_plan = true;
    OptResult opt = bruteforce_opt(inst, lim);

    std::vector<std::vector<Plan>> alts;
    for (int p = 0; p < kRandomPlans; ++p) alts.push_back(random_plans(inst, rng));
    alts.push_back(*opt.plan);

    for (const PolicySpec& spec : dominance_specs(inst)) {
      RunResult rr = run_policy(inst, spec, std::uint64_t(s), TraceMode::full);
      ++checked_runs;
      std::string v = dominance_violation(inst, rr, alts);
      if (!v.empty()) {
        r.pass = false;
        r.detail = "violation on instance " + std::to_string(s) + ": " + v;
        return;
      }
    }
  }
  r.pass = true;
  r.detail = std::to_string(kInstances) + " instances x " +
             std::to_string(kRandomPlans + 1) + " plans, " +
             std::to_string(checked_runs) +
             " policy runs, zero violations (order-size-adjv-priority "
             "excluded: its FDC-side gate ships beyond the proposal)";
}

void c3_thm1(CriterionResult& r) {
  PolicySpec spec;
  spec.name = "order-size-f-priority";
  ratio_compliance(r, 500, TinyOpts{}, 0xACC3, spec, [](const Instance& inst) {
    auto [a, b] = *inst.cost_bounds;
    double fmin = *std::min_element(inst.fixed_costs.begin() + 1, inst.fixed_costs.end());
    BoundInputs in;
    in.f0 = inst.fixed_costs[0];
    in.fmin = fmin;
    in.a = a;
    in.b = b;
    in.theta = theta_default(inst.fixed_costs[0], fmin, a, b);
    return bound_value("theorem-1", in);
  });
}

void c4_thm4(CriterionResult& r) {
  PolicySpec spec;
  spec.name = "cost-comparison-v-priority";
  TinyOpts o;
  o.invariant = true;
  ratio_compliance(r, 500, o, 0xACC4, spec, [](const Instance& inst) {
    BoundInputs in;
    in.f0 = inst.fixed_costs[0];
    in.fdc_fixed_costs.assign(inst.fixed_costs.begin() + 1, inst.fixed_costs.end());
    return bound_value("theorem-4", in);
  });
}

void c5_alg4(CriterionResult& r) {
  PolicySpec spec;
  spec.name = "cost-comparison-adjv-priority";
  TinyOpts o;
  o.single_fdc = true;
  ratio_compliance(r, 500, o, 0xACC5, spec, [](const Instance& inst) {
    auto [a, b] = *inst.cost_bounds;
    BoundInputs in;
    in.f0 = inst.fixed_costs[0];
    in.f1 = inst.fixed_costs[1];
    in.a = a;
    in.b = b;
    return bound_value("theorem-3", in);
  });
}

void c6_thm9(CriterionResult& r) {
  Rng rng(0xACC6);
  const int kInstances = 50, kReps = 10000;
  PolicySpec spec;
  spec.name = "randomized-cc-v-priority";
  double worst_margin = -1e300;
  r.pass = true;
  for (int s = 0; s < kInstances; ++s) {
    TinyOpts o;
    o.invariant = true;
    o.single_fdc = true;
    Instance inst = make_tiny(rng, o);
    OptResult opt = bruteforce_opt(inst);
    BoundInputs in;
    in.f0 = inst.fixed_costs[0];
    in.f1 = inst.fixed_costs[1];
    double bound = bound_value("theorem-9", in);

    double sum = 0, sumsq = 0;
    for (int rep = 0; rep < kReps; ++rep) {
      double ratio =
          competitive_ratio(run_policy(inst, spec, std::uint64_t(rep)).total_cost, opt)
              .value;
      sum += ratio;
      sumsq += ratio * ratio;
    }
    double mean = sum / kReps;
    double var = std::max(0.0, sumsq / kReps - mean * mean);
    double se = std::sqrt(var / kReps);
    worst_margin = std::max(worst_margin, mean - (bound + 3 * se));
    if (mean > bound + 3 * se + 1e-12) {
      r.pass = false;
      r.detail = "instance " + std::to_string(s) + ": mean ratio " + num(mean) +
                 " exceeds bound " + num(bound) + " + 3se (se=" + num(se) + ")";
      return;
    }
  }
  r.detail = std::to_string(kInstances) + " instances x " + std::to_string(kReps) +
             " draws; worst mean-over-(bound+3se) margin = " + num(worst_margin);
}

void c7_oracles(CriterionResult& r) {
  std::vector<std::pair<std::string, std::string>> cases;
  for (int M : {2, 3, 4})
    cases.push_back({"example-1", "{\"M\":" + std::to_string(M) + "}"});
  for (int n : {1, 2, 3, 4})
    for (int K : {1, 2})
      for (const char* f0 : {"50", "3"})
        cases.push_back({"thm2-pair", "{\"n\":" + std::to_string(n) +
                                          ",\"K\":" + std::to_string(K) +
                                          ",\"f0\":" + f0 + ",\"f\":5,\"a\":8}"});
  for (int N : {1, 2, 3})
    for (const char* f0 : {"50", "2"})
      cases.push_back({"thm2-varying-pair",
                       "{\"N\":" + std::to_string(N) + ",\"K\":2,\"f0\":" + f0 +
                           ",\"f\":5,\"a\":8,\"b\":30}"});
  for (auto [s, d, n, K] : std::vector<std::array<int, 4>>{
           {1, 1, 1, 2}, {1, 1, 2, 1}, {2, 1, 1, 1}, {1, 1, 1, 3}})
    for (const char* c1 : {"0.25", "2.0"})
      cases.push_back({"thm5-table", "{\"s\":" + std::to_string(s) +
                                         ",\"d\":" + std::to_string(d) +
                                         ",\"n\":" + std::to_string(n) +
                                         ",\"K\":" + std::to_string(K) +
                                         ",\"c1\":" + c1 + "}"});
  for (int N : {1, 2, 3})
    for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 4}, {2, 2}})
      for (auto [f0, f1] : std::vector<std::pair<int, int>>{{50, 5}, {1, 5}})
        cases.push_back({"thm7-pair",
                         "{\"N\":" + std::to_string(N) + ",\"a\":" + std::to_string(a) +
                             ",\"b\":" + std::to_string(b) +
                             ",\"f0\":" + std::to_string(f0) +
                             ",\"f1\":" + std::to_string(f1) + "}"});
  for (auto [M, N] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {2, 1}})
    for (const char* eps : {"0.25", "2.0"})
      for (auto [f0, f1] : std::vector<std::pair<int, int>>{{1, 4}, {4, 1}})
        cases.push_back({"thm8/10-pair",
                         "{\"M\":" + std::to_string(M) + ",\"N\":" + std::to_string(N) +
                             ",\"eps\":" + std::string(eps) +
                             ",\"f0\":" + std::to_string(f0) +
                             ",\"f1\":" + std::to_string(f1) + "}"});
  for (int f0 : {2, 4, 9, 16})
    cases.push_back({"stress", "{\"f0\":" + std::to_string(f0) + "}"});

  int total = 0, exact_checked = 0, ub_checked = 0;
  for (auto& [family, params] : cases) {
    for (const Instance& inst : gen_adversarial_family(family, params)) {
      ++total;
      if (inst.n > 4 || inst.T > 5) {
        r.pass = false;
        r.detail = "grid bug: " + family + " case exceeds n<=4, T<=5";
        return;
      }
      OptResult opt = bruteforce_opt(inst);
      if (inst.meta.opt_exact) {
        ++exact_checked;
        if (!(opt.opt_cost == *inst.meta.opt_exact)) {
          r.pass = false;
          r.detail = family + " " + inst.meta.variant + " " + params +
                     ": analytic " + num(*inst.meta.opt_exact) + " != brute " +
                     num(opt.opt_cost);
          return;
        }
      } else if (inst.meta.opt_upper_bound) {
        ++ub_checked;
        if (!(opt.opt_cost <= *inst.meta.opt_upper_bound * (1 + 1e-12) + 1e-12)) {
          r.pass = false;
          r.detail = family + " " + inst.meta.variant + " " + params +
                     ": upper bound " + num(*inst.meta.opt_upper_bound) +
                     " < brute " + num(opt.opt_cost);
          return;
        }
      } else {
        r.pass = false;
        r.detail = family + " instance carries no annotation";
        return;
      }
    }
  }
  r.pass = true;
  r.detail = std::to_string(total) + " instances across 7 families: " +
             std::to_string(exact_checked) + " exact optima matched bitwise, " +
             std::to_string(ub_checked) + " upper bounds hold";
}

void c8_stress(CriterionResult& r) {
  // Unit-inventory burn-down: the myopic policy drains the FDC in period 1
  // and pays the RDC charge n times after, n(f0+2) in total.  The order-size
  // gate reroutes period 1 to the RDC whenever the period-1 order size n
  // exceeds the threshold — which needs n(n-1) > f0 — leaving the stock to
  // absorb the n singleton orders: f0+2n.  At f0 where n = ceil(sqrt(f0))
  // fails that inequality the gate stays closed and the gated policy shares
  // the myopic total; the closed forms below follow that case split, and the
  // myopic-minus-gated gap (n-1)f0 must be strictly increasing across the
  // gate-active points.
  std::ostringstream d;
  r.pass = true;
  double prev_gap = -1e300;
  std::vector<int> inactive;
  for (int f0 = 50; f0 <= 500; f0 += 50) {
    Instance inst = gen_adversarial("stress", "{\"f0\":" + std::to_string(f0) + "}");
    i64 n = inst.n;
    PolicySpec myo;
    myo.name = "myopic";
    PolicySpec osfp;
    osfp.name = "order-size-f-priority";
    double m = run_policy(inst, myo, 1).total_cost;
    double g = run_policy(inst, osfp, 1).total_cost;
    bool gate_fires = n * (n - 1) > f0;
    double want_m = double(n) * (f0 + 2);
    double want_g = gate_fires ? double(f0 + 2 * n) : want_m;
    if (m != want_m || g != want_g) {
      r.pass = false;
      d << "f0=" << f0 << ": myopic " << num(m) << " (want " << num(want_m)
        << "), gated " << num(g) << " (want " << num(want_g) << "); ";
      continue;
    }
    if (gate_fires) {
      double gap = m - g;  // = (n-1) * f0
      if (gap != double(n - 1) * f0 || gap <= prev_gap) {
        r.pass = false;
        d << "gap not strictly increasing at f0=" << f0 << "; ";
      }
      prev_gap = gap;
    } else {
      inactive.push_back(f0);
    }
  }
  d << "closed forms match the simulator at all 10 points";
  if (!inactive.empty()) {
    d << "; gate inactive (n(n-1) <= f0, both policies pay n(f0+2)) at f0 = {";
    for (size_t i = 0; i < inactive.size(); ++i)
      d << (i ? "," : "") << inactive[i];
    d << "}";
  }
  r.detail = d.str();
}

void c9_props(CriterionResult& r) {
  Rng rng(0xACC9);
  double max1 = 0, max2 = 0;
  for (int s = 0; s < 10000; ++s) {
    double a = 0.1 + rng.u01() * 9.9;
    double b = a * (1 + rng.u01() * 19.0);
    double fmin = 0.1 + rng.u01() * 19.9;
    double f0 = rng.u01() * 1000.0;
    BoundInputs i1;
    i1.f0 = f0;
    i1.fmin = fmin;
    i1.a = a;
    i1.b = b;
    max1 = std::max(max1, bound_value("theorem-1", i1) / bound_value("theorem-2", i1));
    BoundInputs i2;
    i2.f0 = f0;
    i2.f1 = fmin;
    i2.a = a;
    i2.b = b;
    max2 = std::max(max2, bound_value("corollary-1-closed", i2) /
                              bound_value("theorem-7", i2));
  }
  r.pass = max1 <= 6.473 && max2 <= 19.828;
  r.detail = "10000 samples: multi-FDC UB/LB max " + num(max1) +
             " (cap 6.473), single-FDC UB/LB max " + num(max2) + " (cap 19.828)";
}

void c10_stochastic(CriterionResult& r) {
  const int kReps = 20;
  StochasticConfig base;
  base.T = 500;
  base.K = 5;

  auto mean_cost = [&](const StochasticConfig& cfg, const char* policy,
                       std::uint64_t seed0) {
    PolicySpec spec;
    spec.name = policy;
    double sum = 0;
    for (int rep = 0; rep < kReps; ++rep) {
      Instance inst = gen_stochastic(cfg, seed0 + std::uint64_t(rep));
      sum += run_policy(inst, spec, std::uint64_t(rep)).total_cost;
    }
    return sum / kReps;
  };

  StochasticConfig varying = base;
  varying.regime = CostRegime::varying;
  double my_v = mean_cost(varying, "myopic", 1000);
  double os_v = mean_cost(varying, "order-size-f-priority", 1000);

  StochasticConfig inv = base;
  inv.regime = CostRegime::invariant;
  double my_i = mean_cost(inv, "myopic", 2000);
  double cc_i = mean_cost(inv, "cost-comparison-v-priority", 2000);
  double lp_i = mean_cost(inv, "ipfc", 2000);

  // Per-order decision latency, K=3 vs K=7, same instances for every policy.
  auto mean_decide = [&](const StochasticConfig& cfg, const PolicySpec& spec,
                         std::uint64_t seed0) {
    double sum = 0;
    for (int rep = 0; rep < kReps; ++rep) {
      Instance inst = gen_stochastic(cfg, seed0 + std::uint64_t(rep));
      RunResult rr = run_policy(inst, spec, std::uint64_t(rep));
      sum += rr.decide_time / double(rr.decisions);
    }
    return sum / kReps;
  };
  StochasticConfig k3 = inv, k7 = inv;
  k3.K = 3;
  k7.K = 7;
  std::vector<PolicySpec> gpg;
  for (const char* nm : {"order-size-f-priority", "cost-comparison-v-priority",
                         "all-rdc"}) {
    PolicySpec s;
    s.name = nm;
    gpg.push_back(s);
  }
  {
    PolicySpec s;
    s.name = "pure-greedy";
    s.greedy_rule = "f-priority";
    gpg.push_back(s);
    s.greedy_rule = "v-priority";
    gpg.push_back(s);
  }
  PolicySpec myo;
  myo.name = "myopic";
  double my_ratio = mean_decide(k7, myo, 4000) / mean_decide(k3, myo, 3000);
  double worst_gpg = 0;
  std::string worst_gpg_name;
  for (const PolicySpec& s : gpg) {
    double ratio = mean_decide(k7, s, 4000) / mean_decide(k3, s, 3000);
    if (ratio > worst_gpg) {
      worst_gpg = ratio;
      worst_gpg_name = s.name + (s.name == "pure-greedy" ? "/" + s.greedy_rule : "");
    }
  }

  bool a_ok = os_v <= 1.20 * my_v;
  bool b_ok = cc_i <= 1.20 * my_i && cc_i <= 1.20 * lp_i;
  bool c_ok = my_ratio >= 4.0 && worst_gpg <= 1.5;
  r.pass = a_ok && b_ok && c_ok;
  r.detail = "varying: gated-greedy/myopic " + num(os_v / my_v) +
             " (cap 1.20); invariant: cc/myopic " + num(cc_i / my_i) +
             ", cc/rounded-LP " + num(cc_i / lp_i) +
             " (caps 1.20); decide-time K=3->7: myopic x" + num(my_ratio) +
             " (floor 4), worst gated-greedy x" + num(worst_gpg) + " (" +
             worst_gpg_name + ", cap 1.5)";
}

void c11_lp(CriterionResult& r) {
  // Hand-checkable program: one item, one FDC, one always-arriving type,
  // two periods, stock for one unit, f=(10,1), c=(5,1).  The FDC fraction is
  // capped at 1/2, everything else follows, objective 17.
  OrderTypeDistribution dist;
  dist.types = {{0}};
  dist.probs = {1.0};
  AggregateLp lp = build_aggregate_lp(dist, {10, 1}, {{5}, {1}}, {{1}}, 2);
  LpSolution sol = solve_lp(lp);
  bool hand_ok = sol.status == LpStatus::optimal && std::abs(sol.objective - 17.0) <= 1e-6;

  // The aggregate relaxation lower-bounds the expected clairvoyant optimum:
  // check on 20 tiny setups against a 200-replication brute-force estimate.
  Rng rng(0xACC11);
  int holds = 0;
  double worst_margin = -1e300;
  const int kSetups = 20, kReps = 200;
  for (int s = 0; s < kSetups; ++s) {
    StochasticConfig cfg;
    cfg.n = 2 + int(rng.below(3));
    cfg.K = 1 + int(rng.below(2));
    cfg.T = 2 + int(rng.below(3));
    cfg.f0 = 5 + rng.u01() * 45;
    cfg.f_fdc = 0.5 + rng.u01() * 5;
    cfg.a = 0.5 + rng.u01();
    cfg.b = cfg.a * (1 + rng.u01());
    cfg.tau = 0.3 + rng.u01() * 0.7;
    cfg.regime = CostRegime::invariant;
    if (cfg.n >= 3 && rng.below(2)) {
      cfg.order_sizes = {1, 2};
      cfg.type_counts = {2, 2};
      cfg.size_probs = {0.6, 0.4};
    } else {
      cfg.order_sizes = {1};
      cfg.type_counts = {std::min(3, cfg.n)};
      cfg.size_probs = {1.0};
    }
    Instance inst = gen_stochastic(cfg, 5000 + std::uint64_t(s));
    const OrderTypeDistribution& d = *inst.meta.distribution;
    LpSolution lps = solve_lp(
        build_aggregate_lp(d, inst.fixed_costs, inst.costs[0], inst.inventory, cfg.T));
    if (lps.status != LpStatus::optimal) {
      r.pass = false;
      r.detail = "setup " + std::to_string(s) + ": LP not optimal (" +
                 to_string(lps.status) + ")";
      return;
    }

    // Redraw the order stream from the embedded mixture, holding types,
    // costs, and inventory fixed.
    std::vector<double> cum(d.probs.size());
    double acc = 0;
    for (size_t q = 0; q < d.probs.size(); ++q) cum[q] = (acc += d.probs[q]);
    double sum = 0, sumsq = 0;
    for (int rep = 0; rep < kReps; ++rep) {
      Instance draw = inst;
      Rng order_rng(0xD0 + std::uint64_t(s) * kReps + std::uint64_t(rep));
      for (int t = 0; t < draw.T; ++t) {
        std::fill(draw.orders[size_t(t)].begin(), draw.orders[size_t(t)].end(), 0);
        double u = order_rng.u01();
        size_t q = 0;
        while (q + 1 < cum.size() && u > cum[q]) ++q;
        for (int item : d.types[q]) draw.orders[size_t(t)][size_t(item)] = 1;
      }
      double c = bruteforce_opt(draw).opt_cost;
      sum += c;
      sumsq += c * c;
    }
    double mean = sum / kReps;
    double var = std::max(0.0, sumsq / kReps - mean * mean);
    double se = std::sqrt(var / kReps);
    worst_margin = std::max(worst_margin, lps.objective - (mean + 3 * se));
    if (lps.objective <= mean + 3 * se + 1e-9) ++holds;
  }
  r.pass = hand_ok && holds == kSetups;
  r.detail = std::string("hand LP objective ") +
             (hand_ok ? "17.0 ok" : "WRONG: " + num(sol.objective)) + "; bound held on " +
             std::to_string(holds) + "/" + std::to_string(kSetups) +
             " setups (worst LP-over-(mean+3se) margin = " + num(worst_margin) + ")";
}

void c12_service(CriterionResult& r) {
  Rng rng(0xACC12);
  Service svc;
  using nlohmann::json;
  const int kSessions = 100;
  for (int s = 0; s < kSessions; ++s) {
    Instance inst;
    PolicySpec spec;
    bool stochastic = s % 5 == 0;  // every fifth session exercises the
                                   // forecast-based policies end to end
    if (stochastic) {
      StochasticConfig cfg;
      cfg.n = 3;
      cfg.K = 2;
      cfg.T = 4;
      cfg.order_sizes = {1, 2};
      cfg.type_counts = {2, 2};
      cfg.size_probs = {0.6, 0.4};
      cfg.regime = CostRegime::invariant;
      inst = gen_stochastic(cfg, 7000 + std::uint64_t(s));
      spec.name = s % 10 == 0 ? "ipfc" : "cost-comparison-v-priority";
    } else {
      TinyOpts o;
      o.invariant = rng.below(2) == 1;
      inst = make_tiny(rng, o);
      std::vector<PolicySpec> pool = dominance_specs(inst);
      PolicySpec extra;
      extra.name = "myopic";
      pool.push_back(extra);
      if (inst.K == 1) {
        extra.name = "order-size-adjv-priority";
        pool.push_back(extra);
        extra.name = "better-of-two";
        pool.push_back(extra);
      }
      spec = pool[rng.below(pool.size())];
    }
    std::uint64_t seed = rng.below(1 << 20);
    RunResult batch = run_policy(inst, spec, seed, TraceMode::full);

    json policy{{"name", spec.name}};
    if (spec.theta) policy["theta"] = *spec.theta;
    if (spec.eta) policy["eta"] = *spec.eta;
    if (spec.name == "pure-greedy") policy["greedy_rule"] = spec.greedy_rule;
    json header{{"n", inst.n},
                {"K", inst.K},
                {"T", inst.T},
                {"fixed_costs", inst.fixed_costs},
                {"cost_regime", to_string(inst.regime)},
                {"inventory", inst.inventory}};
    if (inst.cost_bounds)
      header["cost_bounds"] = {inst.cost_bounds->first, inst.cost_bounds->second};
    if (inst.regime == CostRegime::invariant) header["costs"] = inst.costs[0];
    if (inst.meta.distribution)
      header["distribution"] = {{"types", inst.meta.distribution->types},
                                {"probs", inst.meta.distribution->probs}};
    json open{{"v", 1}, {"op", "open"}, {"seed", seed}, {"policy", policy},
              {"header", header}};
    json reply = json::parse(svc.handle_line(open.dump()));
    if (!reply.value("ok", false)) {
      r.pass = false;
      r.detail = "session " + std::to_string(s) + " (" + spec.name +
                 "): open failed: " + reply.dump();
      return;
    }
    std::string sid = reply["session_id"];

    for (int t = 0; t < inst.T; ++t) {
      json decide{{"v", 1}, {"op", "decide"}, {"session", sid},
                  {"order", inst.orders[size_t(t)]}};
      if (inst.regime == CostRegime::varying) decide["costs"] = inst.costs[size_t(t)];
      json dr = json::parse(svc.handle_line(decide.dump()));
      if (!dr.value("ok", false)) {
        r.pass = false;
        r.detail = "session " + std::to_string(s) + ": decide failed: " + dr.dump();
        return;
      }
      const Plan& want = batch.trace[size_t(t)].plan;
      for (int k = 0; k <= inst.K; ++k)
        for (int i = 0; i < inst.n; ++i)
          if (dr["plan"][size_t(k)][size_t(i)].get<i64>() != want.at(k, i)) {
            r.pass = false;
            r.detail = "session " + std::to_string(s) + " (" + spec.name +
                       "): plan mismatch at t=" + std::to_string(t + 1);
            return;
          }
      if (dr["period_cost"].get<double>() != batch.trace[size_t(t)].period_cost ||
          dr["gated"].get<bool>() != batch.trace[size_t(t)].gated) {
        r.pass = false;
        r.detail = "session " + std::to_string(s) + ": period cost/gate mismatch at t=" +
                   std::to_string(t + 1);
        return;
      }
    }
    json close{{"v", 1}, {"op", "close"}, {"session", sid}};
    json cr = json::parse(svc.handle_line(close.dump()));
    if (!cr.value("ok", false) ||
        cr["summary"]["total_cost"].get<double>() != batch.total_cost) {
      r.pass = false;
      r.detail = "session " + std::to_string(s) + ": close/total mismatch";
      return;
    }
  }
  r.pass = true;
  r.detail = std::to_string(kSessions) +
             " sessions replayed: plans, period costs, gate flags, and totals "
             "all identical to the batch runs";
}

struct Criterion {
  int number;
  const char* id;
  double limit_seconds;  // 0 = no limit stated
  void (*body)(CriterionResult&);
};

const Criterion kCriteria[] = {
    {1, "example-1", 1.0, c1_example1},
    {2, "lemma-1", 120.0, c2_dominance},
    {3, "bound-compliance-thm1", 300.0, c3_thm1},
    {4, "bound-compliance-thm4", 300.0, c4_thm4},
    {5, "bound-compliance-alg4", 0, c5_alg4},
    {6, "bound-compliance-thm9", 0, c6_thm9},
    {7, "oracle-cross-checks", 0, c7_oracles},
    {8, "stress", 0, c8_stress},
    {9, "proposition-grids", 0, c9_props},
    {10, "stochastic-ordering", 1800.0, c10_stochastic},
    {11, "lp-sanity", 0, c11_lp},
    {12, "service-equivalence", 0, c12_service},
};

}  // namespace

std::vector<std::string> acceptance_suite_ids() {
  std::vector<std::string> ids{"all"};
  for (const Criterion& c : kCriteria) ids.push_back(c.id);
  return ids;
}

AcceptanceReport run_acceptance(const std::string& suite_id, std::ostream* progress) {
  bool all = suite_id == "all";
  bool known = all;
  for (const Criterion& c : kCriteria) known = known || suite_id == c.id;
  if (!known) throw ConfigError("unknown acceptance suite: " + suite_id);

  AcceptanceReport report;
  report.suite = suite_id;
  for (const Criterion& c : kCriteria) {
    if (!all && suite_id != c.id) continue;
    CriterionResult res;
    res.number = c.number;
    res.id = c.id;
    auto t0 = Clock::now();
    try {
      c.body(res);
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (res.pass && c.limit_seconds > 0 && res.seconds > c.limit_seconds) {
      res.pass = false;
      res.detail += " (runtime " + num(res.seconds) + "s exceeds " +
                    num(c.limit_seconds) + "s)";
    }
    if (!res.pass) report.pass = false;
    if (progress)
      *progress << (res.pass ? "[PASS] " : "[FAIL] ") << res.number << " " << res.id
                << ": " << res.detail << " (" << num(res.seconds) << "s)"
                << std::endl;
    report.results.push_back(std::move(res));
  }
  return report;
}

std::string acceptance_report_json(const AcceptanceReport& report) {
  nlohmann::json j;
  j["suite"] = report.suite;
  j["pass"] = report.pass;
  j["results"] = nlohmann::json::array();
  for (const CriterionResult& r : report.results)
    j["results"].push_back({{"number", r.number},
                            {"id", r.id},
                            {"pass", r.pass},
                            {"detail", r.detail},
                            {"seconds", r.seconds}});
  return j.dump(2) + "\n";
}

}  // namespace fulfill
