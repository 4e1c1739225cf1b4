#include "fulfill/model.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "fulfill/policies.hpp"

namespace fulfill {

double period_cost(const Plan& plan, const std::vector<double>& fixed_costs,
                   const std::vector<std::vector<double>>& cost_col) {
  double total = 0;
  for (int k = 0; k <= plan.K; ++k) {
    bool ships = false;
    double var = 0;
    for (int i = 0; i < plan.n; ++i) {
      i64 m = plan.at(k, i);
      if (m > 0) {
        ships = true;
        var += cost_col[k][i] * double(m);
      }
    }
    if (ships) total += fixed_costs[k] + var;
  }
  return total;
}

void apply_plan(InventoryState& state, const Plan& plan,
                const std::vector<i64>& order) {
  const int K = plan.K, n = plan.n;
  if ((int)order.size() != n || (int)state.levels.size() != K) {
    throw InfeasiblePlan("shape", -1, -1, "plan does not match instance shape");
  }
  for (int i = 0; i < n; ++i) {
    i64 sum = 0;
    for (int k = 0; k <= K; ++k) {
      i64 m = plan.at(k, i);
      if (m < 0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "negative shipment m[%d][%d]", k, i);
        throw InfeasiblePlan("negativity", k, i, buf);
      }
      sum += m;
    }
    if (sum != order[i]) {
      char buf[96];
      std::snprintf(buf, sizeof buf,
                    "item %d ships %lld units against an order of %lld", i, sum,
                    order[i]);
      throw InfeasiblePlan("demand", -1, i, buf);
    }
    for (int k = 1; k <= K; ++k) {
      if (plan.at(k, i) > state.levels[k - 1][i]) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "m[%d][%d]=%lld exceeds stock %lld", k, i, plan.at(k, i),
                      state.levels[k - 1][i]);
        throw InfeasiblePlan("inventory", k, i, buf);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int k = 1; k <= K; ++k) state.levels[k - 1][i] -= plan.at(k, i);
  state.period += 1;
}

std::vector<ValidationIssue> validate_instance(const Instance& inst) {
  std::vector<ValidationIssue> out;
  auto bad = [&](std::string ptr, std::string msg) {
    out.push_back({std::move(ptr), std::move(msg)});
  };
  if (inst.n <= 0) bad("/n", "needs at least one item");
  if (inst.K < 0) bad("/K", "cannot be negative");
  if (inst.T <= 0) bad("/T", "needs at least one period");
  if ((int)inst.fixed_costs.size() != inst.K + 1)
    bad("/fixed_costs", "expected K+1 entries");
  for (size_t k = 0; k < inst.fixed_costs.size(); ++k)
    if (!(inst.fixed_costs[k] >= 0) || !std::isfinite(inst.fixed_costs[k]))
      bad("/fixed_costs/" + std::to_string(k), "must be finite and >= 0");
  if ((int)inst.inventory.size() != inst.K) {
    bad("/inventory", "expected K rows");
  } else {
    for (int k = 0; k < inst.K; ++k) {
      if ((int)inst.inventory[k].size() != inst.n) {
        bad("/inventory/" + std::to_string(k), "expected n entries");
        continue;
      }
      for (int i = 0; i < inst.n; ++i)
        if (inst.inventory[k][i] < 0)
          bad("/inventory/" + std::to_string(k) + "/" + std::to_string(i),
              "negative stock");
    }
  }
  if ((int)inst.orders.size() != inst.T) {
    bad("/orders", "expected T rows");
  } else {
    for (int t = 0; t < inst.T; ++t) {
      if ((int)inst.orders[t].size() != inst.n) {
        bad("/orders/" + std::to_string(t), "expected n entries");
        continue;
      }
      for (int i = 0; i < inst.n; ++i)
        if (inst.orders[t][i] < 0)
          bad("/orders/" + std::to_string(t) + "/" + std::to_string(i),
              "negative order quantity");
    }
  }
  if ((int)inst.costs.size() != inst.T) {
    bad("/costs", "expected T entries");
  } else {
    for (int t = 0; t < inst.T; ++t) {
      if ((int)inst.costs[t].size() != inst.K + 1) {
        bad("/costs/" + std::to_string(t), "expected K+1 rows");
        continue;
      }
      for (int k = 0; k <= inst.K; ++k) {
        if ((int)inst.costs[t][k].size() != inst.n) {
          bad("/costs/" + std::to_string(t) + "/" + std::to_string(k),
              "expected n entries");
          continue;
        }
        for (int i = 0; i < inst.n; ++i) {
          double c = inst.costs[t][k][i];
          if (!std::isfinite(c) || c < 0)
            bad("/costs/" + std::to_string(t) + "/" + std::to_string(k) + "/" +
                    std::to_string(i),
                "must be finite and >= 0");
        }
      }
    }
  }
  if (inst.regime == CostRegime::invariant && out.empty()) {
    for (int t = 1; t < inst.T; ++t)
      if (inst.costs[t] != inst.costs[0]) {
        bad("/costs/" + std::to_string(t),
            "declared time-invariant but differs from period 1");
        break;
      }
  }
  if (inst.cost_bounds) {
    auto [a, b] = *inst.cost_bounds;
    if (!(a > 0) || !(b >= a)) bad("/cost_bounds", "need 0 < a <= b");
  }
  return out;
}

InstanceHeader header_of(const Instance& inst) {
  InstanceHeader h;
  h.n = inst.n;
  h.K = inst.K;
  h.T = inst.T;
  h.fixed_costs = inst.fixed_costs;
  h.regime = inst.regime;
  h.cost_bounds = inst.cost_bounds;
  h.inventory0 = inst.inventory;
  if (inst.regime == CostRegime::invariant && !inst.costs.empty())
    h.invariant_costs = inst.costs[0];
  if (inst.meta.distribution) h.distribution = inst.meta.distribution;
  return h;
}

RunResult run_policy(const Instance& inst, Policy& policy, std::uint64_t seed,
                     TraceMode mode) {
  using clock = std::chrono::steady_clock;
  auto run_start = clock::now();

  RunResult r;
  r.policy_id = policy.id();
  r.seed = seed;

  policy.begin(header_of(inst), seed);

  InventoryState state = initial_state(inst);
  Plan plan(inst.K, inst.n);
  StepInfo info;
  for (int t = 0; t < inst.T; ++t) {
    plan.clear();
    info = StepInfo{};
    auto d0 = clock::now();
    policy.decide(t + 1, inst.orders[t], inst.costs[t], state, plan, info);
    auto d1 = clock::now();
    r.decide_time += std::chrono::duration<double>(d1 - d0).count();
    r.decisions += 1;

    double pc = period_cost(plan, inst.fixed_costs, inst.costs[t]);
    apply_plan(state, plan, inst.orders[t]);
    r.total_cost += pc;
    if (info.gated) r.gated_periods += 1;
    if (info.fallback) r.rounding_fallbacks += 1;
    if (mode != TraceMode::none) r.period_costs.push_back(pc);
    if (mode == TraceMode::full) {
      PeriodRecord rec;
      rec.period = t + 1;
      rec.gated = info.gated;
      rec.period_cost = pc;
      rec.plan = plan;
      rec.proposal = info.proposal ? *info.proposal : Plan(inst.K, inst.n);
      rec.inventory_after = state.levels;
      r.trace.push_back(std::move(rec));
    }
  }
  r.fdc_pref = policy.fdc_preference();
  r.wall_time = std::chrono::duration<double>(clock::now() - run_start).count();
  return r;
}

RunResult run_policy(const Instance& inst, const PolicySpec& spec,
                     std::uint64_t seed, TraceMode mode) {
  auto policy = make_policy(spec);
  return run_policy(inst, *policy, seed, mode);
}

}  // namespace fulfill
