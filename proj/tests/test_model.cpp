#include "doctest.h"

#include <cmath>

#include "fulfill/model.hpp"
#include "fulfill/policies.hpp"

using namespace fulfill;

namespace {

// n=2, K=1, T=2 workbench instance used across the cases below
Instance bench_instance() {
  Instance inst;
  inst.n = 2;
  inst.K = 1;
  inst.T = 2;
  inst.fixed_costs = {3.0, 1.0};
  inst.regime = CostRegime::invariant;
  inst.costs.assign(2, {{2.0, 2.0}, {0.5, 0.5}});
  inst.inventory = {{1, 2}};
  inst.orders = {{1, 1}, {0, 2}};
  inst.cost_bounds = {{0.5, 2.0}};
  return inst;
}

}  // namespace

TEST_CASE("period_cost charges fixed costs only for DCs that ship") {
  Instance inst = bench_instance();
  Plan plan(1, 2);

  SUBCASE("empty plan costs nothing") {
    CHECK(period_cost(plan, inst.fixed_costs, inst.costs[0]) == 0.0);
  }
  SUBCASE("single-DC plan pays one fixed charge") {
    plan.at(1, 0) = 1;
    plan.at(1, 1) = 1;
    CHECK(period_cost(plan, inst.fixed_costs, inst.costs[0]) ==
          doctest::Approx(1.0 + 0.5 + 0.5));
  }
  SUBCASE("split plan pays both") {
    plan.at(0, 0) = 1;
    plan.at(1, 1) = 2;
    CHECK(period_cost(plan, inst.fixed_costs, inst.costs[0]) ==
          doctest::Approx(3.0 + 2.0 + 1.0 + 1.0));
  }
}

TEST_CASE("apply_plan enforces demand, stock, and sign constraints") {
  Instance inst = bench_instance();
  InventoryState st = initial_state(inst);
  CHECK(st.period == 0);
  CHECK(st.levels == inst.inventory);

  Plan plan(1, 2);
  plan.at(1, 0) = 1;
  plan.at(0, 1) = 1;
  apply_plan(st, plan, inst.orders[0]);
  CHECK(st.period == 1);
  CHECK(st.levels[0][0] == 0);  // FDC stock decremented
  CHECK(st.levels[0][1] == 2);  // RDC shipment leaves the FDC untouched

  SUBCASE("demand mismatch") {
    Plan bad(1, 2);
    bad.at(0, 0) = 2;  // order asks 0 of item 0 in period 2
    CHECK_THROWS_AS(apply_plan(st, bad, inst.orders[1]), InfeasiblePlan);
    try {
      apply_plan(st, bad, inst.orders[1]);
    } catch (const InfeasiblePlan& e) {
      CHECK(e.constraint == "demand");
      CHECK(e.i == 0);
    }
  }
  SUBCASE("inventory overdraw") {
    // drain item 1's remaining FDC stock, then ask for it again
    Plan drain(1, 2);
    drain.at(1, 1) = 2;
    apply_plan(st, drain, inst.orders[1]);
    CHECK(st.levels[0][1] == 0);
    CHECK_THROWS_AS(apply_plan(st, drain, inst.orders[1]), InfeasiblePlan);
    try {
      apply_plan(st, drain, inst.orders[1]);
    } catch (const InfeasiblePlan& e) {
      CHECK(e.constraint == "inventory");
      CHECK(e.k == 1);
      CHECK(e.i == 1);
    }
  }
  SUBCASE("negative entries") {
    Plan bad(1, 2);
    bad.at(0, 1) = 3;
    bad.at(1, 1) = -1;
    CHECK_THROWS_AS(apply_plan(st, bad, inst.orders[1]), InfeasiblePlan);
  }
  SUBCASE("shape mismatch") {
    Plan bad(2, 2);  // wrong K
    CHECK_THROWS_AS(apply_plan(st, bad, inst.orders[1]), InfeasiblePlan);
  }
}

TEST_CASE("validate_instance pinpoints malformed fields") {
  Instance inst = bench_instance();
  CHECK(validate_instance(inst).empty());

  SUBCASE("negative order") {
    inst.orders[1][0] = -2;
    auto issues = validate_instance(inst);
    REQUIRE_FALSE(issues.empty());
    CHECK(issues[0].pointer.find("/orders") == 0);
  }
  SUBCASE("ragged cost tensor") {
    inst.costs[1].pop_back();
    CHECK_FALSE(validate_instance(inst).empty());
  }
  SUBCASE("fixed_costs length") {
    inst.fixed_costs.pop_back();
    CHECK_FALSE(validate_instance(inst).empty());
  }
  SUBCASE("invariant regime with drifting costs") {
    inst.costs[1][0][0] = 1.9;
    CHECK_FALSE(validate_instance(inst).empty());
  }
}

TEST_CASE("header_of carries costs only under the invariant regime") {
  Instance inst = bench_instance();
  InstanceHeader h = header_of(inst);
  CHECK(h.n == 2);
  CHECK(h.K == 1);
  CHECK(h.T == 2);
  CHECK(h.regime == CostRegime::invariant);
  REQUIRE_FALSE(h.invariant_costs.empty());
  CHECK(h.invariant_costs[1][0] == 0.5);
  CHECK(h.cost_bounds == inst.cost_bounds);

  inst.regime = CostRegime::varying;
  inst.costs[1][0][0] = 1.7;  // now allowed to drift
  InstanceHeader hv = header_of(inst);
  CHECK(hv.invariant_costs.empty());
}

TEST_CASE("run_policy feeds 1-based periods and records a faithful trace") {
  Instance inst = bench_instance();
  PolicySpec spec;
  spec.name = "all-rdc";
  RunResult rr = run_policy(inst, spec, 5, TraceMode::full);

  CHECK(rr.policy_id == "all-rdc");
  CHECK(rr.seed == 5);
  CHECK(rr.decisions == 2);
  REQUIRE(rr.trace.size() == 2);
  CHECK(rr.trace[0].period == 1);
  CHECK(rr.trace[1].period == 2);

  double total = 0;
  for (const PeriodRecord& pr : rr.trace) {
    total += pr.period_cost;
    // all-rdc never touches FDC stock
    CHECK(pr.inventory_after == inst.inventory);
    for (int i = 0; i < inst.n; ++i) CHECK(pr.plan.at(1, i) == 0);
  }
  CHECK(rr.total_cost == doctest::Approx(total));
  CHECK(rr.period_costs.size() == 2);
  // period 1: order (1,1) -> f0 + 2 + 2; period 2: order (0,2) -> f0 + 4
  CHECK(rr.total_cost == doctest::Approx((3 + 4) + (3 + 4)));
  CHECK(rr.gated_periods == 0);
}

TEST_CASE("run_policy totals match the sum of period costs for a gated run") {
  Instance inst = bench_instance();
  PolicySpec spec;
  spec.name = "order-size-f-priority";
  spec.theta = 1.0;  // both periods order more than one unit -> gate fires
  RunResult rr = run_policy(inst, spec, 1, TraceMode::costs);
  CHECK(rr.gated_periods == 2);
  double total = 0;
  for (double c : rr.period_costs) total += c;
  CHECK(rr.total_cost == doctest::Approx(total));
}
