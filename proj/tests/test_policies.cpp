#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "fulfill/model.hpp"
#include "fulfill/policies.hpp"

using namespace fulfill;

namespace {

// single-item, single-FDC instance with adjustable knobs
Instance one_item(double f0, double f1, double c0, double c1, i64 stock,
                  std::vector<i64> orders, double a, double b) {
  Instance inst;
  inst.n = 1;
  inst.K = 1;
  inst.T = (int)orders.size();
  inst.fixed_costs = {f0, f1};
  inst.regime = CostRegime::invariant;
  inst.costs.assign(inst.T, {{c0}, {c1}});
  inst.inventory = {{stock}};
  inst.orders.resize(inst.T);
  for (int t = 0; t < inst.T; ++t) inst.orders[t] = {orders[t]};
  inst.cost_bounds = {{a, b}};
  return inst;
}

}  // namespace

TEST_CASE("theta_default matches its closed form") {
  // sqrt(f0/a + (fmin-b)^2/(4a^2)) - (fmin-b)/(2a)
  CHECK(theta_default(50, 5, 8, 30) ==
        doctest::Approx(4.510619103767689).epsilon(1e-12));
  // f0=1, fmin=0, a=b=1 collapses to the golden ratio
  CHECK(theta_default(1, 0, 1, 1) ==
        doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK_THROWS_AS(theta_default(50, 5, 0, 30), std::domain_error);
  CHECK_THROWS_AS(theta_default(50, 5, -1, 30), std::domain_error);
}

TEST_CASE("randomized gate probability is the documented piecewise curve") {
  const double f0 = 1, f1 = 2;
  CHECK(randomized_gate_probability(0, f0, f1) == 1.0);
  CHECK(randomized_gate_probability(2, f0, f1) == 1.0);  // x == f1 still certain
  // interior: (f1^2-(f0+x)f0)/(f1^2+(f0+x)(x-f1)) at x=2.5 -> 0.5/5.75
  CHECK(randomized_gate_probability(2.5, f0, f1) ==
        doctest::Approx(2.0 / 23.0).epsilon(1e-12));
  // upper knee max{f1, f1^2/f0 - f0} = 3; zero there and beyond
  CHECK(randomized_gate_probability(3, f0, f1) == doctest::Approx(0.0));
  CHECK(randomized_gate_probability(4, f0, f1) == 0.0);
  CHECK_THROWS_AS(randomized_gate_probability(1, 0, f1), std::domain_error);
  CHECK_THROWS_AS(randomized_gate_probability(1, f0, 0), std::domain_error);
}

TEST_CASE("better_of_two_select picks per the closed-form comparison") {
  // f0 <= f1 always favors the cost-comparison variant
  auto cheap_rdc = better_of_two_select(1, 2, 8, 30);
  CHECK(cheap_rdc.algorithm == "cost-comparison-adjv-priority");

  // f0=50, f1=5, a=8, b=30: 1+max{10, sqrt(30/8)} = 11 exceeds
  // (4+sqrt(2))*max{sqrt(50/16), sqrt(30/8)} ~= 10.48, so the
  // order-size variant wins with its own (eta, theta)
  auto pricey_rdc = better_of_two_select(50, 5, 8, 30);
  CHECK(pricey_rdc.algorithm == "order-size-adjv-priority");
  CHECK(pricey_rdc.eta == doctest::Approx(std::sqrt(3.75)).epsilon(1e-12));
  CHECK(pricey_rdc.theta ==
        doctest::Approx(50.0 / (2 * 8 * std::sqrt(3.75))).epsilon(1e-12));
}

TEST_CASE("greedy fill walks the ranking and spills leftovers to the RDC") {
  GatedGreedyPolicy pol("explicit", RuleKind::explicit_order, GateKind::none,
                        GateTarget::rdc);
  pol.set_explicit_ranking({{1, 2}});

  InstanceHeader h;
  h.n = 1;
  h.K = 2;
  h.T = 1;
  h.fixed_costs = {1, 1, 1};
  h.regime = CostRegime::invariant;
  h.invariant_costs = {{1}, {1}, {1}};
  h.inventory0 = {{3}, {4}};
  pol.begin(h, 0);
  CHECK(pol.fdc_preference() == std::vector<std::vector<int>>{{1, 2}});

  InventoryState inv{h.inventory0, 0};
  Plan plan(2, 1);
  StepInfo info;
  pol.decide(1, {5}, h.invariant_costs, inv, plan, info);
  CHECK(plan.at(1, 0) == 3);  // best-ranked FDC drained first
  CHECK(plan.at(2, 0) == 2);  // then the next one; nothing left for the RDC
  CHECK(plan.at(0, 0) == 0);
  CHECK_FALSE(info.gated);

  SUBCASE("ranking overflow reaches the RDC") {
    Plan big(2, 1);
    pol.decide(1, {9}, h.invariant_costs, inv, big, info);
    CHECK(big.at(1, 0) == 3);
    CHECK(big.at(2, 0) == 4);
    CHECK(big.at(0, 0) == 2);
  }
  SUBCASE("invalid FDC id in an explicit ranking") {
    GatedGreedyPolicy bad("explicit", RuleKind::explicit_order, GateKind::none,
                          GateTarget::rdc);
    bad.set_explicit_ranking({{3}});
    CHECK_THROWS_AS(bad.begin(h, 0), ConfigError);
  }
}

TEST_CASE("order-size gate is strict and routes to the RDC") {
  Instance inst = one_item(10, 1, 1, 0.5, 5, {3}, 0.5, 1);
  PolicySpec spec;
  spec.name = "order-size-f-priority";

  spec.theta = 3.0;  // order of exactly theta stays on the greedy branch
  RunResult at = run_policy(inst, spec, 0);
  CHECK(at.gated_periods == 0);
  CHECK(at.total_cost == doctest::Approx(1 + 3 * 0.5));

  spec.theta = 2.9;  // now the gate fires and everything ships from the RDC
  RunResult above = run_policy(inst, spec, 0);
  CHECK(above.gated_periods == 1);
  CHECK(above.total_cost == doctest::Approx(10 + 3 * 1.0));
}

TEST_CASE("order-size FDC gate ships whole small orders from the FDC") {
  // c1/c0 = 30/8 makes the adjusted ranking prefer the RDC, so any FDC
  // shipment here can only come from the gate itself.
  PolicySpec spec;
  spec.name = "order-size-adjv-priority";

  SUBCASE("small covered order goes entirely to the FDC") {
    Instance inst = one_item(50, 5, 8, 30, 1, {1}, 8, 30);
    RunResult rr = run_policy(inst, spec, 0, TraceMode::full);
    CHECK(rr.gated_periods == 1);
    CHECK(rr.trace[0].plan.at(1, 0) == 1);
    CHECK(rr.total_cost == doctest::Approx(5 + 30));
    // derived knobs: eta = sqrt(max{f0/2, b}/a), theta = f0/(2 a eta)
    CHECK(rr.trace[0].gated);
  }
  SUBCASE("oversized order takes the greedy branch") {
    Instance inst = one_item(50, 5, 8, 30, 5, {2}, 8, 30);
    RunResult rr = run_policy(inst, spec, 0);  // theta ~= 1.614 < 2
    CHECK(rr.gated_periods == 0);
    CHECK(rr.total_cost == doctest::Approx(50 + 2 * 8));  // RDC-ranked greedy
  }
  SUBCASE("uncovered order takes the greedy branch") {
    Instance inst = one_item(50, 5, 8, 30, 0, {1}, 8, 30);
    RunResult rr = run_policy(inst, spec, 0);
    CHECK(rr.gated_periods == 0);
    CHECK(rr.total_cost == doctest::Approx(50 + 8));
  }
}

TEST_CASE("variable-cost rankings refuse time-varying costs") {
  Instance inst = one_item(10, 1, 2, 1, 5, {1, 1}, 1, 2);
  inst.regime = CostRegime::varying;
  inst.costs[1][0][0] = 1.5;  // actually drift

  PolicySpec spec;
  spec.name = "cost-comparison-v-priority";
  CHECK_THROWS_AS(run_policy(inst, spec, 0), ConfigError);

  spec.name = "pure-greedy";
  spec.greedy_rule = "v-priority";
  CHECK_THROWS_AS(run_policy(inst, spec, 0), ConfigError);

  spec.greedy_rule = "f-priority";  // fixed-cost ranking is regime-agnostic
  CHECK_NOTHROW(run_policy(inst, spec, 0));
}

TEST_CASE("make_policy rejects unknown names and rules") {
  PolicySpec spec;
  spec.name = "does-not-exist";
  CHECK_THROWS_AS(make_policy(spec), ConfigError);
  spec.name = "pure-greedy";
  spec.greedy_rule = "by-vibes";
  CHECK_THROWS_AS(make_policy(spec), ConfigError);
}

TEST_CASE("randomized gate is deterministic in its certain regions") {
  PolicySpec spec;
  spec.name = "randomized-cc-v-priority";

  SUBCASE("saving below f1: gate always fires") {
    // per-unit saving 1, one unit -> x = 1 <= f1 = 2 -> p = 1
    Instance inst = one_item(1, 2, 2, 1, 9, {1, 1, 1}, 1, 2);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      RunResult rr = run_policy(inst, spec, seed);
      CHECK(rr.gated_periods == 3);
      CHECK(rr.total_cost == doctest::Approx(3 * (1 + 2 * 1.0)));
    }
  }
  SUBCASE("saving beyond the knee: gate never fires") {
    // x = 4 > max{f1, f1^2/f0 - f0} = 3 -> p = 0
    Instance inst = one_item(1, 2, 2, 1, 10, {4}, 1, 2);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      RunResult rr = run_policy(inst, spec, seed);
      CHECK(rr.gated_periods == 0);
      CHECK(rr.total_cost == doctest::Approx(2 + 4 * 1.0));
    }
  }
}

TEST_CASE("fdc_preference reports static rankings only") {
  Instance inst = one_item(10, 1, 2, 1, 5, {1}, 1, 2);

  PolicySpec spec;
  spec.name = "all-rdc";
  RunResult rr = run_policy(inst, spec, 0);
  REQUIRE(rr.fdc_pref.size() == 1);
  CHECK(rr.fdc_pref[0].empty());  // nothing ever precedes the RDC

  // adjusted-V under varying costs ranks per period: no static preference
  Instance vary = inst;
  vary.regime = CostRegime::varying;
  spec.name = "cost-comparison-adjv-priority";
  RunResult rv = run_policy(vary, spec, 0);
  CHECK(rv.fdc_pref.empty());

  // same policy under invariant costs has a static ranking (c1 < c0/eta)
  spec.eta = 1.0;
  RunResult ri = run_policy(inst, spec, 0);
  REQUIRE(ri.fdc_pref.size() == 1);
  CHECK(ri.fdc_pref[0] == std::vector<int>{1});
}
