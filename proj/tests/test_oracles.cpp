#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fulfill/instances.hpp"
#include "fulfill/model.hpp"
#include "fulfill/oracles.hpp"
#include "fulfill/policies.hpp"

using namespace fulfill;

namespace {

BoundInputs probe_point() {
  BoundInputs in;
  in.f0 = 50;
  in.f1 = 5;
  in.fmin = 5;
  in.a = 8;
  in.b = 30;
  return in;
}

}  // namespace

TEST_CASE("guarantee formulas at a hand-computed probe point") {
  BoundInputs in = probe_point();

  // max{theta, (f0+b theta)/(fmin+a theta), b/a} with theta pinned to 2
  BoundInputs t1 = in;
  t1.theta = 2;
  CHECK(bound_value("theorem-1", t1) ==
        doctest::Approx(110.0 / 21.0).epsilon(1e-12));

  // all three branches of the lower bound stay at/below 1 here
  CHECK(bound_value("theorem-2", in) == 1.0);

  CHECK(bound_value("theorem-3", in) == doctest::Approx(11.0));

  // (4+sqrt 2) * sqrt(max{f0/2, b}/a)
  CHECK(bound_value("theorem-6", in) ==
        doctest::Approx(10.4845794799).epsilon(1e-9));

  CHECK(bound_value("theorem-7", in) == doctest::Approx(1.0));

  // min of the cost-comparison and order-size guarantees (f0 >= f1 here)
  CHECK(bound_value("corollary-1", in) ==
        doctest::Approx(10.4845794799).epsilon(1e-9));
  CHECK(bound_value("corollary-1-closed", in) ==
        doctest::Approx(10.4845794799).epsilon(1e-9));

  CHECK(bound_value("theorem-10", in) == doctest::Approx(11.0));

  BoundInputs t4;
  t4.f0 = 50;
  t4.fdc_fixed_costs.assign(10, 5.0);
  CHECK(bound_value("theorem-4", t4) == doctest::Approx(20.0));

  BoundInputs t9;
  t9.w = 0.5;  // below (sqrt5-1)/2: curved branch
  CHECK(bound_value("theorem-9", t9) ==
        doctest::Approx(1.5224077499).epsilon(1e-9));
  t9.w = 0.8;  // linear branch
  CHECK(bound_value("theorem-9", t9) == doctest::Approx(1.8));
  // w defaults to f0/f1 when absent
  BoundInputs t9r;
  t9r.f0 = 4;
  t9r.f1 = 5;
  CHECK(bound_value("theorem-9", t9r) == doctest::Approx(1.8));

  CHECK(bound_value("prop-1", {}) ==
        doctest::Approx(2 * (1 + std::sqrt(5.0))).epsilon(1e-12));
  CHECK(bound_value("prop-2", {}) ==
        doctest::Approx(4 * (9 + 4 * std::sqrt(2.0)) /
                        (std::sqrt(10 + 4 * std::sqrt(2.0)) - 1))
            .epsilon(1e-12));
}

TEST_CASE("guarantee formulas validate their inputs") {
  CHECK_THROWS_AS(bound_value("theorem-11", probe_point()), ConfigError);

  BoundInputs empty;
  try {
    bound_value("theorem-3", empty);
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()) == "theorem-3: missing input f0");
  }

  BoundInputs bad = probe_point();
  bad.a = 0;  // unit costs must be strictly positive
  CHECK_THROWS_AS(bound_value("theorem-6", bad), std::domain_error);

  BoundInputs neg = probe_point();
  neg.theta = -1;
  CHECK_THROWS_AS(bound_value("theorem-1", neg), std::domain_error);

  BoundInputs t4;
  t4.f0 = 50;
  CHECK_THROWS_AS(bound_value("theorem-4", t4), std::domain_error);
  t4.fdc_fixed_costs = {5, 0};  // a free FDC makes the ratio unbounded
  CHECK(std::isinf(bound_value("theorem-4", t4)));
}

TEST_CASE("brute force matches the alternating-order construction") {
  Instance inst = gen_adversarial("example-1", R"({"M":5})");
  OptResult opt = bruteforce_opt(inst);
  REQUIRE_FALSE(opt.overflow);
  CHECK(opt.method == OptMethod::brute_force);
  CHECK(opt.opt_cost == 3.0);  // exact closed form, no rounding anywhere

  OptResult ann = analytic_opt(inst);
  CHECK(ann.method == OptMethod::analytic_exact);
  CHECK(ann.opt_cost == 3.0);

  PolicySpec greedy;  // defaults to pure-greedy, f-priority
  CHECK(run_policy(inst, greedy, 0).total_cost ==
        doctest::Approx(7.0).epsilon(1e-9));
  PolicySpec rdc;
  rdc.name = "all-rdc";
  CHECK(run_policy(inst, rdc, 0).total_cost ==
        doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("brute force exposes its plan and replays to its own cost") {
  Instance inst = gen_adversarial("example-1", R"({"M":3})");
  BruteForceLimits lim;
  lim.want_plan = true;
  OptResult opt = bruteforce_opt(inst, lim);
  REQUIRE(opt.plan.has_value());
  REQUIRE((int)opt.plan->size() == inst.T);

  InventoryState st = initial_state(inst);
  double total = 0;
  for (int t = 0; t < inst.T; ++t) {
    total += period_cost((*opt.plan)[t], inst.fixed_costs, inst.costs[t]);
    apply_plan(st, (*opt.plan)[t], inst.orders[t]);
  }
  CHECK(total == doctest::Approx(opt.opt_cost).epsilon(1e-12));
}

TEST_CASE("brute force respects its state budget and self-checks its memo") {
  Instance inst = gen_adversarial("example-1", R"({"M":5})");
  BruteForceLimits lim;
  lim.max_states = 1;
  OptResult starved = bruteforce_opt(inst, lim);
  CHECK(starved.overflow);

  BruteForceLimits paranoid;
  paranoid.recheck_every = 1;  // re-expand every memo hit
  OptResult checked = bruteforce_opt(inst, paranoid);
  CHECK(checked.opt_cost == 3.0);
}

TEST_CASE("paired family carries one exact and one upper-bound annotation") {
  const char* params = R"({"n":3,"f":5,"f0":50,"a":8})";
  auto pair = gen_adversarial_family("thm2-pair", params);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].meta.variant == "I1");
  CHECK(pair[1].meta.variant == "I2");

  OptResult o1 = analytic_opt(pair[0]);
  CHECK(o1.method == OptMethod::analytic_exact);
  CHECK(o1.opt_cost == doctest::Approx(29.0));

  OptResult o2 = analytic_opt(pair[1]);
  CHECK(o2.method == OptMethod::analytic_upper_bound);
  CHECK(o2.opt_cost == doctest::Approx(113.0));

  // underscore alias for the variant name
  Instance alias = gen_adversarial("thm2-pair",
                                   R"({"n":3,"f":5,"f0":50,"a":8,"variant":"I_1"})");
  CHECK(alias.meta.variant == "I1");

  // simple families yield a single instance
  CHECK(gen_adversarial_family("example-1", R"({"M":4})").size() == 1);
}

TEST_CASE("small-table family annotation agrees with brute force bit for bit") {
  Instance inst = gen_adversarial("thm5-table", R"({"s":1,"d":1,"n":2,"K":2})");
  OptResult ann = analytic_opt(inst);
  OptResult brute = bruteforce_opt(inst);
  REQUIRE_FALSE(brute.overflow);
  CHECK(ann.opt_cost == doctest::Approx(5.04).epsilon(1e-12));
  CHECK(brute.opt_cost == ann.opt_cost);

  auto pair = gen_adversarial_family("thm8/10-pair", "{}");
  REQUIRE(pair.size() == 2);
  CHECK(bruteforce_opt(pair[0]).opt_cost == analytic_opt(pair[0]).opt_cost);
  CHECK(bruteforce_opt(pair[1]).opt_cost == analytic_opt(pair[1]).opt_cost);
  CHECK(analytic_opt(pair[0]).opt_cost == doctest::Approx(4.0));
  CHECK(analytic_opt(pair[1]).opt_cost == doctest::Approx(12.0));
}

TEST_CASE("stress family closed forms") {
  Instance inst = gen_adversarial("stress", R"({"f0":50})");
  // n = ceil(sqrt(f0)) items, T = n+1 periods
  CHECK(inst.n == 8);
  CHECK(inst.T == 9);
  OptResult opt = analytic_opt(inst);
  CHECK(opt.method == OptMethod::analytic_exact);
  CHECK(opt.opt_cost == doctest::Approx(66.0));  // f0 + 2n

  PolicySpec myopic;
  myopic.name = "myopic";
  CHECK(run_policy(inst, myopic, 0).total_cost ==
        doctest::Approx(416.0));  // n (f0 + 2): pays the big charge every period
  PolicySpec osfp;
  osfp.name = "order-size-f-priority";
  CHECK(run_policy(inst, osfp, 0).total_cost == doctest::Approx(66.0));
}

TEST_CASE("competitive ratio bookkeeping") {
  OptResult exact;
  exact.opt_cost = 3.0;
  exact.method = OptMethod::brute_force;
  RatioResult r = competitive_ratio(6.0, exact);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK_FALSE(r.lower_bound_on_ratio);
  CHECK_FALSE(r.infinite);

  OptResult zero;
  zero.opt_cost = 0.0;
  RatioResult z = competitive_ratio(1.0, zero);
  CHECK(z.infinite);

  OptResult ub;
  ub.opt_cost = 3.0;
  ub.method = OptMethod::analytic_upper_bound;
  RatioResult u = competitive_ratio(6.0, ub);
  CHECK(u.value == doctest::Approx(2.0));
  CHECK(u.lower_bound_on_ratio);  // true ratio can only be larger

  // unannotated ad-hoc instances have no analytic optimum to read
  Instance adhoc;
  adhoc.n = 1;
  adhoc.K = 0;
  adhoc.T = 1;
  adhoc.fixed_costs = {1};
  adhoc.costs = {{{1.0}}};
  adhoc.orders = {{1}};
  CHECK_THROWS_AS(analytic_opt(adhoc), ConfigError);
}
