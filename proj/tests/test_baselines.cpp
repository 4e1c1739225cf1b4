#include "doctest.h"

#include <vector>

#include "fulfill/baselines.hpp"
#include "fulfill/model.hpp"
#include "fulfill/rng.hpp"

using namespace fulfill;

TEST_CASE("myopic picks the cheapest activation subset") {
  // each FDC stocks exactly the item it is cheap for
  std::vector<i64> order = {1, 1};
  std::vector<std::vector<i64>> inv = {{1, 0}, {0, 1}};
  std::vector<std::vector<double>> costs = {{5, 5}, {1, 9}, {9, 1}};
  std::vector<double> fixed = {10, 1, 1};

  Plan p = myopic_decide(order, inv, costs, fixed);
  CHECK(p.at(1, 0) == 1);
  CHECK(p.at(2, 1) == 1);
  CHECK(p.at(0, 0) == 0);
  CHECK(p.at(0, 1) == 0);
  CHECK(period_cost(p, fixed, costs) == doctest::Approx(4.0));
}

TEST_CASE("myopic tie-breaks toward the lexicographically first subset") {
  std::vector<i64> order = {1};
  std::vector<std::vector<i64>> inv = {{5}, {5}};
  std::vector<std::vector<double>> costs = {{5}, {1}, {1}};
  std::vector<double> fixed = {10, 1, 1};  // the two FDCs are clones

  Plan p = myopic_decide(order, inv, costs, fixed);
  CHECK(p.at(1, 0) == 1);
  CHECK(p.at(2, 0) == 0);
}

TEST_CASE("myopic splits when stock cannot cover the order") {
  std::vector<i64> order = {3};
  std::vector<std::vector<i64>> inv = {{2}};
  std::vector<std::vector<double>> costs = {{5}, {1}};
  std::vector<double> fixed = {10, 1};

  Plan p = myopic_decide(order, inv, costs, fixed);
  CHECK(p.at(1, 0) == 2);  // all the stock there is
  CHECK(p.at(0, 0) == 1);  // remainder forced through the RDC
}

TEST_CASE("myopic keeps everything at the RDC when activations do not pay") {
  std::vector<i64> order = {1};
  std::vector<std::vector<i64>> inv = {{5}};
  std::vector<std::vector<double>> costs = {{1}, {0.1}};
  std::vector<double> fixed = {1, 50};

  Plan p = myopic_decide(order, inv, costs, fixed);
  CHECK(p.at(0, 0) == 1);
  CHECK(p.at(1, 0) == 0);

  MyopicLimits tight;
  tight.max_K = 0;
  CHECK_THROWS_AS(myopic_decide(order, inv, costs, fixed, tight), ConfigError);
}

TEST_CASE("aggregate LP reproduces the hand-solved single-type program") {
  OrderTypeDistribution dist;
  dist.types = {{0}};
  dist.probs = {1.0};
  std::vector<double> fixed = {10, 1};
  std::vector<std::vector<double>> costs = {{5}, {1}};
  std::vector<std::vector<i64>> inv = {{1}};

  AggregateLp lp = build_aggregate_lp(dist, fixed, costs, inv, 2.0);
  CHECK(lp.n == 1);
  CHECK(lp.K == 1);
  REQUIRE(lp.blocks.size() == 1);

  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.objective == doctest::Approx(17.0).epsilon(1e-9));
  // the FDC serves exactly the inventory-capped half of the demand
  REQUIRE(sol.x.size() == 1);
  CHECK(sol.x[0][0][0] == doctest::Approx(0.5));
  CHECK(sol.x[0][0][1] == doctest::Approx(0.5));
  CHECK(sol.y[0][0] == doctest::Approx(0.5));
  CHECK(sol.y[0][1] == doctest::Approx(0.5));

  SUBCASE("solution JSON round trip") {
    LpSolution back = lp_solution_from_json(lp_solution_to_json(sol));
    CHECK(back.status == sol.status);
    CHECK(back.objective == sol.objective);
    CHECK(back.x == sol.x);
    CHECK(back.y == sol.y);
  }
}

TEST_CASE("aggregate LP rejects malformed distributions") {
  std::vector<double> fixed = {10, 1};
  std::vector<std::vector<double>> costs = {{5}, {1}};
  std::vector<std::vector<i64>> inv = {{1}};

  OrderTypeDistribution repeats;
  repeats.types = {{0, 0}};
  repeats.probs = {1.0};
  CHECK_THROWS_AS(build_aggregate_lp(repeats, fixed, costs, inv, 2.0),
                  ConfigError);

  OrderTypeDistribution short_probs;
  short_probs.types = {{0}};
  short_probs.probs = {0.9};
  CHECK_THROWS_AS(build_aggregate_lp(short_probs, fixed, costs, inv, 2.0),
                  ConfigError);

  OrderTypeDistribution alien;
  alien.types = {{7}};
  alien.probs = {1.0};
  CHECK_THROWS_AS(build_aggregate_lp(alien, fixed, costs, inv, 2.0),
                  ConfigError);
}

TEST_CASE("LP rounding: sampling, stockout repair, unknown types") {
  AggregateLp lp;
  lp.n = 1;
  lp.K = 1;
  lp.T = 2;
  lp.types = {{0}};
  lp.lambda = {1.0};
  LpSolution sol;
  sol.x = {{{0.0, 1.0}}};  // all mass on the FDC
  sol.y = {{0.0, 1.0}};

  Rng rng(42);
  bool fb = false;

  SUBCASE("stocked FDC takes the unit") {
    std::vector<std::vector<i64>> inv = {{1}};
    Plan p = ipfc_decide({1}, 0, lp, sol, inv, rng, &fb);
    CHECK(p.at(1, 0) == 1);
    CHECK_FALSE(fb);
  }
  SUBCASE("stockout repairs to the RDC and flags it") {
    std::vector<std::vector<i64>> inv = {{0}};
    Plan p = ipfc_decide({1}, 0, lp, sol, inv, rng, &fb);
    CHECK(p.at(0, 0) == 1);
    CHECK(p.at(1, 0) == 0);
    CHECK(fb);
  }
  SUBCASE("unknown order type routes everything to the RDC") {
    std::vector<std::vector<i64>> inv = {{5}};
    Plan p = ipfc_decide({3}, -1, lp, sol, inv, rng, &fb);
    CHECK(p.at(0, 0) == 3);
    CHECK(fb);
  }
  SUBCASE("empty order consumes no randomness") {
    std::vector<std::vector<i64>> inv = {{5}};
    std::uint64_t before = rng.state;
    Plan p = ipfc_decide({0}, -1, lp, sol, inv, rng, &fb);
    CHECK(rng.state == before);
    CHECK(p.at(0, 0) == 0);
    CHECK_FALSE(fb);
  }
}

TEST_CASE("the rounding policy needs invariant costs") {
  Instance inst;
  inst.n = 1;
  inst.K = 1;
  inst.T = 2;
  inst.fixed_costs = {10, 1};
  inst.regime = CostRegime::varying;
  inst.costs = {{{5}, {1}}, {{4}, {1}}};
  inst.inventory = {{1}};
  inst.orders = {{1}, {1}};
  OrderTypeDistribution dist;
  dist.types = {{0}};
  dist.probs = {1.0};
  inst.meta.distribution = dist;

  auto pol = make_ipfc_policy();
  CHECK_THROWS_WITH_AS(pol->begin(header_of(inst), 0),
                       "ipfc: needs time-invariant costs", ConfigError);
}
