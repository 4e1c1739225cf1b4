#include "doctest.h"

#include <cstdio>
#include <string>

#include "json.hpp"

#include "fulfill/instances.hpp"
#include "fulfill/model.hpp"

using namespace fulfill;
using nlohmann::json;

namespace {

Instance tiny(CostRegime regime) {
  Instance inst;
  inst.n = 2;
  inst.K = 1;
  inst.T = 2;
  inst.fixed_costs = {3, 1};
  inst.regime = regime;
  inst.costs = {{{2, 2}, {1, 1}}, {{2, 2}, {1, 1}}};
  if (regime == CostRegime::varying) inst.costs[1][0][0] = 1.5;
  inst.inventory = {{1, 1}};
  inst.orders = {{1, 0}, {0, 1}};
  inst.cost_bounds = {{1, 2}};
  return inst;
}

StochasticConfig small_cfg() {
  StochasticConfig cfg;
  cfg.n = 6;
  cfg.K = 2;
  cfg.T = 50;
  cfg.order_sizes = {1, 2};
  cfg.type_counts = {3, 3};
  cfg.size_probs = {0.5, 0.5};
  return cfg;
}

}  // namespace

TEST_CASE("instance JSON round trips byte for byte") {
  SUBCASE("invariant instances use the compact cost form") {
    Instance inst = tiny(CostRegime::invariant);
    std::string first = instance_to_json(inst);
    CHECK(first.find("\"replicate\"") != std::string::npos);
    Instance back = instance_from_json(first);
    CHECK(instance_to_json(back) == first);
    CHECK(back.costs == inst.costs);  // expanded to all T periods
    CHECK(back.cost_bounds == inst.cost_bounds);
  }
  SUBCASE("varying instances serialize the whole tensor") {
    Instance inst = tiny(CostRegime::varying);
    std::string first = instance_to_json(inst);
    CHECK(first.find("\"replicate\"") == std::string::npos);
    Instance back = instance_from_json(first);
    CHECK(instance_to_json(back) == first);
    CHECK(back.costs[1][0][0] == 1.5);
  }
}

TEST_CASE("parse errors point at the offending element") {
  json base = json::parse(instance_to_json(tiny(CostRegime::invariant)));

  SUBCASE("missing orders") {
    json j = base;
    j.erase("orders");
    try {
      instance_from_json(j.dump());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pointer == "/orders");
    }
  }
  SUBCASE("compact costs under the varying regime") {
    json j = base;
    j["cost_regime"] = "time-varying";
    try {
      instance_from_json(j.dump());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pointer == "/costs/replicate");
    }
  }
  SUBCASE("inventory under both names") {
    json j = base;
    j["initial_inventory"] = j["inventory"];
    try {
      instance_from_json(j.dump());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pointer == "/initial_inventory");
    }
  }
  SUBCASE("initial_inventory alone is an accepted alias") {
    json j = base;
    j["initial_inventory"] = j["inventory"];
    j.erase("inventory");
    Instance inst = instance_from_json(j.dump());
    CHECK(inst.inventory == tiny(CostRegime::invariant).inventory);
  }
  SUBCASE("negative order quantity") {
    json j = base;
    j["orders"][0][1] = -1;
    try {
      instance_from_json(j.dump());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pointer == "/orders/0/1");
    }
  }
}

TEST_CASE("instance files round trip through disk") {
  Instance inst = tiny(CostRegime::varying);
  std::string path = "instance_roundtrip_test.json";
  write_instance(inst, path);
  Instance back = read_instance(path);
  CHECK(instance_to_json(back) == instance_to_json(inst));
  std::remove(path.c_str());
}

TEST_CASE("stochastic generator is seed-deterministic") {
  StochasticConfig cfg = small_cfg();
  Instance a = gen_stochastic(cfg, 7);
  Instance b = gen_stochastic(cfg, 7);
  CHECK(instance_to_json(a) == instance_to_json(b));

  Instance c = gen_stochastic(cfg, 8);
  CHECK(instance_to_json(a) != instance_to_json(c));
}

TEST_CASE("stochastic instances respect their declared shape") {
  StochasticConfig cfg = small_cfg();
  Instance inst = gen_stochastic(cfg, 3);
  CHECK(inst.n == 6);
  CHECK(inst.K == 2);
  CHECK(inst.T == 50);
  CHECK(inst.regime == CostRegime::varying);
  REQUIRE(inst.cost_bounds.has_value());
  CHECK(inst.cost_bounds->first == 8.0);
  CHECK(inst.cost_bounds->second == 30.0);
  for (const auto& col : inst.costs)
    for (const auto& row : col)
      for (double c : row) {
        CHECK(c >= 8.0);
        CHECK(c <= 30.0);
      }
  REQUIRE(inst.meta.distribution.has_value());
  CHECK(inst.meta.distribution->types.size() == 6);  // 3 + 3 types
  for (const auto& orow : inst.orders)
    for (i64 s : orow) CHECK(s >= 0);

  SUBCASE("invariant draw serializes compactly") {
    cfg.regime = CostRegime::invariant;
    Instance flat = gen_stochastic(cfg, 3);
    CHECK(flat.regime == CostRegime::invariant);
    std::string js = instance_to_json(flat);
    CHECK(js.find("\"replicate\"") != std::string::npos);
  }
}
