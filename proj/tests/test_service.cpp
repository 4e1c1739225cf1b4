#include "doctest.h"

#include <string>

#include "json.hpp"

#include "fulfill/instances.hpp"
#include "fulfill/model.hpp"
#include "fulfill/policies.hpp"
#include "fulfill/service.hpp"

using namespace fulfill;
using nlohmann::json;

namespace {

json ask(Service& svc, const json& req) { return json::parse(svc.handle_line(req.dump())); }

json header_json(const Instance& inst) {
  json h;
  h["n"] = inst.n;
  h["K"] = inst.K;
  h["T"] = inst.T;
  h["fixed_costs"] = inst.fixed_costs;
  h["cost_regime"] = to_string(inst.regime);
  h["inventory"] = inst.inventory;
  if (inst.regime == CostRegime::invariant) h["costs"] = inst.costs[0];
  if (inst.cost_bounds)
    h["cost_bounds"] = {inst.cost_bounds->first, inst.cost_bounds->second};
  return h;
}

json open_req(const Instance& inst, const std::string& policy, int seed) {
  json req;
  req["v"] = 1;
  req["op"] = "open";
  req["policy"] = {{"name", policy}};
  req["header"] = header_json(inst);
  req["seed"] = seed;
  return req;
}

// small hand-rolled time-varying session header
json varying_header() {
  json h;
  h["n"] = 1;
  h["K"] = 1;
  h["fixed_costs"] = {10.0, 1.0};
  h["cost_regime"] = "time-varying";
  h["inventory"] = {{3}};
  h["cost_bounds"] = {1.0, 2.0};
  return h;
}

}  // namespace

TEST_CASE("a service session replays exactly like an offline run") {
  Instance inst = gen_adversarial("example-1", R"({"M":3})");
  Service svc;

  json opened = ask(svc, open_req(inst, "cost-comparison-v-priority", 9));
  REQUIRE(opened["ok"] == true);
  CHECK(opened["session_id"] == "s1");  // ids count up from 1 per service
  std::string sid = opened["session_id"];
  CHECK(svc.open_sessions() == 1);

  double streamed = 0;
  for (int t = 0; t < inst.T; ++t) {
    json req = {{"v", 1}, {"op", "decide"}, {"session", sid}, {"order", inst.orders[t]}};
    json rsp = ask(svc, req);
    REQUIRE(rsp["ok"] == true);
    streamed += rsp["period_cost"].get<double>();
    REQUIRE(rsp["plan"].is_array());
    CHECK(rsp["plan"].size() == size_t(inst.K + 1));
  }

  PolicySpec spec;
  spec.name = "cost-comparison-v-priority";
  RunResult offline = run_policy(inst, spec, 9);
  CHECK(streamed == doctest::Approx(offline.total_cost).epsilon(1e-12));

  json st = ask(svc, {{"v", 1}, {"op", "state"}, {"session", sid}});
  CHECK(st["periods"] == inst.T);
  CHECK(st["cumulative_cost"].get<double>() == doctest::Approx(streamed));

  json closed = ask(svc, {{"v", 1}, {"op", "close"}, {"session", sid}});
  REQUIRE(closed["ok"] == true);
  CHECK(closed["summary"]["total_cost"].get<double>() == doctest::Approx(streamed));
  CHECK(closed["summary"]["decisions"] == inst.T);
  CHECK(closed["summary"]["policy_id"] == "cost-comparison-v-priority");
  CHECK(svc.open_sessions() == 0);

  json reclosed = ask(svc, {{"v", 1}, {"op", "close"}, {"session", sid}});
  CHECK(reclosed["ok"] == false);
  CHECK(reclosed["error"] == "no_session");
}

TEST_CASE("all-zero orders cost nothing and never gate") {
  Instance inst = gen_adversarial("example-1", R"({"M":3})");
  Service svc;
  std::string sid = ask(svc, open_req(inst, "order-size-f-priority", 0))["session_id"];

  std::vector<i64> zeros(inst.n, 0);
  json rsp = ask(svc, {{"v", 1}, {"op", "decide"}, {"session", sid}, {"order", zeros}});
  REQUIRE(rsp["ok"] == true);
  CHECK(rsp["period_cost"] == 0.0);
  CHECK(rsp["gated"] == false);
  for (const auto& row : rsp["plan"])
    for (const auto& cell : row) CHECK(cell == 0);
}

TEST_CASE("rejected decides leave the session untouched") {
  Instance inst = gen_adversarial("example-1", R"({"M":3})");
  Service svc;
  std::string sid = ask(svc, open_req(inst, "pure-greedy", 0))["session_id"];

  json before = ask(svc, {{"v", 1}, {"op", "state"}, {"session", sid}});

  json wrong_len = ask(svc, {{"v", 1},
                             {"op", "decide"},
                             {"session", sid},
                             {"order", std::vector<i64>(inst.n + 1, 1)}});
  CHECK(wrong_len["ok"] == false);
  CHECK(wrong_len["error"] == "bad_order");

  std::vector<i64> negative(inst.n, 0);
  negative[0] = -1;
  json neg = ask(svc, {{"v", 1}, {"op", "decide"}, {"session", sid}, {"order", negative}});
  CHECK(neg["ok"] == false);
  CHECK(neg["error"] == "bad_order");

  json after = ask(svc, {{"v", 1}, {"op", "state"}, {"session", sid}});
  CHECK(after == before);
  CHECK(after["periods"] == 0);
}

TEST_CASE("time-varying sessions demand in-bound costs every period") {
  Service svc;
  json req;
  req["v"] = 1;
  req["op"] = "open";
  req["policy"] = {{"name", "order-size-f-priority"}};
  req["header"] = varying_header();
  std::string sid = ask(svc, req)["session_id"];

  json no_costs = ask(svc, {{"v", 1}, {"op", "decide"}, {"session", sid}, {"order", {1}}});
  CHECK(no_costs["ok"] == false);
  CHECK(no_costs["error"] == "bad_costs");
  CHECK(no_costs["message"] == "time-varying sessions must send costs every period");

  json oob = ask(svc, {{"v", 1},
                       {"op", "decide"},
                       {"session", sid},
                       {"order", {1}},
                       {"costs", {{3.0}, {1.0}}}});  // 3 > declared b = 2
  CHECK(oob["ok"] == false);
  CHECK(oob["error"] == "bad_costs");
  CHECK(oob["message"] == "costs outside the declared [a, b] bounds");

  json st = ask(svc, {{"v", 1}, {"op", "state"}, {"session", sid}});
  CHECK(st["periods"] == 0);

  json good = ask(svc, {{"v", 1},
                        {"op", "decide"},
                        {"session", sid},
                        {"order", {1}},
                        {"costs", {{2.0}, {1.0}}}});
  CHECK(good["ok"] == true);
}

TEST_CASE("invariant sessions reject costs that drift from the declaration") {
  Instance inst = gen_adversarial("example-1", R"({"M":3})");
  Service svc;
  std::string sid = ask(svc, open_req(inst, "pure-greedy", 0))["session_id"];

  json drifted = inst.costs[0];
  drifted[0][0] = drifted[0][0].get<double>() + 0.25;
  json rsp = ask(svc, {{"v", 1},
                       {"op", "decide"},
                       {"session", sid},
                       {"order", inst.orders[0]},
                       {"costs", drifted}});
  CHECK(rsp["ok"] == false);
  CHECK(rsp["error"] == "bad_costs");

  // echoing the declared matrix back is allowed
  json echoed = ask(svc, {{"v", 1},
                          {"op", "decide"},
                          {"session", sid},
                          {"order", inst.orders[0]},
                          {"costs", inst.costs[0]}});
  CHECK(echoed["ok"] == true);
}

TEST_CASE("request envelope validation") {
  Service svc;

  json no_v = ask(svc, {{"op", "state"}, {"session", "s1"}});
  CHECK(no_v["error"] == "bad_request");

  json wrong_v = ask(svc, {{"v", 2}, {"op", "state"}, {"session", "s1"}});
  CHECK(wrong_v["error"] == "bad_request");

  json bad_op = ask(svc, {{"v", 1}, {"op", "decode"}});
  CHECK(bad_op["error"] == "bad_request");

  json garbage = json::parse(svc.handle_line("{nope"));
  CHECK(garbage["ok"] == false);
  CHECK(garbage["error"] == "bad_request");

  json ghost = ask(svc, {{"v", 1}, {"op", "state"}, {"session", "s99"}});
  CHECK(ghost["error"] == "no_session");

  Instance inst = gen_adversarial("example-1", R"({"M":3})");
  json req = open_req(inst, "pure-greedy", 0);
  req["policy"]["volume"] = 11;
  json odd_field = ask(svc, req);
  CHECK(odd_field["error"] == "bad_request");
}

TEST_CASE("policy configuration errors surface as bad_request") {
  Service svc;
  json h;
  h["n"] = 1;
  h["K"] = 2;  // the adjusted ranking needs exactly one FDC
  h["fixed_costs"] = {10.0, 1.0, 1.0};
  h["cost_regime"] = "time-varying";
  h["inventory"] = {{1}, {1}};
  json req;
  req["v"] = 1;
  req["op"] = "open";
  req["policy"] = {{"name", "cost-comparison-adjv-priority"}};
  req["header"] = h;
  json rsp = ask(svc, req);
  CHECK(rsp["ok"] == false);
  CHECK(rsp["error"] == "bad_request");
  CHECK(rsp["message"] ==
        "cost-comparison-adjv-priority: adjusted-variable-cost ranking needs "
        "exactly one FDC");
  CHECK(svc.open_sessions() == 0);
}
