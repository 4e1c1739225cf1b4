#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "json.hpp"

#include "fulfill/capi.h"

using nlohmann::json;

namespace {

struct StringOut {
  char* s = nullptr;
  ~StringOut() { ff_string_free(s); }
};

struct InstanceOut {
  ff_instance* p = nullptr;
  ~InstanceOut() { ff_instance_free(p); }
};

}  // namespace

TEST_CASE("error codes match the failure classes") {
  InstanceOut inst;
  CHECK(ff_instance_parse("{nope", &inst.p) == FF_EPARSE);
  CHECK(ff_last_error()[0] != '\0');

  CHECK(ff_instance_generate("no-such-family", "{}", &inst.p) == FF_EINVAL);
  CHECK(ff_instance_from_file("does_not_exist_9876.json", &inst.p) == FF_EIO);

  double v = 0;
  CHECK(ff_bound_value("theorem-42", R"({"f0":50})", &v) == FF_EINVAL);
  // a <= 0 is inside the parser's reach but outside the formula's domain
  CHECK(ff_bound_value("theorem-6", R"({"f0":50,"a":0,"b":30})", &v) ==
        FF_EDOMAIN);
  CHECK(ff_bound_value("theorem-3", "{}", &v) == FF_EDOMAIN);

  REQUIRE(ff_instance_generate("example-1", R"({"M":5})", &inst.p) == FF_OK);
  StringOut res;
  CHECK(ff_run_policy(inst.p, R"({"name":"no-such-policy"})", 0, 0, &res.s) ==
        FF_EINVAL);
  CHECK(ff_run_policy(inst.p, R"({"name":"pure-greedy"})", 0, 3, &res.s) ==
        FF_EINVAL);  // trace_mode out of range
  CHECK(ff_bruteforce_opt(inst.p, R"({"max_states":1})", &res.s) ==
        FF_EOVERFLOW);
}

TEST_CASE("free functions tolerate NULL") {
  ff_string_free(nullptr);
  ff_instance_free(nullptr);
  ff_service_free(nullptr);
}

TEST_CASE("theta helper matches the library formula") {
  double v = 0;
  REQUIRE(ff_theta_default(50, 5, 8, 30, &v) == FF_OK);
  CHECK(v == doctest::Approx(4.510619103767689).epsilon(1e-12));
  CHECK(ff_theta_default(50, 5, 0, 30, &v) == FF_EDOMAIN);
}

TEST_CASE("instance JSON and file round trips through the C boundary") {
  InstanceOut inst;
  REQUIRE(ff_instance_generate("example-1", R"({"M":4})", &inst.p) == FF_OK);

  StringOut js;
  REQUIRE(ff_instance_to_json(inst.p, &js.s) == FF_OK);
  InstanceOut back;
  REQUIRE(ff_instance_parse(js.s, &back.p) == FF_OK);
  StringOut js2;
  REQUIRE(ff_instance_to_json(back.p, &js2.s) == FF_OK);
  CHECK(std::string(js.s) == js2.s);

  const char* path = "capi_roundtrip_test.json";
  REQUIRE(ff_instance_write_file(inst.p, path) == FF_OK);
  InstanceOut from_file;
  REQUIRE(ff_instance_from_file(path, &from_file.p) == FF_OK);
  StringOut js3;
  REQUIRE(ff_instance_to_json(from_file.p, &js3.s) == FF_OK);
  CHECK(std::string(js.s) == js3.s);
  std::remove(path);
}

TEST_CASE("stochastic generation through the C boundary is deterministic") {
  const char* cfg = R"({"n":6,"K":2,"T":40,"order_sizes":[1,2],
                        "type_counts":[3,3],"size_probs":[0.5,0.5]})";
  InstanceOut a, b;
  REQUIRE(ff_instance_stochastic(cfg, 11, &a.p) == FF_OK);
  REQUIRE(ff_instance_stochastic(cfg, 11, &b.p) == FF_OK);
  StringOut ja, jb;
  REQUIRE(ff_instance_to_json(a.p, &ja.s) == FF_OK);
  REQUIRE(ff_instance_to_json(b.p, &jb.s) == FF_OK);
  CHECK(std::string(ja.s) == jb.s);
}

TEST_CASE("full traces and brute-force plans have the documented shapes") {
  InstanceOut inst;
  REQUIRE(ff_instance_generate("example-1", R"({"M":3})", &inst.p) == FF_OK);
  json meta = json::parse([&] {
    StringOut js;
    ff_instance_to_json(inst.p, &js.s);
    return std::string(js.s);
  }());
  const int n = meta["n"], K = meta["K"], T = meta["T"];

  StringOut run;
  REQUIRE(ff_run_policy(inst.p, R"({"name":"pure-greedy"})", 0, 2, &run.s) ==
          FF_OK);
  json rr = json::parse(run.s);
  CHECK(rr["policy_id"] == "pure-greedy");
  REQUIRE(rr.contains("period_costs"));
  REQUIRE(rr.contains("trace"));
  REQUIRE(rr["trace"].size() == size_t(T));
  double total = 0;
  for (const auto& rec : rr["trace"]) {
    CHECK(rec["plan"].size() == size_t(K + 1));
    CHECK(rec["plan"][0].size() == size_t(n));
    CHECK(rec["proposal"].size() == size_t(K + 1));
    CHECK(rec["inventory_after"].size() == size_t(K));
    total += rec["period_cost"].get<double>();
  }
  CHECK(rr["trace"][0]["period"] == 1);
  CHECK(total == doctest::Approx(rr["total_cost"].get<double>()));

  // totals-only mode leaves both optional sections out
  StringOut bare;
  REQUIRE(ff_run_policy(inst.p, R"({"name":"pure-greedy"})", 0, 0, &bare.s) ==
          FF_OK);
  json rb = json::parse(bare.s);
  CHECK_FALSE(rb.contains("period_costs"));
  CHECK_FALSE(rb.contains("trace"));

  StringOut opt;
  REQUIRE(ff_bruteforce_opt(inst.p, R"({"want_plan":true})", &opt.s) == FF_OK);
  json jo = json::parse(opt.s);
  CHECK(jo["method"] == "brute-force");
  REQUIRE(jo.contains("plan"));
  REQUIRE(jo["plan"].size() == size_t(T));
  CHECK(jo["plan"][0].size() == size_t(K + 1));
  CHECK(jo["plan"][0][0].size() == size_t(n));

  StringOut ann;
  REQUIRE(ff_analytic_opt(inst.p, &ann.s) == FF_OK);
  json ja = json::parse(ann.s);
  CHECK(ja["method"] == "analytic-exact");
  CHECK(ja["opt_cost"].get<double>() == jo["opt_cost"].get<double>());
}

TEST_CASE("service handles are in-band about protocol failures") {
  ff_service* svc = nullptr;
  REQUIRE(ff_service_new(&svc) == FF_OK);

  StringOut rsp;
  CHECK(ff_service_handle_line(svc, "{broken", &rsp.s) == FF_OK);
  json j = json::parse(rsp.s);
  CHECK(j["ok"] == false);
  CHECK(j["error"] == "bad_request");

  StringOut rsp2;
  CHECK(ff_service_handle_line(
            svc, R"({"v":1,"op":"state","session":"s1"})", &rsp2.s) == FF_OK);
  CHECK(json::parse(rsp2.s)["error"] == "no_session");

  ff_service_free(svc);
}

TEST_CASE("acceptance suite registry") {
  StringOut ids;
  REQUIRE(ff_acceptance_suites(&ids.s) == FF_OK);
  std::string all(ids.s);
  CHECK(all.find("all") != std::string::npos);
  CHECK(all.find("example-1") != std::string::npos);
  CHECK(all.find("lemma-1") != std::string::npos);
}
