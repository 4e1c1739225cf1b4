#include "fulfill/service.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "fulfill/model.hpp"
#include "fulfill/policies.hpp"
#include "json.hpp"

namespace fulfill {
namespace {

using nlohmann::json;

// Validation failure with a wire error code; caught at the dispatch boundary.
struct Reject {
  std::string code, msg;
};

[[noreturn]] void reject(const std::string& code, const std::string& msg) {
  throw Reject{code, msg};
}

bool is_int(const json& j) { return j.is_number_integer() || j.is_number_unsigned(); }

i64 need_int(const json& j, const char* what, i64 lo) {
  if (!is_int(j)) reject("bad_request", std::string(what) + " must be an integer");
  i64 v = j.get<i64>();
  if (v < lo) reject("bad_request", std::string(what) + " out of range");
  return v;
}

double need_num(const json& j, const char* what) {
  if (!j.is_number()) reject("bad_request", std::string(what) + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) reject("bad_request", std::string(what) + " must be finite");
  return v;
}

struct Sess {
  InstanceHeader h;
  std::unique_ptr<Policy> pol;
  InventoryState inv;
  std::uint64_t seed = 0;
  double cum = 0;
  i64 periods = 0, gated = 0, fallbacks = 0;
  std::string policy_id;
};

InstanceHeader parse_header(const json& jh) {
  if (!jh.is_object()) reject("bad_request", "header must be an object");
  for (auto& [key, val] : jh.items()) {
    (void)val;
    if (key != "n" && key != "K" && key != "T" && key != "fixed_costs" &&
        key != "cost_regime" && key != "cost_bounds" && key != "inventory" &&
        key != "costs" && key != "distribution")
      reject("bad_request", "header: unknown field '" + key + "'");
  }
  InstanceHeader h;
  if (!jh.contains("n") || !jh.contains("K") || !jh.contains("fixed_costs") ||
      !jh.contains("cost_regime") || !jh.contains("inventory"))
    reject("bad_request", "header needs n, K, fixed_costs, cost_regime, inventory");
  h.n = int(need_int(jh["n"], "header.n", 1));
  h.K = int(need_int(jh["K"], "header.K", 1));
  if (h.n > 100000 || h.K > 100000) reject("bad_request", "header dimensions too large");
  h.T = jh.contains("T") ? int(need_int(jh["T"], "header.T", 0)) : 0;

  const json& jf = jh["fixed_costs"];
  if (!jf.is_array() || int(jf.size()) != h.K + 1)
    reject("bad_request", "header.fixed_costs must have K+1 entries");
  for (const auto& v : jf) {
    double f = need_num(v, "header.fixed_costs entry");
    if (f < 0) reject("bad_request", "header.fixed_costs entries must be >= 0");
    h.fixed_costs.push_back(f);
  }

  const json& jr = jh["cost_regime"];
  if (!jr.is_string()) reject("bad_request", "header.cost_regime must be a string");
  std::string reg = jr.get<std::string>();
  if (reg == "time-varying")
    h.regime = CostRegime::varying;
  else if (reg == "time-invariant")
    h.regime = CostRegime::invariant;
  else
    reject("bad_request", "header.cost_regime must be time-varying or time-invariant");

  if (jh.contains("cost_bounds")) {
    const json& jb = jh["cost_bounds"];
    if (!jb.is_array() || jb.size() != 2)
      reject("bad_request", "header.cost_bounds must be [a, b]");
    double a = need_num(jb[0], "header.cost_bounds[0]");
    double b = need_num(jb[1], "header.cost_bounds[1]");
    if (!(0 < a && a <= b)) reject("bad_request", "header.cost_bounds needs 0 < a <= b");
    h.cost_bounds = {a, b};
  }

  const json& ji = jh["inventory"];
  if (!ji.is_array() || int(ji.size()) != h.K)
    reject("bad_request", "header.inventory must have K rows");
  for (const auto& row : ji) {
    if (!row.is_array() || int(row.size()) != h.n)
      reject("bad_request", "header.inventory rows must have n entries");
    std::vector<i64> r;
    for (const auto& v : row) r.push_back(need_int(v, "header.inventory entry", 0));
    h.inventory0.push_back(std::move(r));
  }

  if (jh.contains("costs")) {
    if (h.regime != CostRegime::invariant)
      reject("bad_request", "header.costs is only valid for time-invariant sessions");
    const json& jc = jh["costs"];
    if (!jc.is_array() || int(jc.size()) != h.K + 1)
      reject("bad_request", "header.costs must have K+1 rows");
    for (const auto& row : jc) {
      if (!row.is_array() || int(row.size()) != h.n)
        reject("bad_request", "header.costs rows must have n entries");
      std::vector<double> r;
      for (const auto& v : row) {
        double c = need_num(v, "header.costs entry");
        if (c < 0) reject("bad_request", "header.costs entries must be >= 0");
        r.push_back(c);
      }
      h.invariant_costs.push_back(std::move(r));
    }
  } else if (h.regime == CostRegime::invariant) {
    reject("bad_request", "time-invariant sessions must declare header.costs");
  }

  if (jh.contains("distribution")) {
    const json& jd = jh["distribution"];
    if (!jd.is_object() || !jd.contains("types") || !jd.contains("probs"))
      reject("bad_request", "header.distribution needs types and probs");
    OrderTypeDistribution dist;
    const json& jt = jd["types"];
    const json& jp = jd["probs"];
    if (!jt.is_array() || !jp.is_array() || jt.size() != jp.size() || jt.empty())
      reject("bad_request", "header.distribution types/probs must be parallel arrays");
    for (const auto& ty : jt) {
      if (!ty.is_array()) reject("bad_request", "header.distribution types must be arrays");
      std::vector<int> t;
      for (const auto& v : ty) {
        i64 item = need_int(v, "header.distribution item", 0);
        if (item >= h.n) reject("bad_request", "header.distribution item out of range");
        t.push_back(int(item));
      }
      dist.types.push_back(std::move(t));
    }
    for (const auto& v : jp) {
      double p = need_num(v, "header.distribution prob");
      if (p < 0) reject("bad_request", "header.distribution probs must be >= 0");
      dist.probs.push_back(p);
    }
    h.distribution = std::move(dist);
  }
  return h;
}

PolicySpec parse_policy(const json& jp) {
  if (!jp.is_object()) reject("bad_request", "policy must be an object");
  for (auto& [key, val] : jp.items()) {
    (void)val;
    if (key != "name" && key != "theta" && key != "eta" && key != "greedy_rule")
      reject("bad_request", "policy: unknown field '" + key + "'");
  }
  if (!jp.contains("name") || !jp["name"].is_string())
    reject("bad_request", "policy.name must be a string");
  PolicySpec spec;
  spec.name = jp["name"].get<std::string>();
  if (jp.contains("theta")) spec.theta = need_num(jp["theta"], "policy.theta");
  if (jp.contains("eta")) spec.eta = need_num(jp["eta"], "policy.eta");
  if (jp.contains("greedy_rule")) {
    if (!jp["greedy_rule"].is_string())
      reject("bad_request", "policy.greedy_rule must be a string");
    spec.greedy_rule = jp["greedy_rule"].get<std::string>();
  }
  return spec;
}

}  // namespace

struct Service::Impl {
  mutable std::mutex mu;
  std::map<std::string, Sess> sessions;
  i64 counter = 0;

  json ok() {
    json r;
    r["v"] = 1;
    r["ok"] = true;
    return r;
  }

  Sess& find(const json& req) {
    if (!req.contains("session") || !req["session"].is_string())
      reject("bad_request", "session must be a string");
    auto it = sessions.find(req["session"].get<std::string>());
    if (it == sessions.end()) reject("no_session", "unknown session id");
    return it->second;
  }

  json do_open(const json& req) {
    if (!req.contains("policy") || !req.contains("header"))
      reject("bad_request", "open needs policy and header");
    PolicySpec spec = parse_policy(req["policy"]);
    InstanceHeader h = parse_header(req["header"]);
    std::uint64_t seed = 0;
    if (req.contains("seed")) seed = std::uint64_t(need_int(req["seed"], "seed", 0));

    Sess s;
    s.h = std::move(h);
    s.seed = seed;
    try {
      s.pol = make_policy(spec);
      s.pol->begin(s.h, seed);
    } catch (const ConfigError& e) {
      reject("bad_request", e.what());
    }
    s.policy_id = s.pol->id();
    s.inv.levels = s.h.inventory0;
    s.inv.period = 0;

    std::string id = "s" + std::to_string(++counter);
    sessions.emplace(id, std::move(s));
    json r = ok();
    r["session_id"] = id;
    return r;
  }

  json do_decide(const json& req) {
    Sess& s = find(req);

    if (!req.contains("order") || !req["order"].is_array() ||
        int(req["order"].size()) != s.h.n)
      reject("bad_order", "order must be an array of n quantities");
    std::vector<i64> order;
    for (const auto& v : req["order"]) {
      if (!is_int(v)) reject("bad_order", "order entries must be integers");
      i64 q = v.get<i64>();
      if (q < 0) reject("bad_order", "order entries must be >= 0");
      order.push_back(q);
    }

    std::vector<std::vector<double>> col;
    if (s.h.regime == CostRegime::invariant) {
      if (req.contains("costs")) {
        const json& jc = req["costs"];
        if (!jc.is_array() || int(jc.size()) != s.h.K + 1)
          reject("bad_costs", "costs must have K+1 rows");
        for (int k = 0; k <= s.h.K; ++k) {
          const json& row = jc[k];
          if (!row.is_array() || int(row.size()) != s.h.n)
            reject("bad_costs", "costs rows must have n entries");
          for (int i = 0; i < s.h.n; ++i) {
            if (!row[i].is_number()) reject("bad_costs", "costs entries must be numbers");
            if (row[i].get<double>() != s.h.invariant_costs[k][i])
              reject("bad_costs",
                     "costs differ from the declared time-invariant matrix");
          }
        }
      }
      col = s.h.invariant_costs;
    } else {
      if (!req.contains("costs"))
        reject("bad_costs", "time-varying sessions must send costs every period");
      const json& jc = req["costs"];
      if (!jc.is_array() || int(jc.size()) != s.h.K + 1)
        reject("bad_costs", "costs must have K+1 rows");
      col.assign(size_t(s.h.K) + 1, {});
      for (int k = 0; k <= s.h.K; ++k) {
        const json& row = jc[k];
        if (!row.is_array() || int(row.size()) != s.h.n)
          reject("bad_costs", "costs rows must have n entries");
        for (int i = 0; i < s.h.n; ++i) {
          if (!row[i].is_number()) reject("bad_costs", "costs entries must be numbers");
          double c = row[i].get<double>();
          if (!std::isfinite(c) || c < 0)
            reject("bad_costs", "costs entries must be finite and >= 0");
          if (s.h.cost_bounds) {
            auto [a, b] = *s.h.cost_bounds;
            if (c < a || c > b)
              reject("bad_costs", "costs outside the declared [a, b] bounds");
          }
          col[k].push_back(c);
        }
      }
    }

    // Validation done; from here on the step either completes or the session
    // is genuinely broken (-> internal, surfaced by the dispatch boundary).
    Plan plan;
    StepInfo info;
    s.pol->decide(int(s.periods) + 1, order, col, s.inv, plan, info);
    double pc = period_cost(plan, s.h.fixed_costs, col);
    apply_plan(s.inv, plan, order);
    s.cum += pc;
    s.periods += 1;
    s.gated += info.gated ? 1 : 0;
    s.fallbacks += info.fallback ? 1 : 0;

    json r = ok();
    json jplan = json::array();
    for (int k = 0; k <= plan.K; ++k) {
      json row = json::array();
      for (int i = 0; i < plan.n; ++i) row.push_back(plan.at(k, i));
      jplan.push_back(std::move(row));
    }
    r["plan"] = std::move(jplan);
    r["period_cost"] = pc;
    r["gated"] = info.gated;
    return r;
  }

  json do_state(const json& req) {
    Sess& s = find(req);
    json r = ok();
    r["inventory"] = s.inv.levels;
    r["cumulative_cost"] = s.cum;
    r["periods"] = s.periods;
    return r;
  }

  json do_close(const json& req) {
    Sess& s = find(req);
    json summary;
    summary["policy_id"] = s.policy_id;
    summary["seed"] = s.seed;
    summary["total_cost"] = s.cum;
    summary["gated_periods"] = s.gated;
    summary["decisions"] = s.periods;
    summary["rounding_fallbacks"] = s.fallbacks;
    json r = ok();
    r["summary"] = std::move(summary);
    sessions.erase(req["session"].get<std::string>());
    return r;
  }

  json dispatch(const std::string& line) {
    json req = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (req.is_discarded()) reject("bad_request", "request is not valid JSON");
    if (!req.is_object()) reject("bad_request", "request must be a JSON object");
    if (!req.contains("v") || !is_int(req["v"]) || req["v"].get<i64>() != 1)
      reject("bad_request", "request must carry \"v\": 1");
    if (!req.contains("op") || !req["op"].is_string())
      reject("bad_request", "request must carry an op string");
    std::string op = req["op"].get<std::string>();
    if (op == "open") return do_open(req);
    if (op == "decide") return do_decide(req);
    if (op == "state") return do_state(req);
    if (op == "close") return do_close(req);
    reject("bad_request", "unknown op '" + op + "'");
  }
};

Service::Service() : impl_(new Impl) {}
Service::~Service() = default;

std::string Service::handle_line(const std::string& line) {
  std::lock_guard<std::mutex> lk(impl_->mu);
  json rsp;
  try {
    rsp = impl_->dispatch(line);
  } catch (const Reject& r) {
    rsp["v"] = 1;
    rsp["ok"] = false;
    rsp["error"] = r.code;
    rsp["message"] = r.msg;
  } catch (const std::exception& e) {
    rsp["v"] = 1;
    rsp["ok"] = false;
    rsp["error"] = "internal";
    rsp["message"] = e.what();
  } catch (...) {
    rsp["v"] = 1;
    rsp["ok"] = false;
    rsp["error"] = "internal";
    rsp["message"] = "unknown failure";
  }
  return rsp.dump();
}

int Service::open_sessions() const {
  std::lock_guard<std::mutex> lk(impl_->mu);
  return int(impl_->sessions.size());
}

}  // namespace fulfill
