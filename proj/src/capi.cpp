#include "fulfill/capi.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "fulfill/accept.hpp"
#include "fulfill/instances.hpp"
#include "fulfill/model.hpp"
#include "fulfill/oracles.hpp"
#include "fulfill/policies.hpp"
#include "fulfill/service.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace fulfill;

struct ff_instance {
  Instance inst;
};
struct ff_service {
  Service svc;
};

namespace {

thread_local std::string t_error;

int fail(int code, const std::string& msg) {
  t_error = msg;
  return code;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

int give(char** out, const std::string& s) {
  char* p = dup_string(s);
  if (!p) return fail(FF_EINTERNAL, "out of memory");
  *out = p;
  return FF_OK;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    return fail(FF_EPARSE, e.what());
  } catch (const ConfigError& e) {
    return fail(FF_EINVAL, e.what());
  } catch (const InfeasiblePlan& e) {
    return fail(FF_EINFEASIBLE, e.what());
  } catch (const std::domain_error& e) {
    return fail(FF_EDOMAIN, e.what());
  } catch (const json::exception& e) {
    return fail(FF_EPARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FF_EINTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FF_EINTERNAL, e.what());
  }
}

json parse_object(const char* text, const char* what) {
  if (!text) return json::object();
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError(std::string(what) + " must be a JSON object");
  return j;
}

json plan_rows(const Plan& p) {
  json rows = json::array();
  for (int k = 0; k <= p.K; ++k) {
    json row = json::array();
    for (int i = 0; i < p.n; ++i) row.push_back(p.at(k, i));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

extern "C" {

const char* ff_last_error(void) { return t_error.c_str(); }

void ff_string_free(char* s) { std::free(s); }

int ff_instance_parse(const char* json_text, ff_instance** out) {
  if (!json_text || !out) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    auto* h = new ff_instance{instance_from_json(json_text)};
    *out = h;
    return FF_OK;
  });
}

int ff_instance_from_file(const char* path, ff_instance** out) {
  if (!path || !out) return fail(FF_EINVAL, "null argument");
  return guarded([&]() -> int {
    try {
      auto* h = new ff_instance{read_instance(path)};
      *out = h;
      return FF_OK;
    } catch (const ParseError&) {
      throw;
    } catch (const std::runtime_error& e) {
      return fail(FF_EIO, e.what());
    }
  });
}

int ff_instance_generate(const char* family, const char* params_json,
                         ff_instance** out) {
  if (!family || !out) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    auto* h = new ff_instance{
        gen_adversarial(family, params_json ? params_json : "{}")};
    *out = h;
    return FF_OK;
  });
}

int ff_instance_stochastic(const char* config_json, uint64_t seed,
                           ff_instance** out) {
  if (!out) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    json j = parse_object(config_json, "stochastic config");
    StochasticConfig cfg;
    for (auto& [key, val] : j.items()) {
      if (key == "n")
        cfg.n = val.get<int>();
      else if (key == "K")
        cfg.K = val.get<int>();
      else if (key == "T")
        cfg.T = val.get<int>();
      else if (key == "f0")
        cfg.f0 = val.get<double>();
      else if (key == "f_fdc")
        cfg.f_fdc = val.get<double>();
      else if (key == "a")
        cfg.a = val.get<double>();
      else if (key == "b")
        cfg.b = val.get<double>();
      else if (key == "order_sizes")
        cfg.order_sizes = val.get<std::vector<int>>();
      else if (key == "type_counts")
        cfg.type_counts = val.get<std::vector<int>>();
      else if (key == "size_probs")
        cfg.size_probs = val.get<std::vector<double>>();
      else if (key == "tau")
        cfg.tau = val.get<double>();
      else if (key == "regime") {
        std::string r = val.get<std::string>();
        if (r == "time-varying")
          cfg.regime = CostRegime::varying;
        else if (r == "time-invariant")
          cfg.regime = CostRegime::invariant;
        else
          throw ConfigError("regime must be time-varying or time-invariant");
      } else {
        throw ConfigError("stochastic config: unknown field '" + key + "'");
      }
    }
    auto* h = new ff_instance{gen_stochastic(cfg, seed)};
    *out = h;
    return FF_OK;
  });
}

int ff_instance_to_json(const ff_instance* inst, char** json_out) {
  if (!inst || !json_out) return fail(FF_EINVAL, "null argument");
  return guarded([&] { return give(json_out, instance_to_json(inst->inst)); });
}

int ff_instance_write_file(const ff_instance* inst, const char* path) {
  if (!inst || !path) return fail(FF_EINVAL, "null argument");
  return guarded([&]() -> int {
    try {
      write_instance(inst->inst, path);
      return FF_OK;
    } catch (const std::runtime_error& e) {
      return fail(FF_EIO, e.what());
    }
  });
}

void ff_instance_free(ff_instance* inst) { delete inst; }

int ff_run_policy(const ff_instance* inst, const char* policy_spec_json,
                  uint64_t seed, int trace_mode, char** result_json) {
  if (!inst || !policy_spec_json || !result_json)
    return fail(FF_EINVAL, "null argument");
  if (trace_mode < 0 || trace_mode > 2)
    return fail(FF_EINVAL, "trace_mode must be 0, 1, or 2");
  return guarded([&] {
    json js = parse_object(policy_spec_json, "policy spec");
    PolicySpec spec;
    for (auto& [key, val] : js.items()) {
      if (key == "name")
        spec.name = val.get<std::string>();
      else if (key == "theta")
        spec.theta = val.get<double>();
      else if (key == "eta")
        spec.eta = val.get<double>();
      else if (key == "greedy_rule")
        spec.greedy_rule = val.get<std::string>();
      else
        throw ConfigError("policy spec: unknown field '" + key + "'");
    }
    if (!js.contains("name")) throw ConfigError("policy spec needs a name");
    TraceMode tm = trace_mode == 2   ? TraceMode::full
                   : trace_mode == 1 ? TraceMode::costs
                                     : TraceMode::none;
    RunResult rr = run_policy(inst->inst, spec, seed, tm);
    json out{{"policy_id", rr.policy_id},
             {"seed", rr.seed},
             {"total_cost", rr.total_cost},
             {"gated_periods", rr.gated_periods},
             {"wall_time", rr.wall_time},
             {"decide_time", rr.decide_time},
             {"decisions", rr.decisions},
             {"rounding_fallbacks", rr.rounding_fallbacks},
             {"fdc_pref", rr.fdc_pref}};
    if (trace_mode >= 1) out["period_costs"] = rr.period_costs;
    if (trace_mode == 2) {
      json tr = json::array();
      for (const PeriodRecord& pr : rr.trace) {
        tr.push_back(json{{"period", pr.period},
                          {"gated", pr.gated},
                          {"period_cost", pr.period_cost},
                          {"plan", plan_rows(pr.plan)},
                          {"proposal", plan_rows(pr.proposal)},
                          {"inventory_after", pr.inventory_after}});
      }
      out["trace"] = std::move(tr);
    }
    return give(result_json, out.dump());
  });
}

int ff_bruteforce_opt(const ff_instance* inst, const char* limits_json,
                      char** result_json) {
  if (!inst || !result_json) return fail(FF_EINVAL, "null argument");
  return guarded([&]() -> int {
    json jl = parse_object(limits_json, "limits");
    BruteForceLimits lim;
    for (auto& [key, val] : jl.items()) {
      if (key == "max_states")
        lim.max_states = val.get<i64>();
      else if (key == "recheck_every")
        lim.recheck_every = val.get<i64>();
      else if (key == "want_plan")
        lim.want_plan = val.get<bool>();
      else
        throw ConfigError("limits: unknown field '" + key + "'");
    }
    OptResult opt = bruteforce_opt(inst->inst, lim);
    if (opt.overflow)
      return fail(FF_EOVERFLOW, "state budget exhausted after " +
                                    std::to_string(opt.states_expanded) +
                                    " states; raise max_states");
    json out{{"opt_cost", opt.opt_cost},
             {"method", to_string(opt.method)},
             {"states_expanded", opt.states_expanded},
             {"elapsed", opt.elapsed}};
    if (opt.plan) {
      json periods = json::array();
      for (const Plan& p : *opt.plan) periods.push_back(plan_rows(p));
      out["plan"] = std::move(periods);
    }
    return give(result_json, out.dump());
  });
}

int ff_analytic_opt(const ff_instance* inst, char** result_json) {
  if (!inst || !result_json) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    OptResult opt = analytic_opt(inst->inst);
    json out{{"opt_cost", opt.opt_cost}, {"method", to_string(opt.method)}};
    return give(result_json, out.dump());
  });
}

int ff_bound_value(const char* bound_id, const char* inputs_json, double* out) {
  if (!bound_id || !out) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    json ji = parse_object(inputs_json, "bound inputs");
    BoundInputs in;
    for (auto& [key, val] : ji.items()) {
      if (key == "f0")
        in.f0 = val.get<double>();
      else if (key == "f1")
        in.f1 = val.get<double>();
      else if (key == "fmin")
        in.fmin = val.get<double>();
      else if (key == "a")
        in.a = val.get<double>();
      else if (key == "b")
        in.b = val.get<double>();
      else if (key == "theta")
        in.theta = val.get<double>();
      else if (key == "w")
        in.w = val.get<double>();
      else if (key == "fdc_fixed_costs")
        in.fdc_fixed_costs = val.get<std::vector<double>>();
      else
        throw ConfigError("bound inputs: unknown field '" + key + "'");
    }
    *out = bound_value(bound_id, in);
    return FF_OK;
  });
}

int ff_theta_default(double f0, double fmin, double a, double b, double* out) {
  if (!out) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    *out = theta_default(f0, fmin, a, b);
    return FF_OK;
  });
}

int ff_service_new(ff_service** out) {
  if (!out) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    *out = new ff_service;
    return FF_OK;
  });
}

int ff_service_handle_line(ff_service* svc, const char* line, char** response) {
  if (!svc || !line || !response) return fail(FF_EINVAL, "null argument");
  return guarded([&] { return give(response, svc->svc.handle_line(line)); });
}

void ff_service_free(ff_service* svc) { delete svc; }

int ff_acceptance_run(const char* suite_id, int print_progress,
                      char** report_json) {
  if (!suite_id || !report_json) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    AcceptanceReport rep =
        run_acceptance(suite_id, print_progress ? &std::cout : nullptr);
    return give(report_json, acceptance_report_json(rep));
  });
}

int ff_acceptance_suites(char** ids_out) {
  if (!ids_out) return fail(FF_EINVAL, "null argument");
  return guarded([&] {
    std::string all;
    for (const std::string& id : acceptance_suite_ids()) {
      all += id;
      all += '\n';
    }
    return give(ids_out, all);
  });
}

}  // extern "C"
