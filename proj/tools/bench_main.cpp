// bench: experiment harness for the fulfillment engine.
//
// Talks to the engine exclusively through the C API (fulfill/capi.h); the
// only other dependencies are the vendored CLI11 and JSON headers.
//
//   bench run    --experiment <id> --config <file.json> --out <dir>
//                [--replications N] [--seed S] [--full-scale]
//                [--deterministic-output]
//   bench accept --suite <id> [--report <file.json>]
//   bench gen    --family <id> --params <json> --out <file> [--seed S]
//   bench opt    --instance <file> [--max-states N]
//
// Exit codes: 0 success, 1 acceptance/property failure, 2 configuration
// error.  CSV output is RFC 4180 (CRLF, header row, quoted only when
// needed) with '.' as the decimal separator regardless of locale.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fulfill/capi.h"
#include "json.hpp"

using json = nlohmann::json;
using i64 = long long;

namespace {

// ---------------------------------------------------------------------------
// C API plumbing

struct ApiError {
  int code;
  std::string message;
};

void check(int rc) {
  if (rc != FF_OK) {
    const char* msg = ff_last_error();
    throw ApiError{rc, msg ? msg : "unknown engine error"};
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  ff_string_free(s);
  return out;
}

struct InstancePtr {
  ff_instance* p = nullptr;
  InstancePtr() = default;
  InstancePtr(const InstancePtr&) = delete;
  InstancePtr& operator=(const InstancePtr&) = delete;
  ~InstancePtr() { ff_instance_free(p); }
};

struct ConfigErr : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit code for an engine failure: bad input/config → 2, runtime failure → 1.
int exit_code_for(int ff_code) {
  switch (ff_code) {
    case FF_EINVAL:
    case FF_EPARSE:
    case FF_EIO:
    case FF_EDOMAIN:
      return 2;
    default:
      return 1;
  }
}

// ---------------------------------------------------------------------------
// Tool-side randomness.  Same SplitMix64 the engine documents, reimplemented
// here so the harness never links engine internals; feeds bound-grid samples
// and the property experiment's instance/plan draws.

struct Splitmix {
  std::uint64_t s;
  explicit Splitmix(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double unit() { return double(next() >> 11) * 0x1.0p-53; }
  i64 below(i64 m) { return m > 0 ? i64(next() % std::uint64_t(m)) : 0; }
};

// ---------------------------------------------------------------------------
// CSV

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);  // shortest round-trip
  (void)ec;
  return std::string(buf, end);
}

std::string fmt_number(const json& v) {
  if (v.is_number_integer()) return std::to_string(v.get<i64>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  return fmt_double(v.get<double>());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << "\r\n";
}

// ---------------------------------------------------------------------------
// Rows and aggregates

struct Row {
  json sweep_value;  // kept as JSON so integers print without a decimal point
  std::string policy;
  i64 replication = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or an error description
  bool ok = false;
  double cost = 0, wall_time = 0;
  i64 gated = 0;
};

void write_rows_csv(const std::string& path, const std::string& experiment,
                    const std::string& sweep_param, const std::vector<Row>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigErr("cannot write " + path);
  csv_row(os, {"experiment", "sweep_param", "sweep_value", "policy", "replication",
               "seed", "status", "cost", "wall_time", "gated_period_count"});
  for (const Row& r : rows) {
    csv_row(os, {experiment, sweep_param, fmt_number(r.sweep_value), r.policy,
                 std::to_string(r.replication), std::to_string(r.seed), r.status,
                 r.ok ? fmt_double(r.cost) : "", r.ok ? fmt_double(r.wall_time) : "",
                 r.ok ? std::to_string(r.gated) : ""});
  }
}

// Grouped by (sweep value, policy) in row order; means and standard errors
// recompute exactly from the row file because both are printed with
// shortest-round-trip formatting of the same doubles.
void write_aggregate_csv(const std::string& path, const std::string& experiment,
                         const std::string& sweep_param, const std::vector<Row>& rows) {
  struct Agg {
    json sweep_value;
    std::string policy;
    std::vector<double> cost, wall;
    std::vector<i64> gated;
    i64 failures = 0;
  };
  std::vector<Agg> groups;
  std::map<std::pair<std::string, std::string>, size_t> index;
  for (const Row& r : rows) {
    auto key = std::make_pair(fmt_number(r.sweep_value), r.policy);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, groups.size());
      groups.push_back(Agg{r.sweep_value, r.policy, {}, {}, {}, 0});
      it = index.find(key);
    }
    Agg& g = groups[it->second];
    if (r.ok) {
      g.cost.push_back(r.cost);
      g.wall.push_back(r.wall_time);
      g.gated.push_back(r.gated);
    } else {
      ++g.failures;
    }
  }

  auto mean_se = [](const std::vector<double>& xs) {
    double m = 0, se = 0;
    if (!xs.empty()) {
      for (double x : xs) m += x;
      m /= double(xs.size());
      if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - m) * (x - m);
        se = std::sqrt(ss / double(xs.size() - 1)) / std::sqrt(double(xs.size()));
      }
    }
    return std::make_pair(m, se);
  };

  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigErr("cannot write " + path);
  csv_row(os, {"experiment", "sweep_param", "sweep_value", "policy", "replications",
               "failures", "mean_cost", "se_cost", "mean_wall_time", "se_wall_time",
               "mean_gated_period_count", "se_gated_period_count"});
  for (const Agg& g : groups) {
    std::vector<double> gated_d(g.gated.begin(), g.gated.end());
    auto [mc, sc] = mean_se(g.cost);
    auto [mw, sw] = mean_se(g.wall);
    auto [mg, sg] = mean_se(gated_d);
    csv_row(os, {experiment, sweep_param, fmt_number(g.sweep_value), g.policy,
                 std::to_string(g.cost.size()), std::to_string(g.failures),
                 fmt_double(mc), fmt_double(sc), fmt_double(mw), fmt_double(sw),
                 fmt_double(mg), fmt_double(sg)});
  }
}

// ---------------------------------------------------------------------------
// Work pool: fixed-size task range, work stealing via an atomic cursor.
// Tasks write into preallocated slots, so output order never depends on
// scheduling.

void parallel_for(i64 count, const std::function<void(i64)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  i64 workers = std::min<i64>(count, hw ? hw : 2);
  if (workers <= 1) {
    for (i64 i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<i64> cursor{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(size_t(workers));
  for (i64 w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        i64 i = cursor.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Experiment resolution

const std::vector<std::string> kExperiments = {
    "horizon-sweep-varying",   "fdc-sweep-varying",   "single-fdc-varying",
    "horizon-sweep-invariant", "fdc-sweep-invariant", "single-fdc-invariant",
    "stress",                  "bounds-grid",         "lemma1-property",
    "custom"};

struct PolicyChoice {
  json spec;          // forwarded verbatim to ff_run_policy
  std::string label;  // CSV column value
};

struct Resolved {
  std::string experiment;
  std::string sweep_param;     // "T", "K", "f0", "grid", "instance", ...
  std::vector<json> values;    // numeric sweep values (never empty)
  bool stochastic = true;      // generator kind
  json stoch_config;           // base config; sweep_param merged per value
  std::string family;          // when !stochastic
  json family_params;          // base params; sweep_param merged per value
  std::vector<PolicyChoice> policies;
  i64 replications = 100;
  std::uint64_t base_seed = 1;
  i64 samples = 10000;     // bounds-grid
  i64 instances = 1000;    // lemma1-property
  i64 plans = 100;         // lemma1-property: random comparison plans/instance
};

std::vector<PolicyChoice> normalize_policies(const json& arr) {
  if (!arr.is_array() || arr.empty())
    throw ConfigErr("policies must be a non-empty array");
  std::vector<PolicyChoice> out;
  std::set<std::string> seen;
  for (const json& p : arr) {
    json spec;
    if (p.is_string())
      spec = json{{"name", p.get<std::string>()}};
    else if (p.is_object() && p.contains("name"))
      spec = p;
    else
      throw ConfigErr("each policy must be a name or an object with a name");
    std::string label = spec["name"].get<std::string>();
    if (spec.contains("greedy_rule"))
      label += ":" + spec["greedy_rule"].get<std::string>();
    while (!seen.insert(label).second) label += "#";  // disambiguate repeats
    out.push_back({spec, label});
  }
  return out;
}

std::vector<json> int_values(int lo, int hi, int step) {
  std::vector<json> v;
  for (int x = lo; x <= hi; x += step) v.push_back(x);
  return v;
}

void require_increasing(const std::vector<json>& values) {
  if (values.empty()) throw ConfigErr("sweep values must be non-empty");
  for (size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_number())
      throw ConfigErr("sweep values must be numeric");
    if (i && !(values[i - 1].get<double>() < values[i].get<double>()))
      throw ConfigErr("sweep values must be strictly increasing");
  }
}

void reject_unknown_keys(const json& cfg, const std::set<std::string>& allowed,
                         const std::string& what) {
  for (auto& [key, val] : cfg.items()) {
    (void)val;
    if (!allowed.count(key))
      throw ConfigErr(what + ": unknown key '" + key + "'");
  }
}

Resolved resolve_experiment(const std::string& id, const json& cfg,
                            i64 cli_reps, std::optional<std::uint64_t> cli_seed,
                            bool full_scale) {
  if (std::find(kExperiments.begin(), kExperiments.end(), id) == kExperiments.end())
    throw ConfigErr("unknown experiment '" + id + "'");
  Resolved r;
  r.experiment = id;

  const bool invariant = id.find("invariant") != std::string::npos;
  const std::string regime = invariant ? "time-invariant" : "time-varying";
  auto horizon_values = [&] {
    return full_scale ? int_values(200, 2000, 200) : int_values(100, 500, 100);
  };

  if (id == "horizon-sweep-varying" || id == "horizon-sweep-invariant") {
    r.sweep_param = "T";
    r.values = horizon_values();
    r.stoch_config = json{{"n", 50}, {"K", full_scale ? 10 : 5}, {"regime", regime}};
  } else if (id == "fdc-sweep-varying" || id == "fdc-sweep-invariant") {
    r.sweep_param = "K";
    r.values = full_scale ? int_values(3, 15, 2) : int_values(3, 7, 2);
    r.stoch_config = json{{"n", 50}, {"T", full_scale ? 2000 : 500}, {"regime", regime}};
  } else if (id == "single-fdc-varying" || id == "single-fdc-invariant") {
    r.sweep_param = "T";
    r.values = horizon_values();
    r.stoch_config = json{{"n", 50}, {"K", 1}, {"regime", regime}};
  } else if (id == "stress") {
    r.stochastic = false;
    r.family = "stress";
    r.sweep_param = "f0";
    r.values = int_values(50, 500, 50);
    r.family_params = json::object();
    r.replications = 1;
  } else if (id == "bounds-grid") {
    r.sweep_param = "grid";
    r.values = {json(0)};
  } else if (id == "lemma1-property") {
    r.sweep_param = "instance";
    r.values = {json(0)};  // placeholder; rows carry the instance index
  }

  if (id == "horizon-sweep-varying" || id == "fdc-sweep-varying") {
    r.policies = normalize_policies(json::array(
        {"order-size-f-priority", "pure-greedy", "all-rdc", "myopic"}));
  } else if (id == "horizon-sweep-invariant" || id == "fdc-sweep-invariant") {
    r.policies = normalize_policies(
        json::array({"cost-comparison-v-priority", "order-size-f-priority",
                     "ipfc", "myopic", "all-rdc"}));
  } else if (id == "single-fdc-varying") {
    r.policies = normalize_policies(
        json::array({"order-size-adjv-priority", "cost-comparison-adjv-priority",
                     "order-size-f-priority", "myopic", "all-rdc"}));
  } else if (id == "single-fdc-invariant") {
    r.policies = normalize_policies(
        json::array({"cost-comparison-adjv-priority", "order-size-adjv-priority",
                     "randomized-cc-v-priority", "better-of-two",
                     "cost-comparison-v-priority", "ipfc", "myopic", "all-rdc"}));
  } else if (id == "stress") {
    r.policies =
        normalize_policies(json::array({"myopic", "order-size-f-priority"}));
  }

  // config file overrides
  if (id == "custom") {
    reject_unknown_keys(cfg, {"generator", "sweep", "policies", "replications",
                              "base_seed"},
                        "custom config");
    if (!cfg.contains("generator") || !cfg.contains("sweep") ||
        !cfg.contains("policies"))
      throw ConfigErr("custom config needs generator, sweep, and policies");
    const json& gen = cfg["generator"];
    reject_unknown_keys(gen, {"kind", "config", "family", "params"}, "generator");
    std::string kind = gen.value("kind", "");
    if (kind == "stochastic") {
      r.stochastic = true;
      r.stoch_config = gen.value("config", json::object());
    } else if (kind == "family") {
      r.stochastic = false;
      r.family = gen.value("family", "");
      if (r.family.empty()) throw ConfigErr("generator.family must be set");
      r.family_params = gen.value("params", json::object());
    } else {
      throw ConfigErr("generator.kind must be 'stochastic' or 'family'");
    }
    const json& sweep = cfg["sweep"];
    reject_unknown_keys(sweep, {"param", "values"}, "sweep");
    r.sweep_param = sweep.value("param", "");
    if (r.sweep_param.empty()) throw ConfigErr("sweep.param must be set");
    if (r.stochastic) {
      static const std::set<std::string> ok = {"n", "K", "T", "f0",
                                               "f_fdc", "a", "b", "tau"};
      if (!ok.count(r.sweep_param))
        throw ConfigErr("sweep.param '" + r.sweep_param +
                        "' is not a numeric stochastic-config field");
    }
    const json vals = sweep.value("values", json::array());
    r.values.assign(vals.begin(), vals.end());
    r.policies = normalize_policies(cfg["policies"]);
  } else if (id == "bounds-grid") {
    reject_unknown_keys(cfg, {"samples", "base_seed"}, id + " config");
    if (cfg.contains("samples")) r.samples = cfg["samples"].get<i64>();
    if (r.samples <= 0) throw ConfigErr("samples must be positive");
  } else if (id == "lemma1-property") {
    reject_unknown_keys(cfg, {"instances", "plans", "base_seed"}, id + " config");
    if (cfg.contains("instances")) r.instances = cfg["instances"].get<i64>();
    if (cfg.contains("plans")) r.plans = cfg["plans"].get<i64>();
    if (r.instances <= 0 || r.plans < 0)
      throw ConfigErr("instances must be positive and plans non-negative");
  } else {
    reject_unknown_keys(
        cfg, {"replications", "base_seed", "values", "policies", "stochastic"},
        id + " config");
    if (cfg.contains("values"))
      r.values.assign(cfg["values"].begin(), cfg["values"].end());
    if (cfg.contains("policies")) r.policies = normalize_policies(cfg["policies"]);
    if (cfg.contains("stochastic")) {
      if (!r.stochastic)
        throw ConfigErr("'stochastic' overrides do not apply to " + id);
      for (auto& [key, val] : cfg["stochastic"].items()) r.stoch_config[key] = val;
    }
  }
  if (cfg.contains("replications")) r.replications = cfg["replications"].get<i64>();
  if (cfg.contains("base_seed")) r.base_seed = cfg["base_seed"].get<std::uint64_t>();
  if (cli_reps > 0) r.replications = cli_reps;
  if (cli_seed) r.base_seed = *cli_seed;
  if (r.replications <= 0) throw ConfigErr("replications must be positive");

  if (id != "bounds-grid" && id != "lemma1-property") require_increasing(r.values);

  // Desk-scale guard: myopic enumerates DC subsets per order, so the default
  // scale caps T and K unless the caller opts into the full-size sweeps.
  bool has_myopic = false;
  for (const auto& p : r.policies)
    if (p.spec["name"] == "myopic") has_myopic = true;
  if (has_myopic && !full_scale && r.stochastic &&
      id != "bounds-grid" && id != "lemma1-property") {
    auto effective = [&](const std::string& field, double sweep_max) {
      if (r.sweep_param == field) return sweep_max;
      if (r.stoch_config.contains(field)) return r.stoch_config[field].get<double>();
      return -1.0;  // unknown: falls back to the generator default (full scale)
    };
    double vmax = r.values.back().get<double>();
    double effT = effective("T", vmax), effK = effective("K", vmax);
    if (effT < 0 || effK < 0)
      throw ConfigErr("myopic runs need explicit T and K at desk scale; "
                      "set them in the config or pass --full-scale");
    if (effT > 500 || effK > 7)
      throw ConfigErr("myopic at T > 500 or K > 7 needs --full-scale");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sweep experiments (stochastic and family generators)

std::vector<Row> run_sweep(const Resolved& r, bool det) {
  const i64 S = i64(r.values.size()), P = i64(r.policies.size());
  const i64 tasks = S * r.replications;
  std::vector<Row> rows(size_t(tasks * P));

  parallel_for(tasks, [&](i64 task) {
    const i64 si = task / r.replications, rep = task % r.replications;
    const json& value = r.values[size_t(si)];
    const std::uint64_t seed = r.base_seed + std::uint64_t(rep);

    InstancePtr inst;
    std::string gen_error;
    {
      int rc;
      if (r.stochastic) {
        json cfg = r.stoch_config;
        cfg[r.sweep_param] = value;
        rc = ff_instance_stochastic(cfg.dump().c_str(), seed, &inst.p);
      } else {
        json params = r.family_params;
        params[r.sweep_param] = value;
        rc = ff_instance_generate(r.family.c_str(), params.dump().c_str(), &inst.p);
      }
      if (rc != FF_OK) gen_error = ff_last_error() ? ff_last_error() : "generator failed";
    }

    for (i64 pi = 0; pi < P; ++pi) {
      Row& row = rows[size_t(task * P + pi)];
      row.sweep_value = value;
      row.policy = r.policies[size_t(pi)].label;
      row.replication = rep;
      row.seed = seed;
      if (!gen_error.empty()) {
        row.status = "error: " + gen_error;
        continue;
      }
      char* res = nullptr;
      int rc = ff_run_policy(inst.p, r.policies[size_t(pi)].spec.dump().c_str(),
                             seed, 0, &res);
      if (rc != FF_OK) {
        row.status = std::string("error: ") +
                     (ff_last_error() ? ff_last_error() : "run failed");
        continue;
      }
      json out = json::parse(take(res));
      row.ok = true;
      row.cost = out["total_cost"].get<double>();
      row.wall_time = det ? 0.0 : out["wall_time"].get<double>();
      row.gated = out["gated_periods"].get<i64>();
    }
  });
  return rows;
}

// ---------------------------------------------------------------------------
// bounds-grid: samples the two closed-form bound-ratio grids.  The row's
// "cost" column carries the ratio; rows group under a single sweep value so
// the aggregate file reports one mean/se line per ratio.

std::vector<Row> run_bounds_grid(const Resolved& r) {
  std::vector<Row> rows(size_t(r.samples) * 2);
  parallel_for(r.samples, [&](i64 idx) {
    Splitmix rng(r.base_seed + std::uint64_t(idx));
    const double a = 0.1 + 9.9 * rng.unit();
    const double b = a * (1.0 + 19.0 * rng.unit());
    const double fmin = 0.1 + 19.9 * rng.unit();
    const double f0 = 1000.0 * rng.unit();

    auto bound = [](const char* id, const json& in) {
      double v = 0;
      check(ff_bound_value(id, in.dump().c_str(), &v));
      return v;
    };
    for (int which = 0; which < 2; ++which) {
      Row& row = rows[size_t(idx * 2 + which)];
      row.sweep_value = json(0);
      row.policy = which == 0 ? "prop-1" : "prop-2";
      row.replication = idx;
      row.seed = r.base_seed + std::uint64_t(idx);
      try {
        json in{{"f0", f0}, {"fmin", fmin}, {"a", a}, {"b", b}};
        double ratio;
        if (which == 0) {
          ratio = bound("theorem-1", in) / bound("theorem-2", in);
        } else {
          json in2{{"f0", f0}, {"f1", fmin}, {"a", a}, {"b", b}};
          ratio = bound("corollary-1-closed", in2) / bound("theorem-7", in2);
        }
        row.ok = true;
        row.cost = ratio;
      } catch (const ApiError& e) {
        row.status = "error: " + e.message;
      }
    }
  });
  return rows;
}

// ---------------------------------------------------------------------------
// lemma1-property: prefix-dominance of the greedy proposal over arbitrary
// feasible plans, replayed across random tiny instances.  Each row is one
// (instance, policy) check; "cost" carries the violation count (zero when
// the property holds).

struct TinyInstance {
  json doc;
  int n = 0, K = 0, T = 0;
  bool invariant = false;
  std::vector<std::vector<i64>> inventory;  // K x n
  std::vector<std::vector<i64>> orders;     // T x n
};

TinyInstance make_tiny(Splitmix& rng) {
  TinyInstance ti;
  ti.n = int(1 + rng.below(3));
  ti.K = int(1 + rng.below(3));
  while (ti.K * ti.n > 6) --ti.K;
  ti.T = int(1 + rng.below(5));
  ti.invariant = rng.next() & 1;
  const double a = 0.5 + rng.unit() * 2.5;
  const double b = a * (1.0 + rng.unit() * 4.0);

  std::vector<double> fixed(size_t(ti.K) + 1);
  fixed[0] = 0.5 + rng.unit() * 59.5;
  for (int k = 1; k <= ti.K; ++k) fixed[size_t(k)] = 0.5 + rng.unit() * 9.5;

  ti.inventory.assign(size_t(ti.K), std::vector<i64>(size_t(ti.n)));
  for (auto& rowv : ti.inventory)
    for (i64& x : rowv) x = rng.below(4);
  ti.orders.assign(size_t(ti.T), std::vector<i64>(size_t(ti.n)));
  bool any = false;
  for (auto& rowv : ti.orders)
    for (i64& x : rowv) {
      x = rng.below(4);
      any = any || x > 0;
    }
  if (!any) ti.orders[0][0] = 1 + rng.below(3);

  auto cost_col = [&] {
    std::vector<std::vector<double>> col(size_t(ti.K) + 1,
                                         std::vector<double>(size_t(ti.n)));
    for (auto& rowv : col)
      for (double& c : rowv) c = a + rng.unit() * (b - a);
    return col;
  };
  json costs;
  if (ti.invariant) {
    costs = json{{"replicate", true}, {"values", cost_col()}};
  } else {
    costs = json::array();
    for (int t = 0; t < ti.T; ++t) costs.push_back(cost_col());
  }
  ti.doc = json{{"meta", json{{"cost_bounds", {a, b}}}},
                {"n", ti.n},
                {"K", ti.K},
                {"T", ti.T},
                {"fixed_costs", fixed},
                {"cost_regime", ti.invariant ? "time-invariant" : "time-varying"},
                {"inventory", ti.inventory},
                {"orders", ti.orders},
                {"costs", costs}};
  return ti;
}

using PlanTensor = std::vector<std::vector<std::vector<i64>>>;  // T x (K+1) x n

PlanTensor random_plan(Splitmix& rng, const TinyInstance& ti) {
  PlanTensor plan(size_t(ti.T),
                  std::vector<std::vector<i64>>(size_t(ti.K) + 1,
                                                std::vector<i64>(size_t(ti.n), 0)));
  auto stock = ti.inventory;
  std::vector<int> ks(size_t(ti.K));
  for (int k = 0; k < ti.K; ++k) ks[size_t(k)] = k + 1;
  for (int t = 0; t < ti.T; ++t)
    for (int i = 0; i < ti.n; ++i) {
      i64 rem = ti.orders[size_t(t)][size_t(i)];
      for (size_t j = ks.size(); j > 1; --j)  // Fisher–Yates
        std::swap(ks[j - 1], ks[size_t(rng.below(i64(j)))]);
      for (int k : ks) {
        if (rem == 0) break;
        i64 cap = std::min(rem, stock[size_t(k) - 1][size_t(i)]);
        i64 take = rng.below(cap + 1);
        plan[size_t(t)][size_t(k)][size_t(i)] = take;
        stock[size_t(k) - 1][size_t(i)] -= take;
        rem -= take;
      }
      plan[size_t(t)][0][size_t(i)] = rem;
    }
  return plan;
}

// Policies whose proposal the dominance property covers.  The FDC-targeting
// order-size gate ships more than its proposal, which puts it outside the
// property's hypothesis, so it is deliberately absent.
std::vector<PolicyChoice> lemma1_policies(bool invariant, int K) {
  json arr = json::array();
  arr.push_back("order-size-f-priority");
  arr.push_back("pure-greedy");
  arr.push_back("all-rdc");
  if (invariant) {
    arr.push_back("cost-comparison-v-priority");
    arr.push_back(json{{"name", "pure-greedy"}, {"greedy_rule", "v-priority"}});
    if (K == 1) arr.push_back("randomized-cc-v-priority");
  }
  if (K == 1) arr.push_back("cost-comparison-adjv-priority");
  return normalize_policies(arr);
}

// Returns the number of prefix-dominance violations for one policy run.
i64 dominance_violations(const TinyInstance& ti, const json& run,
                         const std::vector<PlanTensor>& others) {
  const json& trace = run["trace"];
  const json& pref = run["fdc_pref"];
  i64 bad = 0;

  if (!pref.empty()) {
    // Static ranking: compare prefix sums of the recorded greedy proposal.
    for (int i = 0; i < ti.n; ++i) {
      const auto rank = pref[size_t(i)].get<std::vector<int>>();
      if (rank.empty()) continue;
      std::vector<char> active(size_t(ti.T), 0);
      for (int t = 0; t < ti.T; ++t)
        for (int k = 1; k <= ti.K; ++k)
          if (trace[size_t(t)]["plan"][size_t(k)][size_t(i)].get<i64>() > 0)
            active[size_t(t)] = 1;
      for (const PlanTensor& other : others)
        for (int full = 0; full < 2; ++full)
          for (size_t j = 1; j <= rank.size(); ++j) {
            i64 lhs = 0, rhs = 0;
            for (int t = 0; t < ti.T; ++t) {
              if (!full && !active[size_t(t)]) continue;
              for (size_t l = 0; l < j; ++l) {
                lhs += trace[size_t(t)]["proposal"][size_t(rank[l])][size_t(i)]
                           .get<i64>();
                rhs += other[size_t(t)][size_t(rank[l])][size_t(i)];
              }
            }
            if (lhs < rhs) ++bad;
          }
    }
    return bad;
  }

  // Time-dependent ranking (single FDC): the dominated quantity is the
  // stock-greedy amount min(order, remaining FDC stock) along the policy's
  // own trajectory, and the policy must ship either that or nothing.
  if (ti.K != 1) return 0;
  for (int i = 0; i < ti.n; ++i) {
    std::vector<i64> sg(size_t(ti.T), 0);
    std::vector<char> used(size_t(ti.T), 0);
    for (int t = 0; t < ti.T; ++t) {
      i64 stock = t == 0 ? ti.inventory[0][size_t(i)]
                         : trace[size_t(t) - 1]["inventory_after"][0][size_t(i)]
                               .get<i64>();
      sg[size_t(t)] = std::min(ti.orders[size_t(t)][size_t(i)], stock);
      i64 shipped = trace[size_t(t)]["plan"][1][size_t(i)].get<i64>();
      if (shipped != 0 && shipped != sg[size_t(t)]) ++bad;  // hypothesis broken
      used[size_t(t)] = shipped > 0;
    }
    for (const PlanTensor& other : others)
      for (int full = 0; full < 2; ++full) {
        i64 lhs = 0, rhs = 0;
        for (int t = 0; t < ti.T; ++t) {
          if (!full && !used[size_t(t)]) continue;
          lhs += sg[size_t(t)];
          rhs += other[size_t(t)][1][size_t(i)];
        }
        if (lhs < rhs) ++bad;
      }
  }
  return bad;
}

std::vector<Row> run_lemma1(const Resolved& r, bool det) {
  std::vector<std::vector<Row>> per_instance(size_t(r.instances));
  parallel_for(r.instances, [&](i64 idx) {
    const std::uint64_t seed = r.base_seed + std::uint64_t(idx);
    Splitmix rng(seed);
    TinyInstance ti = make_tiny(rng);

    InstancePtr inst;
    check(ff_instance_parse(ti.doc.dump().c_str(), &inst.p));

    std::vector<PlanTensor> others;
    others.reserve(size_t(r.plans) + 1);
    for (i64 p = 0; p < r.plans; ++p) others.push_back(random_plan(rng, ti));
    {
      char* res = nullptr;
      check(ff_bruteforce_opt(inst.p, "{\"want_plan\":true}", &res));
      json opt = json::parse(take(res));
      PlanTensor best(size_t(ti.T));
      for (int t = 0; t < ti.T; ++t)
        best[size_t(t)] = opt["plan"][size_t(t)]
                              .get<std::vector<std::vector<i64>>>();
      others.push_back(std::move(best));
    }

    for (const PolicyChoice& pc : lemma1_policies(ti.invariant, ti.K)) {
      Row row;
      row.sweep_value = json(idx);
      row.policy = pc.label;
      row.replication = idx;
      row.seed = seed;
      char* res = nullptr;
      int rc = ff_run_policy(inst.p, pc.spec.dump().c_str(), seed, 2, &res);
      if (rc != FF_OK) {
        row.status = std::string("error: ") +
                     (ff_last_error() ? ff_last_error() : "run failed");
      } else {
        json run = json::parse(take(res));
        i64 bad = dominance_violations(ti, run, others);
        row.ok = true;
        row.cost = double(bad);
        row.wall_time = det ? 0.0 : run["wall_time"].get<double>();
        row.gated = run["gated_periods"].get<i64>();
        if (bad > 0) {
          row.ok = false;
          row.status = "violation";
        }
      }
      per_instance[size_t(idx)].push_back(std::move(row));
    }
  });
  std::vector<Row> rows;
  for (auto& chunk : per_instance)
    for (auto& row : chunk) rows.push_back(std::move(row));
  return rows;
}

// ---------------------------------------------------------------------------
// Subcommands

struct RunOptions {
  std::string experiment, config_path, out_dir;
  i64 replications = 0;  // 0 = keep config/default
  std::optional<std::uint64_t> seed;
  bool full_scale = false;
  bool deterministic = false;
};

int cmd_run(const RunOptions& opt) {
  std::ifstream is(opt.config_path);
  if (!is) throw ConfigErr("cannot read config file " + opt.config_path);
  json cfg = json::parse(is, nullptr, false);
  if (cfg.is_discarded() || !cfg.is_object())
    throw ConfigErr("config file must hold a JSON object");

  Resolved r = resolve_experiment(opt.experiment, cfg, opt.replications,
                                  opt.seed, opt.full_scale);

  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) throw ConfigErr("cannot create output directory " + opt.out_dir);

  std::vector<Row> rows;
  if (r.experiment == "bounds-grid")
    rows = run_bounds_grid(r);
  else if (r.experiment == "lemma1-property")
    rows = run_lemma1(r, opt.deterministic);
  else
    rows = run_sweep(r, opt.deterministic);

  const auto out = std::filesystem::path(opt.out_dir);
  write_rows_csv((out / "rows.csv").string(), r.experiment, r.sweep_param, rows);
  write_aggregate_csv((out / "aggregate.csv").string(), r.experiment,
                      r.sweep_param, rows);

  json manifest{{"experiment", r.experiment},
                {"sweep_param", r.sweep_param},
                {"base_seed", r.base_seed},
                {"deterministic_output", opt.deterministic},
                {"files", {"rows.csv", "aggregate.csv"}}};
  if (r.experiment == "bounds-grid") {
    manifest["samples"] = r.samples;
  } else if (r.experiment == "lemma1-property") {
    manifest["instances"] = r.instances;
    manifest["plans"] = r.plans;
  } else {
    manifest["sweep_values"] = r.values;
    manifest["replications"] = r.replications;
    json pols = json::array();
    for (const auto& p : r.policies) pols.push_back(p.spec);
    manifest["policies"] = pols;
    if (r.stochastic)
      manifest["stochastic"] = r.stoch_config;
    else
      manifest["family"] = json{{"id", r.family}, {"params", r.family_params}};
  }
  std::ofstream ms((out / "manifest.json").string(), std::ios::binary);
  ms << manifest.dump(2) << "\n";

  i64 failures = 0, violations = 0;
  for (const Row& row : rows) {
    if (!row.ok) ++failures;
    if (row.status == "violation") ++violations;
  }
  std::cout << opt.experiment << ": " << rows.size() << " rows -> "
            << opt.out_dir << " (" << failures << " failed)\n";
  // A failed property check is a real failure even though the runs completed.
  return violations > 0 ? 1 : 0;
}

int cmd_accept(const std::string& suite, const std::string& report_path) {
  char* rep = nullptr;
  int rc = ff_acceptance_run(suite.c_str(), /*print_progress=*/1, &rep);
  check(rc);
  json report = json::parse(take(rep));
  if (!report_path.empty()) {
    std::ofstream os(report_path, std::ios::binary);
    if (!os) throw ConfigErr("cannot write " + report_path);
    os << report.dump(2) << "\n";
  }
  int passed = 0, total = 0;
  for (const json& cr : report["results"]) {
    ++total;
    if (cr["pass"].get<bool>()) ++passed;
  }
  const bool pass = report["pass"].get<bool>();
  std::cout << "suite " << suite << ": " << (pass ? "PASS" : "FAIL") << " ("
            << passed << "/" << total << " criteria)\n";
  return pass ? 0 : 1;
}

int cmd_gen(const std::string& family, const std::string& params,
            const std::string& out_path, std::uint64_t seed) {
  InstancePtr inst;
  if (family == "stochastic")
    check(ff_instance_stochastic(params.c_str(), seed, &inst.p));
  else
    check(ff_instance_generate(family.c_str(), params.c_str(), &inst.p));
  check(ff_instance_write_file(inst.p, out_path.c_str()));

  char* js = nullptr;
  check(ff_instance_to_json(inst.p, &js));
  json doc = json::parse(take(js));
  std::cout << "wrote " << out_path << " (n=" << doc["n"] << ", K=" << doc["K"]
            << ", T=" << doc["T"] << ")\n";
  return 0;
}

int cmd_opt(const std::string& instance_path, i64 max_states) {
  InstancePtr inst;
  check(ff_instance_from_file(instance_path.c_str(), &inst.p));
  json limits = json::object();
  if (max_states > 0) limits["max_states"] = max_states;
  char* res = nullptr;
  check(ff_bruteforce_opt(inst.p, limits.dump().c_str(), &res));
  std::cout << take(res) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fulfillment engine benchmark harness"};
  app.require_subcommand(1);

  RunOptions run_opt;
  std::uint64_t seed_arg = 0;
  auto* run = app.add_subcommand("run", "run an experiment and emit CSV");
  run->add_option("--experiment", run_opt.experiment, "experiment id")
      ->required()
      ->check(CLI::IsMember(kExperiments));
  run->add_option("--config", run_opt.config_path,
                  "experiment config JSON ({} for defaults)")
      ->required();
  run->add_option("--out", run_opt.out_dir, "output directory")->required();
  run->add_option("--replications", run_opt.replications,
                  "replications per sweep point (overrides config)");
  run->add_option("--seed", seed_arg, "base seed (replication r uses seed+r)");
  run->add_flag("--full-scale", run_opt.full_scale,
                "lift the desk-scale T/K caps and use full-size sweeps");
  run->add_flag("--deterministic-output", run_opt.deterministic,
                "zero the timing columns so reruns are byte-identical");

  std::string suite = "all", report_path;
  auto* accept = app.add_subcommand("accept", "run an acceptance suite");
  accept->add_option("--suite", suite, "suite id (default: all)");
  accept->add_option("--report", report_path, "write the JSON report here");

  std::string family, params = "{}", gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  gen->add_option("--family", family, "family id, or 'stochastic'")->required();
  gen->add_option("--params", params, "parameter JSON object");
  gen->add_option("--out", gen_out, "output instance path")->required();
  gen->add_option("--seed", gen_seed, "seed (stochastic generator only)");

  std::string instance_path;
  i64 max_states = 0;
  auto* opt = app.add_subcommand("opt", "brute-force optimum of an instance");
  opt->add_option("--instance", instance_path, "instance JSON path")->required();
  opt->add_option("--max-states", max_states, "search state budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad invocation is a configuration error
  }

  try {
    if (run->parsed()) {
      if (run->count("--seed")) run_opt.seed = seed_arg;
      return cmd_run(run_opt);
    }
    if (accept->parsed()) return cmd_accept(suite, report_path);
    if (gen->parsed()) return cmd_gen(family, params, gen_out, gen_seed);
    if (opt->parsed()) return cmd_opt(instance_path, max_states);
  } catch (const ConfigErr& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.message << "\n";
    return exit_code_for(e.code);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
