#include "fulfill/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fulfill/rng.hpp"
#include "json.hpp"

namespace fulfill {

namespace {

using nlohmann::json;

Instance base_instance(int n, int K, int T, std::vector<double> fixed,
                       CostRegime regime) {
  Instance inst;
  inst.n = n;
  inst.K = K;
  inst.T = T;
  inst.fixed_costs = std::move(fixed);
  inst.regime = regime;
  inst.costs.assign(T, std::vector<std::vector<double>>(
                           K + 1, std::vector<double>(n, 0.0)));
  inst.inventory.assign(K, std::vector<i64>(n, 0));
  inst.orders.assign(T, std::vector<i64>(n, 0));
  return inst;
}

void fill_invariant_cost(Instance& inst, int k, double c) {
  for (int t = 0; t < inst.T; ++t)
    for (int i = 0; i < inst.n; ++i) inst.costs[t][k][i] = c;
}

// ---- family parameter plumbing -------------------------------------------

struct Params {
  std::string family;
  json j;

  Params(const std::string& fam, const std::string& text) : family(fam) {
    std::string body = text.empty() ? "{}" : text;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ConfigError(family + ": params are not valid JSON: " + e.what());
    }
    if (!j.is_object())
      throw ConfigError(family + ": params must be a JSON object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok |= it.key() == k;
      if (!ok)
        throw ConfigError(family + ": unknown parameter \"" + it.key() + "\"");
    }
  }

  bool has(const char* key) const { return j.contains(key); }

  double num(const char* key) const {
    if (!has(key))
      throw ConfigError(family + ": missing parameter \"" + key + "\"");
    if (!j.at(key).is_number())
      throw ConfigError(family + ": parameter \"" + key + "\" must be a number");
    return j.at(key).get<double>();
  }
  double num_or(const char* key, double dflt) const {
    return has(key) ? num(key) : dflt;
  }
  long long integer(const char* key) const {
    double v = num(key);
    if (std::floor(v) != v || std::fabs(v) > 1e15)
      throw ConfigError(family + ": parameter \"" + key + "\" must be an integer");
    return (long long)v;
  }
  long long integer_or(const char* key, long long dflt) const {
    return has(key) ? integer(key) : dflt;
  }

  // accepted spellings: I1, I_1 (same for 2); pair families default to I1
  std::string variant() const {
    if (!has("variant")) return "I1";
    if (!j.at("variant").is_string())
      throw ConfigError(family + ": \"variant\" must be a string");
    std::string v = j.at("variant").get<std::string>();
    if (v == "I1" || v == "I_1") return "I1";
    if (v == "I2" || v == "I_2") return "I2";
    throw ConfigError(family + ": unknown variant \"" + v + "\"");
  }
};

void require(bool cond, const std::string& family, const char* msg) {
  if (!cond) throw ConfigError(family + ": " + msg);
}

std::string dump_params(const json& p) { return p.dump(); }

// ---- the families ---------------------------------------------------------

// One big order of M units, then M single-unit orders; the FDC is free to
// ship from but holds only M units, so a greedy policy drains it immediately
// and pays the RDC charge every later period.
Instance gen_example1(const Params& p) {
  p.allow({"M"});
  long long M = p.integer("M");
  require(M >= 1, p.family, "needs M >= 1");
  Instance inst = base_instance(1, 1, int(M + 1), {1.0, 0.0},
                                CostRegime::invariant);
  double c = 1.0 / double(M);
  fill_invariant_cost(inst, 0, c);
  fill_invariant_cost(inst, 1, c);
  inst.inventory[0][0] = M;
  inst.orders[0][0] = M;
  for (int t = 1; t <= M; ++t) inst.orders[t][0] = 1;
  inst.cost_bounds = {c, c};
  inst.meta.family = "example-1";
  inst.meta.opt_exact = 3.0;
  inst.meta.params_json = dump_params(json{{"M", M}});
  return inst;
}

// Paired lower-bound construction for fixed-cost-priority policies: one FDC
// stocks one unit of every item at unit cost a everywhere.  Variant I1 is a
// single all-items order; I2 appends n single-item orders.
Instance gen_thm2_pair(const Params& p) {
  p.allow({"n", "f", "f0", "a", "K", "variant"});
  long long n = p.integer("n");
  double f = p.num("f"), f0 = p.num("f0"), a = p.num("a");
  long long K = p.integer_or("K", 1);
  std::string variant = p.variant();
  require(n >= 1, p.family, "needs n >= 1");
  require(K >= 1, p.family, "needs K >= 1");
  require(a > 0, p.family, "needs a > 0");
  require(f >= 0 && f0 >= 0, p.family, "fixed costs must be >= 0");

  int T = variant == "I1" ? 1 : int(n + 1);
  std::vector<double> fixed(K + 1, f);
  fixed[0] = f0;
  Instance inst = base_instance(int(n), int(K), T, std::move(fixed),
                                CostRegime::invariant);
  for (int k = 0; k <= K; ++k) fill_invariant_cost(inst, k, a);
  for (int i = 0; i < n; ++i) inst.inventory[0][i] = 1;  // only FDC 1 stocked
  for (int i = 0; i < n; ++i) inst.orders[0][i] = 1;
  if (variant == "I2")
    for (int t = 1; t <= n; ++t) inst.orders[t][t - 1] = 1;

  inst.cost_bounds = {a, a};
  inst.meta.family = "thm2-pair";
  inst.meta.variant = variant;
  if (variant == "I1")
    inst.meta.opt_exact = double(n) * a + std::min(f0, f);
  else
    inst.meta.opt_upper_bound = f0 + double(n) * f + 2.0 * double(n) * a;
  inst.meta.params_json =
      dump_params(json{{"n", n}, {"f", f}, {"f0", f0}, {"a", a}, {"K", K}});
  return inst;
}

// Two-period, two-FDC construction where the cheap FDC in period 2 differs
// between the variants; only a policy that saves the right FDC stays cheap.
Instance gen_thm2_varying_pair(const Params& p) {
  p.allow({"N", "a", "b", "K", "f0", "f", "variant"});
  long long N = p.integer("N");
  double a = p.num("a"), b = p.num("b");
  long long K = p.integer_or("K", 2);
  double f0 = p.num_or("f0", 50), f = p.num_or("f", 5);
  std::string variant = p.variant();
  require(N >= 1, p.family, "needs N >= 1");
  require(K >= 2, p.family, "needs K >= 2");
  require(a > 0 && b >= a, p.family, "needs unit cost bounds 0 < a <= b");
  require(f >= 0 && f0 >= 0, p.family, "fixed costs must be >= 0");

  std::vector<double> fixed(K + 1, f);
  fixed[0] = f0;
  Instance inst =
      base_instance(1, int(K), 2, std::move(fixed), CostRegime::varying);
  for (int k = 0; k <= K; ++k) inst.costs[0][k][0] = b;
  inst.costs[0][1][0] = a;
  inst.costs[0][2][0] = a;
  for (int k = 0; k <= K; ++k) inst.costs[1][k][0] = b;
  inst.costs[1][variant == "I1" ? 2 : 1][0] = a;  // who stays cheap at t=2
  inst.inventory[0][0] = N;
  inst.inventory[1][0] = N;
  inst.orders[0][0] = N;
  inst.orders[1][0] = N;

  inst.cost_bounds = {a, b};
  inst.meta.family = "thm2-varying-pair";
  inst.meta.variant = variant;
  double v = 2 * f + 2 * a * double(N);
  if (f <= f0)
    inst.meta.opt_exact = v;  // both periods pay the global-minimum fixed cost
  else
    inst.meta.opt_upper_bound = v;
  inst.meta.params_json = dump_params(
      json{{"N", N}, {"a", a}, {"b", b}, {"K", K}, {"f0", f0}, {"f", f}});
  return inst;
}

// Table construction: n columns of s + K*d items.  FDC 1 stocks everything
// at 1; FDC k >= 2 stocks the d items of its own row per column; the first
// (s items) and last (d items) rows of each column live only in FDC 1.
// Variant I1 orders everything except the last row at once; I2 follows with
// one full column per period.
Instance gen_thm5_table(const Params& p) {
  p.allow({"s", "d", "n", "K", "c0", "c1", "c2", "f0", "f", "variant"});
  long long s = p.integer("s"), d = p.integer("d"), n = p.integer("n"),
            K = p.integer("K");
  double c0 = p.num_or("c0", 1.0), c1 = p.num_or("c1", 1e-2),
         c2 = p.num_or("c2", 1.0);
  double f0 = p.num_or("f0", 50), f = p.num_or("f", 5);
  std::string variant = p.variant();
  require(s >= 1 && d >= 1 && n >= 1, p.family, "needs s, d, n >= 1");
  require(K >= 1, p.family, "needs K >= 1");
  require(c0 > 0 && c1 > 0 && c2 > 0, p.family, "unit costs must be > 0");
  require(f >= 0 && f0 >= 0, p.family, "fixed costs must be >= 0");

  const long long col = s + K * d;  // items per column
  const long long items = n * col;
  int T = variant == "I1" ? 1 : int(n + 1);
  std::vector<double> fixed(K + 1, f);
  fixed[0] = f0;
  Instance inst = base_instance(int(items), int(K), T, std::move(fixed),
                                CostRegime::invariant);
  fill_invariant_cost(inst, 0, c0);
  fill_invariant_cost(inst, 1, c1);
  for (int k = 2; k <= K; ++k) fill_invariant_cost(inst, k, c2);

  auto item_id = [&](long long column, long long pos) {
    return int(column * col + pos);
  };
  for (long long j = 0; j < n; ++j)
    for (long long pos = 0; pos < col; ++pos) {
      int i = item_id(j, pos);
      inst.inventory[0][i] = 1;  // FDC 1 stocks every item
      if (pos >= s && pos < s + (K - 1) * d) {
        int row_k = int(2 + (pos - s) / d);  // FDC owning this row
        inst.inventory[row_k - 1][i] = 1;
      }
    }
  // first order: everything except the last row of each column
  for (long long j = 0; j < n; ++j)
    for (long long pos = 0; pos < col - d; ++pos)
      inst.orders[0][item_id(j, pos)] = 1;
  if (variant == "I2")
    for (long long j = 0; j < n; ++j)
      for (long long pos = 0; pos < col; ++pos)
        inst.orders[j + 1][item_id(j, pos)] = 1;

  inst.cost_bounds = {std::min({c0, c1, c2}), std::max({c0, c1, c2})};
  inst.meta.family = "thm5-table";
  inst.meta.variant = variant;
  if (variant == "I1") {
    double v = f + double(s * n + (K - 1) * d * n) * c1;
    bool f1_min = f <= f0;  // FDCs share f, so FDC 1 ties the FDC minimum
    bool c1_min = c1 <= c0 && c1 <= c2;
    if (f1_min && c1_min)
      inst.meta.opt_exact = v;
    else
      inst.meta.opt_upper_bound = v;
  } else {
    inst.meta.opt_upper_bound = f0 + double(K - 1) * f +
                                double(s * n) * c0 +
                                double(d * (K - 1) * n) * c2 +
                                (f + double(s + K * d) * c1) * double(n);
  }
  inst.meta.params_json =
      dump_params(json{{"s", s},
                       {"d", d},
                       {"n", n},
                       {"K", K},
                       {"c0", c0},
                       {"c1", c1},
                       {"c2", c2},
                       {"f0", f0},
                       {"f", f}});
  return inst;
}

// Single FDC, one item: period 1 offers the RDC at the geometric mean
// sqrt(ab); in variant I2 a second period raises the RDC price to b while
// the FDC stays at a, punishing a policy that spent the FDC early.
Instance gen_thm7_pair(const Params& p) {
  p.allow({"N", "a", "b", "f0", "f1", "variant"});
  long long N = p.integer("N");
  double a = p.num("a"), b = p.num("b");
  double f0 = p.num_or("f0", 50), f1 = p.num_or("f1", 5);
  std::string variant = p.variant();
  require(N >= 1, p.family, "needs N >= 1");
  require(a > 0 && b >= a, p.family, "needs unit cost bounds 0 < a <= b");
  require(f0 >= 0 && f1 >= 0, p.family, "fixed costs must be >= 0");

  double g = std::sqrt(a * b);
  int T = variant == "I1" ? 1 : 2;
  Instance inst = base_instance(1, 1, T, {f0, f1}, CostRegime::varying);
  inst.costs[0][0][0] = g;
  inst.costs[0][1][0] = a;
  if (T == 2) {
    inst.costs[1][0][0] = b;
    inst.costs[1][1][0] = a;
  }
  inst.inventory[0][0] = N;
  for (int t = 0; t < T; ++t) inst.orders[t][0] = N;

  inst.cost_bounds = {a, b};
  inst.meta.family = "thm7-pair";
  inst.meta.variant = variant;
  if (variant == "I1")
    inst.meta.opt_exact =
        std::min(f1 + a * double(N), f0 + g * double(N));
  else
    inst.meta.opt_upper_bound = f0 + f1 + g * double(N) + a * double(N);
  inst.meta.params_json = dump_params(
      json{{"N", N}, {"a", a}, {"b", b}, {"f0", f0}, {"f1", f1}});
  return inst;
}

// Single FDC stocking M*N units at variable cost zero against an
// epsilon-priced RDC; variant I2 follows the size-N order with one of size
// M*N.  Small enough to solve by enumerating the per-period FDC quantities
// at their breakpoints.
Instance gen_thm8_10_pair(const Params& p) {
  p.allow({"M", "N", "eps", "f0", "f1", "variant"});
  long long M = p.integer_or("M", 2);
  long long N = p.integer_or("N", 700);
  double eps = p.num_or("eps", 1e-2);
  double f0 = p.num_or("f0", 1), f1 = p.num_or("f1", 4);
  std::string variant = p.variant();
  require(M >= 1 && N >= 1, p.family, "needs M, N >= 1");
  require(eps >= 0, p.family, "needs eps >= 0");
  require(f0 >= 0 && f1 >= 0, p.family, "fixed costs must be >= 0");

  int T = variant == "I1" ? 1 : 2;
  Instance inst = base_instance(1, 1, T, {f0, f1}, CostRegime::invariant);
  fill_invariant_cost(inst, 0, eps);
  fill_invariant_cost(inst, 1, 0.0);
  inst.inventory[0][0] = M * N;
  inst.orders[0][0] = N;
  if (T == 2) inst.orders[1][0] = M * N;

  inst.meta.family = "thm8/10-pair";
  inst.meta.variant = variant;
  if (variant == "I1") {
    inst.meta.opt_exact = std::min(f1, f0 + double(N) * eps);
  } else {
    // x_t = units the FDC ships in period t; each period's cost is linear in
    // x_t between activation breakpoints, so only the endpoints matter
    double best = std::numeric_limits<double>::infinity();
    const i64 S1 = N, S2 = M * N, I0 = M * N;
    for (i64 x1 : {i64(0), S1}) {
      for (i64 x2 : {i64(0), std::min(S2, I0 - x1)}) {
        double c = 0;
        if (x1 > 0) c += f1;
        if (x1 < S1) c += f0 + double(S1 - x1) * eps;
        if (x2 > 0) c += f1;
        if (x2 < S2) c += f0 + double(S2 - x2) * eps;
        best = std::min(best, c);
      }
    }
    inst.meta.opt_exact = best;
  }
  inst.meta.params_json = dump_params(
      json{{"M", M}, {"N", N}, {"eps", eps}, {"f0", f0}, {"f1", f1}});
  return inst;
}

// Free-to-ship FDC holding one unit of each of ceil(sqrt(f0)) items, a bulk
// all-items order, then the same items one at a time.
Instance gen_stress(const Params& p) {
  p.allow({"f0"});
  double f0 = p.num("f0");
  require(f0 > 0, p.family, "needs f0 > 0");
  long long n = (long long)std::ceil(std::sqrt(f0));
  Instance inst =
      base_instance(int(n), 1, int(n + 1), {f0, 0.0}, CostRegime::invariant);
  fill_invariant_cost(inst, 0, 1.0);
  fill_invariant_cost(inst, 1, 1.0);
  for (int i = 0; i < n; ++i) inst.inventory[0][i] = 1;
  for (int i = 0; i < n; ++i) inst.orders[0][i] = 1;
  for (int t = 1; t <= n; ++t) inst.orders[t][t - 1] = 1;
  inst.cost_bounds = {1.0, 1.0};
  inst.meta.family = "stress";
  inst.meta.opt_exact = f0 + 2.0 * double(n);
  inst.meta.params_json = dump_params(json{{"f0", f0}});
  return inst;
}

}  // namespace

Instance gen_adversarial(const std::string& family,
                         const std::string& params_json) {
  Params p(family, params_json);
  if (family == "example-1") return gen_example1(p);
  if (family == "thm2-pair") return gen_thm2_pair(p);
  if (family == "thm2-varying-pair") return gen_thm2_varying_pair(p);
  if (family == "thm5-table") return gen_thm5_table(p);
  if (family == "thm7-pair") return gen_thm7_pair(p);
  if (family == "thm8/10-pair") return gen_thm8_10_pair(p);
  if (family == "stress") return gen_stress(p);
  throw ConfigError("unknown adversarial family: " + family);
}

std::vector<Instance> gen_adversarial_family(const std::string& family,
                                             const std::string& params_json) {
  if (family == "example-1" || family == "stress")
    return {gen_adversarial(family, params_json)};
  Params probe(family, params_json);
  json j = probe.j;
  std::vector<Instance> out;
  for (const char* v : {"I1", "I2"}) {
    j["variant"] = v;
    out.push_back(gen_adversarial(family, j.dump()));
  }
  return out;
}

// ---- stochastic generator --------------------------------------------------

Instance gen_stochastic(const StochasticConfig& cfg, std::uint64_t seed) {
  const size_t J = cfg.order_sizes.size();
  if (cfg.type_counts.size() != J || cfg.size_probs.size() != J || J == 0)
    throw ConfigError(
        "stochastic: order_sizes, type_counts, size_probs must be equally "
        "sized and nonempty");
  if (cfg.n < 1 || cfg.K < 1 || cfg.T < 1)
    throw ConfigError("stochastic: needs n, K, T >= 1");
  if (!(cfg.a > 0) || !(cfg.b >= cfg.a))
    throw ConfigError("stochastic: needs unit cost bounds 0 < a <= b");
  if (!(cfg.tau >= 0)) throw ConfigError("stochastic: needs tau >= 0");
  if (cfg.f0 < 0 || cfg.f_fdc < 0)
    throw ConfigError("stochastic: fixed costs must be >= 0");
  double psum = 0;
  for (size_t jc = 0; jc < J; ++jc) {
    if (cfg.order_sizes[jc] < 1 || cfg.order_sizes[jc] > cfg.n)
      throw ConfigError("stochastic: order sizes must be in [1, n]");
    if (cfg.type_counts[jc] < 1)
      throw ConfigError("stochastic: type counts must be >= 1");
    if (cfg.size_probs[jc] < 0)
      throw ConfigError("stochastic: size probabilities must be >= 0");
    psum += cfg.size_probs[jc];
  }
  if (std::fabs(psum - 1.0) > 1e-12)
    throw ConfigError("stochastic: size probabilities must sum to 1");

  Rng rng = substream(seed, kStreamInstance);

  // random subsets per size class (partial Fisher-Yates; repeats allowed)
  OrderTypeDistribution dist;
  std::vector<int> pool(cfg.n);
  std::iota(pool.begin(), pool.end(), 0);
  for (size_t jc = 0; jc < J; ++jc) {
    const int sz = cfg.order_sizes[jc];
    const double lam = cfg.size_probs[jc] / cfg.type_counts[jc];
    for (int c = 0; c < cfg.type_counts[jc]; ++c) {
      for (int d = 0; d < sz; ++d) {
        std::uint64_t r = rng.below(std::uint64_t(cfg.n - d));
        std::swap(pool[d], pool[d + int(r)]);
      }
      std::vector<int> type(pool.begin(), pool.begin() + sz);
      std::sort(type.begin(), type.end());
      dist.types.push_back(std::move(type));
      dist.probs.push_back(lam);
    }
  }

  // exact per-item order probability under the mixture
  std::vector<double> p(cfg.n, 0.0);
  for (size_t q = 0; q < dist.types.size(); ++q)
    for (int i : dist.types[q]) p[i] += dist.probs[q];

  std::vector<double> fixed(cfg.K + 1, cfg.f_fdc);
  fixed[0] = cfg.f0;
  Instance inst =
      base_instance(cfg.n, cfg.K, cfg.T, std::move(fixed), cfg.regime);

  for (int k = 0; k < cfg.K; ++k)
    for (int i = 0; i < cfg.n; ++i)
      inst.inventory[k][i] =
          (i64)std::floor(cfg.tau * p[i] * double(cfg.T) / double(cfg.K) + 0.5);

  if (cfg.regime == CostRegime::varying) {
    for (int t = 0; t < cfg.T; ++t)
      for (int k = 0; k <= cfg.K; ++k)
        for (int i = 0; i < cfg.n; ++i)
          inst.costs[t][k][i] = rng.uniform(cfg.a, cfg.b);
  } else {
    for (int k = 0; k <= cfg.K; ++k)
      for (int i = 0; i < cfg.n; ++i) {
        double c = rng.uniform(cfg.a, cfg.b);
        for (int t = 0; t < cfg.T; ++t) inst.costs[t][k][i] = c;
      }
  }

  for (int t = 0; t < cfg.T; ++t) {
    size_t q = rng.categorical(dist.probs);
    for (int i : dist.types[q]) inst.orders[t][i] = 1;
  }

  inst.cost_bounds = {cfg.a, cfg.b};
  inst.meta.family = "stochastic";
  inst.meta.distribution = std::move(dist);
  inst.meta.params_json = dump_params(json{{"n", cfg.n},
                                           {"K", cfg.K},
                                           {"T", cfg.T},
                                           {"f0", cfg.f0},
                                           {"f_fdc", cfg.f_fdc},
                                           {"a", cfg.a},
                                           {"b", cfg.b},
                                           {"order_sizes", cfg.order_sizes},
                                           {"type_counts", cfg.type_counts},
                                           {"size_probs", cfg.size_probs},
                                           {"tau", cfg.tau},
                                           {"seed", seed}});
  return inst;
}

// ---- JSON file format ------------------------------------------------------

namespace {

std::string ptr(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& part : parts) s += "/" + part;
  return s;
}

const json& need(const json& obj, const char* key, const std::string& at) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at + "/" + key, "missing required key");
  return *it;
}

long long as_int(const json& v, const std::string& at) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number()) {
    double d = v.get<double>();
    if (std::floor(d) == d && std::fabs(d) <= 9e15) return (long long)d;
  }
  throw ParseError(at, "expected an integer");
}

double as_num(const json& v, const std::string& at) {
  if (!v.is_number()) throw ParseError(at, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(at, "expected a finite number");
  return d;
}

const json& as_array(const json& v, size_t want, const std::string& at) {
  if (!v.is_array()) throw ParseError(at, "expected an array");
  if (v.size() != want)
    throw ParseError(at, "expected " + std::to_string(want) + " entries, got " +
                             std::to_string(v.size()));
  return v;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json j;
  j["n"] = inst.n;
  j["K"] = inst.K;
  j["T"] = inst.T;
  j["fixed_costs"] = inst.fixed_costs;
  j["cost_regime"] = to_string(inst.regime);
  if (inst.regime == CostRegime::invariant && inst.T > 0) {
    j["costs"] = json{{"replicate", true}, {"values", inst.costs[0]}};
  } else {
    j["costs"] = inst.costs;
  }
  j["inventory"] = inst.inventory;
  j["orders"] = inst.orders;

  json meta;
  meta["family"] = inst.meta.family;
  if (!inst.meta.variant.empty()) meta["variant"] = inst.meta.variant;
  json ann = json::object();
  if (inst.meta.opt_exact) ann["opt_exact"] = *inst.meta.opt_exact;
  if (inst.meta.opt_upper_bound)
    ann["opt_upper_bound"] = *inst.meta.opt_upper_bound;
  meta["annotations"] = ann;
  if (inst.cost_bounds)
    meta["cost_bounds"] = {inst.cost_bounds->first, inst.cost_bounds->second};
  if (inst.meta.distribution) {
    meta["distribution"] = json{{"types", inst.meta.distribution->types},
                                {"probs", inst.meta.distribution->probs}};
  }
  if (!inst.meta.params_json.empty())
    meta["params"] = json::parse(inst.meta.params_json);
  j["meta"] = meta;
  return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("", "top level must be an object");

  Instance inst;
  inst.n = (int)as_int(need(j, "n", ""), "/n");
  inst.K = (int)as_int(need(j, "K", ""), "/K");
  inst.T = (int)as_int(need(j, "T", ""), "/T");
  if (inst.n < 1) throw ParseError("/n", "needs n >= 1");
  if (inst.K < 0) throw ParseError("/K", "needs K >= 0");
  if (inst.T < 0) throw ParseError("/T", "needs T >= 0");

  {
    const json& fc = as_array(need(j, "fixed_costs", ""), size_t(inst.K) + 1,
                              "/fixed_costs");
    inst.fixed_costs.resize(inst.K + 1);
    for (int k = 0; k <= inst.K; ++k) {
      inst.fixed_costs[k] = as_num(fc[k], ptr({"fixed_costs", std::to_string(k)}));
      if (inst.fixed_costs[k] < 0)
        throw ParseError(ptr({"fixed_costs", std::to_string(k)}),
                         "fixed costs must be >= 0");
    }
  }

  {
    std::string r = need(j, "cost_regime", "").is_string()
                        ? j["cost_regime"].get<std::string>()
                        : throw ParseError("/cost_regime", "expected a string");
    if (r == "time-varying") inst.regime = CostRegime::varying;
    else if (r == "time-invariant") inst.regime = CostRegime::invariant;
    else
      throw ParseError("/cost_regime",
                       "expected \"time-varying\" or \"time-invariant\"");
  }

  // inventory, under its canonical key or the accepted alias
  {
    bool canon = j.contains("inventory");
    bool alias = j.contains("initial_inventory");
    if (canon && alias)
      throw ParseError("/initial_inventory",
                       "both inventory and initial_inventory are present");
    if (!canon && !alias)
      throw ParseError("/inventory", "missing required key");
    const std::string key = canon ? "inventory" : "initial_inventory";
    const json& inv = as_array(j[key], size_t(inst.K), "/" + key);
    inst.inventory.assign(inst.K, std::vector<i64>(inst.n, 0));
    for (int k = 0; k < inst.K; ++k) {
      const json& row =
          as_array(inv[k], size_t(inst.n), ptr({key, std::to_string(k)}));
      for (int i = 0; i < inst.n; ++i) {
        std::string at = ptr({key, std::to_string(k), std::to_string(i)});
        i64 v = as_int(row[i], at);
        if (v < 0) throw ParseError(at, "inventory must be >= 0");
        inst.inventory[k][i] = v;
      }
    }
  }

  {
    const json& costs = need(j, "costs", "");
    auto read_matrix = [&](const json& m, const std::string& at) {
      std::vector<std::vector<double>> out(inst.K + 1,
                                           std::vector<double>(inst.n));
      const json& rows = as_array(m, size_t(inst.K) + 1, at);
      for (int k = 0; k <= inst.K; ++k) {
        const json& row =
            as_array(rows[k], size_t(inst.n), at + "/" + std::to_string(k));
        for (int i = 0; i < inst.n; ++i) {
          std::string cell = at + "/" + std::to_string(k) + "/" + std::to_string(i);
          double c = as_num(row[i], cell);
          if (c < 0) throw ParseError(cell, "variable costs must be >= 0");
          out[k][i] = c;
        }
      }
      return out;
    };
    if (costs.is_object()) {
      auto rep = costs.find("replicate");
      if (rep == costs.end() || !rep->is_boolean() || !rep->get<bool>())
        throw ParseError("/costs/replicate",
                         "compact cost form requires \"replicate\": true");
      if (inst.regime != CostRegime::invariant)
        throw ParseError("/costs/replicate",
                         "compact cost form requires the time-invariant regime");
      auto m = read_matrix(need(costs, "values", "/costs"), "/costs/values");
      inst.costs.assign(inst.T, m);
    } else if (costs.is_array()) {
      as_array(costs, size_t(inst.T), "/costs");
      inst.costs.resize(inst.T);
      for (int t = 0; t < inst.T; ++t)
        inst.costs[t] = read_matrix(costs[t], "/costs/" + std::to_string(t));
      if (inst.regime == CostRegime::invariant) {
        for (int t = 1; t < inst.T; ++t)
          for (int k = 0; k <= inst.K; ++k)
            for (int i = 0; i < inst.n; ++i)
              if (inst.costs[t][k][i] != inst.costs[0][k][i])
                throw ParseError(
                    ptr({"costs", std::to_string(t), std::to_string(k),
                         std::to_string(i)}),
                    "time-invariant regime but the cost differs from period 1");
      }
    } else {
      throw ParseError("/costs", "expected the cost tensor or the compact form");
    }
  }

  {
    const json& orders = as_array(need(j, "orders", ""), size_t(inst.T), "/orders");
    inst.orders.assign(inst.T, std::vector<i64>(inst.n, 0));
    for (int t = 0; t < inst.T; ++t) {
      const json& row =
          as_array(orders[t], size_t(inst.n), ptr({"orders", std::to_string(t)}));
      for (int i = 0; i < inst.n; ++i) {
        std::string at = ptr({"orders", std::to_string(t), std::to_string(i)});
        i64 v = as_int(row[i], at);
        if (v < 0) throw ParseError(at, "order quantities must be >= 0");
        inst.orders[t][i] = v;
      }
    }
  }

  if (j.contains("meta")) {
    const json& meta = j["meta"];
    if (!meta.is_object()) throw ParseError("/meta", "expected an object");
    if (meta.contains("family")) {
      if (!meta["family"].is_string())
        throw ParseError("/meta/family", "expected a string");
      inst.meta.family = meta["family"].get<std::string>();
    }
    if (meta.contains("variant")) {
      if (!meta["variant"].is_string())
        throw ParseError("/meta/variant", "expected a string");
      inst.meta.variant = meta["variant"].get<std::string>();
    }
    if (meta.contains("annotations")) {
      const json& ann = meta["annotations"];
      if (!ann.is_object()) throw ParseError("/meta/annotations", "expected an object");
      if (ann.contains("opt_exact"))
        inst.meta.opt_exact = as_num(ann["opt_exact"], "/meta/annotations/opt_exact");
      if (ann.contains("opt_upper_bound"))
        inst.meta.opt_upper_bound =
            as_num(ann["opt_upper_bound"], "/meta/annotations/opt_upper_bound");
    }
    if (meta.contains("cost_bounds")) {
      const json& cb = as_array(meta["cost_bounds"], 2, "/meta/cost_bounds");
      double a = as_num(cb[0], "/meta/cost_bounds/0");
      double b = as_num(cb[1], "/meta/cost_bounds/1");
      if (!(a > 0) || !(b >= a))
        throw ParseError("/meta/cost_bounds", "needs 0 < a <= b");
      inst.cost_bounds = {a, b};
    }
    if (meta.contains("distribution")) {
      const json& d = meta["distribution"];
      if (!d.is_object())
        throw ParseError("/meta/distribution", "expected an object");
      OrderTypeDistribution dist;
      const json& types = need(d, "types", "/meta/distribution");
      if (!types.is_array())
        throw ParseError("/meta/distribution/types", "expected an array");
      for (size_t q = 0; q < types.size(); ++q) {
        std::string at = "/meta/distribution/types/" + std::to_string(q);
        if (!types[q].is_array()) throw ParseError(at, "expected an array");
        std::vector<int> type;
        for (size_t p = 0; p < types[q].size(); ++p) {
          long long v = as_int(types[q][p], at + "/" + std::to_string(p));
          if (v < 0 || v >= inst.n)
            throw ParseError(at + "/" + std::to_string(p),
                             "item index out of range");
          type.push_back((int)v);
        }
        dist.types.push_back(std::move(type));
      }
      const json& probs = as_array(need(d, "probs", "/meta/distribution"),
                                   dist.types.size(), "/meta/distribution/probs");
      for (size_t q = 0; q < probs.size(); ++q) {
        double v = as_num(probs[q], "/meta/distribution/probs/" + std::to_string(q));
        if (v < 0)
          throw ParseError("/meta/distribution/probs/" + std::to_string(q),
                           "probabilities must be >= 0");
        dist.probs.push_back(v);
      }
      inst.meta.distribution = std::move(dist);
    }
    if (meta.contains("params")) inst.meta.params_json = meta["params"].dump();
  }
  return inst;
}

void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << instance_to_json(inst);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace fulfill
