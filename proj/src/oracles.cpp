#include "fulfill/oracles.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "fulfill/instances.hpp"
#include "fulfill/policies.hpp"

namespace fulfill {

const char* to_string(OptMethod m) {
  switch (m) {
    case OptMethod::brute_force: return "brute-force";
    case OptMethod::analytic_exact: return "analytic-exact";
    case OptMethod::analytic_upper_bound: return "analytic-upper-bound";
  }
  return "?";
}

namespace {

struct Overflow {};

// Dynamic program over (period, remaining FDC inventory).  Every feasible
// split of every order is enumerated, so the value is the exact optimum —
// usable only on toy instances, which is the point: it cross-checks
// everything else.
struct BruteForce {
  const Instance& inst;
  const BruteForceLimits& limits;
  std::map<std::vector<i64>, double> memo;
  long long expanded = 0;
  long long hits = 0;

  BruteForce(const Instance& in, const BruteForceLimits& lim)
      : inst(in), limits(lim) {}

  std::vector<i64> pack(int t, const std::vector<std::vector<i64>>& inv) const {
    std::vector<i64> key;
    key.reserve(1 + inst.K * inst.n);
    key.push_back(t);
    for (const auto& row : inv) key.insert(key.end(), row.begin(), row.end());
    return key;
  }

  // enumerate every feasible plan for period t (m_k <= inventory, remainder
  // to the RDC) in a fixed deterministic order
  template <class Fn>
  void for_each_plan(int, const std::vector<i64>& order,
                     const std::vector<std::vector<i64>>& inv, Plan& scratch,
                     Fn&& cb) {
    const int n = inst.n;
    const int K = inst.K;
    std::function<void(int)> item_rec = [&](int i) {
      if (i == n) {
        cb();
        return;
      }
      std::function<void(int, i64)> dc_rec = [&](int k, i64 remaining) {
        if (k == K + 1) {
          scratch.at(0, i) = remaining;
          item_rec(i + 1);
          scratch.at(0, i) = 0;
          return;
        }
        i64 cap = std::min<i64>(remaining, inv[k - 1][i]);
        for (i64 m = 0; m <= cap; ++m) {
          scratch.at(k, i) = m;
          dc_rec(k + 1, remaining - m);
        }
        scratch.at(k, i) = 0;
      };
      dc_rec(1, order[i]);
    };
    item_rec(0);
  }

  double expand(int t, const std::vector<std::vector<i64>>& inv) {
    double best = std::numeric_limits<double>::infinity();
    Plan scratch(inst.K, inst.n);
    auto child = inv;
    for_each_plan(t, inst.orders[t], inv, scratch, [&]() {
      for (int k = 1; k <= inst.K; ++k)
        for (int i = 0; i < inst.n; ++i)
          child[k - 1][i] = inv[k - 1][i] - scratch.at(k, i);
      double c = period_cost(scratch, inst.fixed_costs, inst.costs[t]) +
                 solve(t + 1, child);
      if (c < best) best = c;
    });
    return best;
  }

  double solve(int t, const std::vector<std::vector<i64>>& inv) {
    if (t == inst.T) return 0.0;
    auto key = pack(t, inv);
    auto it = memo.find(key);
    if (it != memo.end()) {
      ++hits;
      if (limits.recheck_every > 0 && hits % limits.recheck_every == 0) {
        double again = expand(t, inv);
        if (!(again == it->second))
          throw std::logic_error("brute force: memo recheck mismatch");
      }
      return it->second;
    }
    if ((long long)memo.size() >= limits.max_states) throw Overflow{};
    double v = expand(t, inv);
    ++expanded;
    memo.emplace(std::move(key), v);
    return v;
  }

  // replay the table, taking at each state the first enumerated plan whose
  // cost matches the memoized optimum exactly
  std::vector<Plan> reconstruct() {
    std::vector<Plan> plans;
    auto inv = inst.inventory;
    for (int t = 0; t < inst.T; ++t) {
      double target = memo.at(pack(t, inv));
      Plan scratch(inst.K, inst.n);
      Plan chosen(inst.K, inst.n);
      bool found = false;
      auto child = inv;
      for_each_plan(t, inst.orders[t], inv, scratch, [&]() {
        if (found) return;
        for (int k = 1; k <= inst.K; ++k)
          for (int i = 0; i < inst.n; ++i)
            child[k - 1][i] = inv[k - 1][i] - scratch.at(k, i);
        double c = period_cost(scratch, inst.fixed_costs, inst.costs[t]) +
                   solve(t + 1, child);
        if (c == target) {
          chosen = scratch;
          found = true;
        }
      });
      if (!found) throw std::logic_error("brute force: replay lost the optimum");
      for (int k = 1; k <= inst.K; ++k)
        for (int i = 0; i < inst.n; ++i)
          inv[k - 1][i] -= chosen.at(k, i);
      plans.push_back(std::move(chosen));
    }
    return plans;
  }
};

}  // namespace

OptResult bruteforce_opt(const Instance& inst, const BruteForceLimits& limits) {
  auto t0 = std::chrono::steady_clock::now();
  OptResult r;
  r.method = OptMethod::brute_force;
  BruteForce bf(inst, limits);
  try {
    r.opt_cost = bf.solve(0, inst.inventory);
    if (limits.want_plan) r.plan = bf.reconstruct();
  } catch (const Overflow&) {
    r.overflow = true;
    r.opt_cost = std::numeric_limits<double>::quiet_NaN();
  }
  r.states_expanded = bf.expanded;
  r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

OptResult analytic_opt(const Instance& inst) {
  OptResult r;
  if (inst.meta.opt_exact) {
    r.opt_cost = *inst.meta.opt_exact;
    r.method = OptMethod::analytic_exact;
  } else if (inst.meta.opt_upper_bound) {
    r.opt_cost = *inst.meta.opt_upper_bound;
    r.method = OptMethod::analytic_upper_bound;
  } else {
    throw ConfigError("instance carries no optimal-cost annotation");
  }
  return r;
}

OptResult analytic_opt(const std::string& family, const std::string& params_json) {
  return analytic_opt(gen_adversarial(family, params_json));
}

RatioResult competitive_ratio(double alg_cost, const OptResult& opt) {
  RatioResult r;
  r.lower_bound_on_ratio = opt.method == OptMethod::analytic_upper_bound;
  if (opt.opt_cost > 0) {
    r.value = alg_cost / opt.opt_cost;
  } else if (alg_cost <= 0) {
    r.value = 1.0;  // both costs zero
  } else {
    r.value = std::numeric_limits<double>::infinity();
    r.infinite = true;
  }
  return r;
}

namespace {

double req(const std::optional<double>& v, const char* name, const char* id) {
  if (!v)
    throw std::domain_error(std::string(id) + ": missing input " + name);
  return *v;
}

void check_ab(double a, double b, const char* id) {
  if (!(a > 0) || !(b >= a))
    throw std::domain_error(std::string(id) +
                            ": needs unit cost bounds 0 < a <= b");
}

// worst-case order count for the continuous relaxation of a single gated
// policy: the positive root when it is at least 2, the two-period value
// otherwise
double contmax(double f0, double f, double a) {
  double half = f / (2 * a);
  double nstar = std::sqrt(f0 / a + half * half) - half;
  if (nstar >= 2) return nstar;
  return f0 / (f + 2 * a);
}

}  // namespace

double bound_value(const std::string& id, const BoundInputs& in) {
  const char* c = id.c_str();
  if (id == "theorem-1") {
    double f0 = req(in.f0, "f0", c), fmin = req(in.fmin, "fmin", c);
    double a = req(in.a, "a", c), b = req(in.b, "b", c);
    check_ab(a, b, c);
    double theta = in.theta ? *in.theta : theta_default(f0, fmin, a, b);
    if (!(theta >= 0)) throw std::domain_error("theorem-1: theta must be >= 0");
    double mid = (f0 + b * theta) / (fmin + a * theta);
    return std::max({theta, mid, b / a});
  }
  if (id == "theorem-2") {
    double f0 = req(in.f0, "f0", c), fmin = req(in.fmin, "fmin", c);
    double a = req(in.a, "a", c), b = req(in.b, "b", c);
    check_ab(a, b, c);
    return std::max({1.0, b / (4 * a), contmax(f0, fmin, a) / 4});
  }
  if (id == "theorem-3") {
    double f0 = req(in.f0, "f0", c), f1 = req(in.f1, "f1", c);
    double a = req(in.a, "a", c), b = req(in.b, "b", c);
    check_ab(a, b, c);
    if (!(f1 > 0)) throw std::domain_error("theorem-3: needs f1 > 0");
    return 1 + std::max(f0 / f1, std::sqrt(b / a));
  }
  if (id == "theorem-4") {
    double f0 = req(in.f0, "f0", c);
    if (in.fdc_fixed_costs.empty())
      throw std::domain_error("theorem-4: needs the FDC fixed-cost list");
    double sum = 0, mn = std::numeric_limits<double>::infinity();
    for (double f : in.fdc_fixed_costs) {
      if (!(f >= 0)) throw std::domain_error("theorem-4: fixed costs must be >= 0");
      sum += f;
      mn = std::min(mn, f);
    }
    if (!(mn > 0)) return std::numeric_limits<double>::infinity();
    return std::max((f0 + sum) / mn, 2.0);
  }
  if (id == "theorem-6") {
    double f0 = req(in.f0, "f0", c);
    double a = req(in.a, "a", c), b = req(in.b, "b", c);
    check_ab(a, b, c);
    return (4 + std::sqrt(2.0)) * std::sqrt(std::max(f0 / 2, b) / a);
  }
  if (id == "theorem-7") {
    double f0 = req(in.f0, "f0", c), f1 = req(in.f1, "f1", c);
    double a = req(in.a, "a", c), b = req(in.b, "b", c);
    check_ab(a, b, c);
    return std::max({1.0, std::sqrt(b / a) / 3, contmax(f0, f1, a) / 4});
  }
  if (id == "theorem-9") {
    double w;
    if (in.w) {
      w = *in.w;
    } else {
      double f0 = req(in.f0, "f0", c), f1 = req(in.f1, "f1", c);
      if (!(f0 > 0) || !(f1 > 0))
        throw std::domain_error("theorem-9: needs f0 > 0 and f1 > 0");
      w = f0 / f1;
    }
    if (!(w > 0)) throw std::domain_error("theorem-9: needs w > 0");
    if (w < (std::sqrt(5.0) - 1) / 2)
      return 1 + 1 / (1 - w + 2 * std::sqrt(1 - w));
    return 1 + w;
  }
  if (id == "theorem-10") {
    double f0 = req(in.f0, "f0", c), f1 = req(in.f1, "f1", c);
    if (!(f1 > 0)) throw std::domain_error("theorem-10: needs f1 > 0");
    return std::max(1 + f0 / f1, 1.25);
  }
  if (id == "corollary-1") {
    double f0 = req(in.f0, "f0", c), f1 = req(in.f1, "f1", c);
    double thm3 = bound_value("theorem-3", in);
    if (f0 >= f1) return std::min(thm3, bound_value("theorem-6", in));
    return thm3;
  }
  if (id == "corollary-1-closed") {
    double f0 = req(in.f0, "f0", c), f1 = req(in.f1, "f1", c);
    double a = req(in.a, "a", c), b = req(in.b, "b", c);
    check_ab(a, b, c);
    if (!(f1 > 0)) throw std::domain_error("corollary-1-closed: needs f1 > 0");
    double left =
        std::min(2 * f0 / f1, (2 * std::sqrt(2.0) + 1) * std::sqrt(f0 / a));
    return std::max(left, (4 + std::sqrt(2.0)) * std::sqrt(b / a));
  }
  if (id == "prop-1") return 2 * (1 + std::sqrt(5.0));
  if (id == "prop-2")
    return 4 * (9 + 4 * std::sqrt(2.0)) / (std::sqrt(10 + 4 * std::sqrt(2.0)) - 1);
  throw ConfigError("unknown bound id: " + id);
}

}  // namespace fulfill
