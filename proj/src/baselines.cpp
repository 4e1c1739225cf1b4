#include "fulfill/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <unordered_map>

#include "json.hpp"

namespace fulfill {

namespace {

// lexicographic order on activation subsets given as sorted index lists
bool subset_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Plan myopic_decide(const std::vector<i64>& order,
                   const std::vector<std::vector<i64>>& inventory,
                   const std::vector<std::vector<double>>& cost_col,
                   const std::vector<double>& fixed_costs,
                   const MyopicLimits& limits) {
  const int K = (int)inventory.size();
  const int n = (int)order.size();
  if (K > limits.max_K)
    throw ConfigError("myopic: K exceeds the activation enumeration limit");

  Plan best_plan(K, n);
  std::vector<int> positive;
  for (int i = 0; i < n; ++i)
    if (order[i] > 0) positive.push_back(i);
  if (positive.empty()) return best_plan;  // zero demand, zero plan

  // DCs in fixed-cost order so the include-branch prune bites early.
  std::vector<int> dcs(K + 1);
  for (int k = 0; k <= K; ++k) dcs[k] = k;
  std::sort(dcs.begin(), dcs.end(), [&](int x, int y) {
    if (fixed_costs[x] != fixed_costs[y]) return fixed_costs[x] < fixed_costs[y];
    return x < y;
  });

  double best_cost = std::numeric_limits<double>::infinity();
  int best_count = 0;
  std::vector<int> best_subset;
  bool have_best = false;

  Plan cand(K, n);
  std::vector<int> chosen;
  std::vector<std::pair<double, int>> fill_order;  // (unit cost, -k)

  auto evaluate = [&](const std::vector<int>& subset) {
    // Coverage first: every ordered item must fit in the activated capacity.
    bool has_rdc = false;
    for (int k : subset) has_rdc |= k == 0;
    if (!has_rdc) {
      for (int i : positive) {
        i64 cap = 0;
        for (int k : subset)
          if (k >= 1) cap += inventory[k - 1][i];
        if (cap < order[i]) return;
      }
    }
    cand.clear();
    double cost = 0;
    std::vector<char> used(K + 1, 0);
    for (int i : positive) {
      // cheapest first; equal costs prefer the larger DC index, which keeps
      // low rows of the plan small (lexicographically smallest plan)
      fill_order.clear();
      for (int k : subset) fill_order.push_back({cost_col[k][i], -k});
      std::sort(fill_order.begin(), fill_order.end());
      i64 rem = order[i];
      for (auto [c, negk] : fill_order) {
        if (rem == 0) break;
        int k = -negk;
        i64 cap = k == 0 ? rem : std::min<i64>(rem, inventory[k - 1][i]);
        if (cap <= 0) continue;
        cand.at(k, i) += cap;
        rem -= cap;
        cost += c * double(cap);
        used[k] = 1;
      }
    }
    int used_count = 0;
    for (int k = 0; k <= K; ++k)
      if (used[k]) {
        cost += fixed_costs[k];
        ++used_count;
      }
    (void)used_count;
    int count = (int)subset.size();
    bool better;
    if (!have_best || cost < best_cost) {
      better = true;
    } else if (cost > best_cost) {
      better = false;
    } else if (count != best_count) {
      better = count < best_count;
    } else if (subset != best_subset) {
      better = subset_less(subset, best_subset);
    } else {
      better = std::lexicographical_compare(cand.q.begin(), cand.q.end(),
                                            best_plan.q.begin(),
                                            best_plan.q.end());
    }
    if (better) {
      have_best = true;
      best_cost = cost;
      best_count = count;
      best_subset = subset;
      best_plan = cand;
    }
  };

  std::vector<int> sorted_chosen;
  std::function<void(int, double)> dfs = [&](int idx, double sunk) {
    if (have_best && sunk > best_cost) return;  // fixed cost alone already worse
    if (idx == K + 1) {
      if (chosen.empty()) return;
      sorted_chosen = chosen;
      std::sort(sorted_chosen.begin(), sorted_chosen.end());
      evaluate(sorted_chosen);
      return;
    }
    int k = dcs[idx];
    chosen.push_back(k);
    dfs(idx + 1, sunk + fixed_costs[k]);
    chosen.pop_back();
    dfs(idx + 1, sunk);
  };
  dfs(0, 0.0);
  return best_plan;
}

namespace {

class MyopicPolicy : public Policy {
 public:
  const char* id() const override { return "myopic"; }
  void begin(const InstanceHeader& h, std::uint64_t) override {
    if (h.K > limits_.max_K)
      throw ConfigError("myopic: K exceeds the activation enumeration limit");
    h_ = h;
  }
  void decide(int, const std::vector<i64>& order,
              const std::vector<std::vector<double>>& cost_col,
              const InventoryState& inv, Plan& out, StepInfo& info) override {
    out = myopic_decide(order, inv.levels, cost_col, h_.fixed_costs, limits_);
    info.gated = false;
  }

 private:
  InstanceHeader h_;
  MyopicLimits limits_;
};

}  // namespace

std::unique_ptr<Policy> make_myopic_policy() {
  return std::make_unique<MyopicPolicy>();
}

// ---- aggregate LP ---------------------------------------------------------

AggregateLp build_aggregate_lp(const OrderTypeDistribution& dist,
                               const std::vector<double>& fixed_costs,
                               const std::vector<std::vector<double>>& costs,
                               const std::vector<std::vector<i64>>& inventory,
                               double T) {
  const int K = (int)inventory.size();
  const int n = K > 0 ? (int)inventory[0].size() : (int)costs.at(0).size();
  if ((int)fixed_costs.size() != K + 1 || (int)costs.size() != K + 1)
    throw ConfigError("aggregate LP: fixed costs / cost matrix shape mismatch");
  if (dist.types.size() != dist.probs.size())
    throw ConfigError("aggregate LP: type and probability counts differ");
  double total_p = 0;
  for (double p : dist.probs) {
    if (p < 0) throw ConfigError("aggregate LP: negative type probability");
    total_p += p;
  }
  if (std::fabs(total_p - 1.0) > 1e-12)
    throw ConfigError("aggregate LP: type probabilities must sum to 1");

  AggregateLp lp;
  lp.n = n;
  lp.K = K;
  lp.T = T;
  lp.lambda = dist.probs;
  lp.types.reserve(dist.types.size());
  lp.blocks.reserve(dist.types.size());

  for (size_t qi = 0; qi < dist.types.size(); ++qi) {
    std::vector<int> items = dist.types[qi];
    std::sort(items.begin(), items.end());
    if (items.empty()) throw ConfigError("aggregate LP: empty order type");
    for (size_t p = 0; p < items.size(); ++p) {
      if (items[p] < 0 || items[p] >= n)
        throw ConfigError("aggregate LP: order type lists an unknown item");
      if (p > 0 && items[p] == items[p - 1])
        throw ConfigError("aggregate LP: order types must be binary (no repeats)");
    }
    const int sz = (int)items.size();
    const double lam = dist.probs[qi];
    LpProblem block;
    block.num_vars = sz * (K + 1) + (K + 1);
    block.objective.assign(block.num_vars, 0.0);
    auto xvar = [&](int pos, int k) { return pos * (K + 1) + k; };
    auto yvar = [&](int k) { return sz * (K + 1) + k; };
    for (int pos = 0; pos < sz; ++pos)
      for (int k = 0; k <= K; ++k)
        block.objective[xvar(pos, k)] = T * lam * costs[k][items[pos]];
    for (int k = 0; k <= K; ++k)
      block.objective[yvar(k)] = T * lam * fixed_costs[k];
    for (int pos = 0; pos < sz; ++pos) {
      LpRow assign;
      assign.relation = '=';
      assign.rhs = 1.0;
      for (int k = 0; k <= K; ++k) assign.coeffs.push_back({xvar(pos, k), 1.0});
      block.rows.push_back(std::move(assign));
      for (int k = 1; k <= K; ++k) {
        LpRow cap;
        cap.relation = '<';
        cap.rhs = double(inventory[k - 1][items[pos]]);
        cap.coeffs.push_back({xvar(pos, k), T * lam});
        block.rows.push_back(std::move(cap));
      }
      for (int k = 0; k <= K; ++k) {
        LpRow link;  // x <= y
        link.relation = '<';
        link.rhs = 0.0;
        link.coeffs.push_back({xvar(pos, k), 1.0});
        link.coeffs.push_back({yvar(k), -1.0});
        block.rows.push_back(std::move(link));
      }
    }
    lp.types.push_back(std::move(items));
    lp.blocks.push_back(std::move(block));
  }
  return lp;
}

LpSolution solve_lp(const AggregateLp& lp) {
  LpSolution sol;
  sol.x.resize(lp.blocks.size());
  sol.y.resize(lp.blocks.size());
  for (size_t qi = 0; qi < lp.blocks.size(); ++qi) {
    SimplexResult r = solve_simplex(lp.blocks[qi]);
    sol.iterations += r.iterations;
    sol.max_residual = std::max(sol.max_residual, r.max_residual);
    if (r.status != LpStatus::optimal) {
      sol.status = r.status;
      sol.note = "type block " + std::to_string(qi) + ": " +
                 std::string(to_string(r.status)) +
                 (r.note.empty() ? "" : "; " + r.note);
      return sol;
    }
    const int sz = (int)lp.types[qi].size();
    const int K = lp.K;
    sol.x[qi].assign(sz, std::vector<double>(K + 1, 0.0));
    sol.y[qi].assign(K + 1, 0.0);
    for (int pos = 0; pos < sz; ++pos)
      for (int k = 0; k <= K; ++k)
        sol.x[qi][pos][k] = r.values[pos * (K + 1) + k];
    for (int k = 0; k <= K; ++k) sol.y[qi][k] = r.values[sz * (K + 1) + k];
    sol.objective += r.objective;
  }
  sol.status = LpStatus::optimal;
  return sol;
}

std::string lp_solution_to_json(const LpSolution& sol) {
  nlohmann::json j;
  j["status"] = to_string(sol.status);
  j["objective"] = sol.objective;
  j["x"] = sol.x;
  j["y"] = sol.y;
  j["max_residual"] = sol.max_residual;
  j["iterations"] = sol.iterations;
  if (!sol.note.empty()) j["note"] = sol.note;
  return j.dump();
}

LpSolution lp_solution_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LpSolution sol;
  std::string st = j.at("status").get<std::string>();
  if (st == "optimal") sol.status = LpStatus::optimal;
  else if (st == "infeasible") sol.status = LpStatus::infeasible;
  else if (st == "unbounded") sol.status = LpStatus::unbounded;
  else sol.status = LpStatus::iteration_limit;
  sol.objective = j.at("objective").get<double>();
  sol.x = j.at("x").get<std::vector<std::vector<std::vector<double>>>>();
  sol.y = j.at("y").get<std::vector<std::vector<double>>>();
  sol.max_residual = j.at("max_residual").get<double>();
  sol.iterations = j.at("iterations").get<long long>();
  if (j.contains("note")) sol.note = j.at("note").get<std::string>();
  return sol;
}

Plan ipfc_decide(const std::vector<i64>& order, int q_index,
                 const AggregateLp& lp, const LpSolution& sol,
                 const std::vector<std::vector<i64>>& inventory, Rng& rng,
                 bool* fallback) {
  const int K = lp.K;
  const int n = lp.n;
  Plan plan(K, n);
  bool fb = false;
  if (q_index < 0) {
    // order is not a known type: whole order to the RDC
    for (int i = 0; i < n; ++i) {
      if (order[i] > 0) {
        plan.at(0, i) = order[i];
        fb = true;
      }
    }
  } else {
    const auto& items = lp.types[q_index];
    for (size_t pos = 0; pos < items.size(); ++pos) {
      int i = items[pos];
      double u = rng.u01();
      double acc = 0;
      int pick = 0;  // numerical slop lands on the RDC
      for (int k = 0; k <= K; ++k) {
        acc += sol.x[q_index][pos][k];
        if (u < acc) {
          pick = k;
          break;
        }
      }
      if (pick >= 1 && inventory[pick - 1][i] < 1) {
        pick = 0;  // stockout repair
        fb = true;
      }
      plan.at(pick, i) = 1;
    }
  }
  if (fallback) *fallback = fb;
  return plan;
}

namespace {

// Replications of one experiment share the instance header, so LP solves are
// cached process-wide on the exact inputs.
std::mutex lp_cache_mutex;
std::unordered_map<std::string, std::shared_ptr<const LpSolution>> lp_cache;

std::string lp_cache_key(const InstanceHeader& h) {
  nlohmann::json j;
  j["T"] = h.T;
  j["fixed"] = h.fixed_costs;
  j["costs"] = h.invariant_costs;
  j["inventory"] = h.inventory0;
  j["types"] = h.distribution->types;
  j["probs"] = h.distribution->probs;
  return j.dump();
}

class IpfcPolicy : public Policy {
 public:
  const char* id() const override { return "ipfc"; }

  void begin(const InstanceHeader& h, std::uint64_t seed) override {
    if (h.regime != CostRegime::invariant)
      throw ConfigError("ipfc: needs time-invariant costs");
    if (!h.distribution)
      throw ConfigError("ipfc: needs the order-type distribution");
    if (h.T <= 0) throw ConfigError("ipfc: needs a known horizon");
    if ((int)h.invariant_costs.size() != h.K + 1)
      throw ConfigError("ipfc: header is missing the invariant cost matrix");
    h_ = h;
    lp_ = build_aggregate_lp(*h.distribution, h.fixed_costs, h.invariant_costs,
                             h.inventory0, double(h.T));
    std::string key = lp_cache_key(h);
    {
      std::lock_guard<std::mutex> lock(lp_cache_mutex);
      auto it = lp_cache.find(key);
      if (it != lp_cache.end()) sol_ = it->second;
    }
    if (!sol_) {
      auto solved = std::make_shared<LpSolution>(solve_lp(lp_));
      std::lock_guard<std::mutex> lock(lp_cache_mutex);
      sol_ = lp_cache.emplace(key, std::move(solved)).first->second;
    }
    if (sol_->status != LpStatus::optimal)
      throw ConfigError("ipfc: aggregate LP did not solve to optimality (" +
                        sol_->note + ")");
    type_index_.clear();
    for (size_t qi = 0; qi < lp_.types.size(); ++qi)
      type_index_.emplace(lp_.types[qi], (int)qi);  // first duplicate wins
    rng_ = substream(seed, kStreamRounding);
  }

  void decide(int, const std::vector<i64>& order,
              const std::vector<std::vector<double>>&, const InventoryState& inv,
              Plan& out, StepInfo& info) override {
    lookup_.clear();
    bool binary = true;
    for (int i = 0; i < h_.n; ++i) {
      if (order[i] > 0) lookup_.push_back(i);
      if (order[i] > 1) binary = false;
    }
    int q = -1;
    if (binary && !lookup_.empty()) {
      auto it = type_index_.find(lookup_);
      if (it != type_index_.end()) q = it->second;
    }
    bool fb = false;
    out = ipfc_decide(order, q, lp_, *sol_, inv.levels, rng_, &fb);
    info.fallback = fb;
    info.gated = false;
  }

 private:
  InstanceHeader h_;
  AggregateLp lp_;
  std::shared_ptr<const LpSolution> sol_;
  std::map<std::vector<int>, int> type_index_;
  std::vector<int> lookup_;
  Rng rng_;
};

}  // namespace

std::unique_ptr<Policy> make_ipfc_policy() {
  return std::make_unique<IpfcPolicy>();
}

}  // namespace fulfill
