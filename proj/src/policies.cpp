#include "fulfill/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fulfill/baselines.hpp"

namespace fulfill {

double theta_default(double f0, double fmin, double a, double b) {
  if (!(a > 0)) throw std::domain_error("theta_default: a must be positive");
  double half = (fmin - b) / (2 * a);
  return std::sqrt(f0 / a + half * half) - half;
}

double randomized_gate_probability(double x, double f0, double f1) {
  if (!(f0 > 0) || !(f1 > 0))
    throw std::domain_error("randomized_gate_probability: fixed costs must be positive");
  if (x <= f1) return 1.0;
  double upper = std::max(f1, f1 * f1 / f0 - f0);
  if (x > upper) return 0.0;
  // f1 < x <= upper (only reachable when the middle region is nonempty)
  return (f1 * f1 - (f0 + x) * f0) / (f1 * f1 + (f0 + x) * (x - f1));
}

BetterOfTwoChoice better_of_two_select(double f0, double f1, double a, double b) {
  if (!(a > 0) || !(b >= a))
    throw std::domain_error("better_of_two_select: need 0 < a <= b");
  BetterOfTwoChoice out;
  bool pick_cc = f0 <= f1;
  if (!pick_cc) {
    double lhs = 1 + std::max(f0 / f1, std::sqrt(b / a));
    double rhs = (4 + std::sqrt(2.0)) *
                 std::max(std::sqrt(f0 / (2 * a)), std::sqrt(b / a));
    pick_cc = lhs <= rhs;
  }
  if (pick_cc) {
    out.algorithm = "cost-comparison-adjv-priority";
    out.eta = std::sqrt(b / a);
  } else {
    out.algorithm = "order-size-adjv-priority";
    out.eta = std::sqrt(std::max(f0 / 2, b) / a);
    out.theta = f0 / (2 * a * out.eta);
  }
  return out;
}

GatedGreedyPolicy::GatedGreedyPolicy(std::string id, RuleKind rule,
                                     GateKind gate, GateTarget target)
    : id_(std::move(id)), rule_(rule), gate_(gate), target_(target) {}

void GatedGreedyPolicy::set_explicit_ranking(std::vector<std::vector<int>> pref) {
  explicit_pref_ = std::move(pref);
}

void GatedGreedyPolicy::begin(const InstanceHeader& h, std::uint64_t seed) {
  h_ = h;
  const int K = h.K, n = h.n;
  if (n <= 0 || K < 0 || (int)h.fixed_costs.size() != K + 1)
    throw ConfigError(id_ + ": malformed instance header");
  const double f0 = h.fixed_costs[0];

  if (rule_ == RuleKind::variable_cost ||
      gate_ == GateKind::randomized_cost_comparison) {
    if (h.regime != CostRegime::invariant)
      throw ConfigError(id_ + ": variable-cost ranking needs time-invariant costs");
    if ((int)h.invariant_costs.size() != K + 1)
      throw ConfigError(id_ + ": header is missing the invariant cost matrix");
  }
  if (rule_ == RuleKind::adjusted_variable_cost && K != 1)
    throw ConfigError(id_ + ": adjusted-variable-cost ranking needs exactly one FDC");
  if (gate_ == GateKind::randomized_cost_comparison) {
    if (K != 1) throw ConfigError(id_ + ": randomized gate needs exactly one FDC");
    if (!(f0 > 0) || !(h.fixed_costs[1] > 0))
      throw ConfigError(id_ + ": randomized gate needs positive fixed costs");
  }
  if (rule_ == RuleKind::adjusted_variable_cost && h.regime == CostRegime::invariant &&
      (int)h.invariant_costs.size() != K + 1)
    throw ConfigError(id_ + ": header is missing the invariant cost matrix");

  // eta first (order-size-adjv's default theta depends on it)
  eta_ = 1.0;
  if (rule_ == RuleKind::adjusted_variable_cost) {
    if (eta_override_) {
      eta_ = *eta_override_;
    } else {
      if (!h.cost_bounds)
        throw ConfigError(id_ + ": needs cost_bounds to derive the adjustment factor");
      auto [a, b] = *h.cost_bounds;
      if (!(a > 0)) throw ConfigError(id_ + ": cost_bounds need a > 0");
      eta_ = target_ == GateTarget::fdc ? std::sqrt(std::max(f0 / 2, b) / a)
                                        : std::sqrt(b / a);
    }
    if (!(eta_ >= 1.0))
      throw ConfigError(id_ + ": adjustment factor must be >= 1");
  }

  theta_ = 0;
  if (gate_ == GateKind::order_size) {
    if (theta_override_) {
      theta_ = *theta_override_;
    } else if (target_ == GateTarget::fdc) {
      if (!h.cost_bounds)
        throw ConfigError(id_ + ": needs cost_bounds to derive theta");
      theta_ = f0 / (2 * h.cost_bounds->first * eta_);
    } else if (K == 0) {
      theta_ = 0;  // degenerate: no FDCs, everything routes to the RDC anyway
    } else {
      if (!h.cost_bounds)
        throw ConfigError(id_ + ": needs cost_bounds to derive theta");
      double fmin = h.fixed_costs[1];
      for (int k = 2; k <= K; ++k) fmin = std::min(fmin, h.fixed_costs[k]);
      theta_ = theta_default(f0, fmin, h.cost_bounds->first, h.cost_bounds->second);
    }
    if (!(theta_ >= 0)) throw ConfigError(id_ + ": theta must be >= 0");
  }

  if (rule_ == RuleKind::explicit_order && !explicit_pref_.empty()) {
    if ((int)explicit_pref_.size() != n)
      throw ConfigError(id_ + ": explicit ranking needs one entry per item");
    for (const auto& lst : explicit_pref_) {
      std::vector<char> seen(K + 1, 0);
      for (int k : lst) {
        if (k < 1 || k > K || seen[k])
          throw ConfigError(id_ + ": explicit ranking lists an invalid FDC");
        seen[k] = 1;
      }
    }
  }

  time_dependent_ = rule_ == RuleKind::adjusted_variable_cost &&
                    h.regime == CostRegime::varying;
  gate_rng_ = substream(seed, kStreamGate);

  build_static_ranking();
  rebuild_links();
  proposal_ = Plan(K, n);
  touched_cells_.clear();
  dc_active_.assign(K + 1, 0);
  touched_dcs_.clear();
}

void GatedGreedyPolicy::build_static_ranking() {
  const int n = h_.n, K = h_.K;
  pref_.assign(n, {});
  if (time_dependent_) return;
  switch (rule_) {
    case RuleKind::fixed_cost: {
      // same ranking for every item; FDCs tied with the RDC lose to it
      std::vector<int> shared;
      for (int k = 1; k <= K; ++k)
        if (h_.fixed_costs[k] < h_.fixed_costs[0]) shared.push_back(k);
      std::sort(shared.begin(), shared.end(), [&](int x, int y) {
        if (h_.fixed_costs[x] != h_.fixed_costs[y])
          return h_.fixed_costs[x] < h_.fixed_costs[y];
        return x < y;
      });
      for (int i = 0; i < n; ++i) pref_[i] = shared;
      break;
    }
    case RuleKind::variable_cost:
    case RuleKind::adjusted_variable_cost: {
      const auto& c = h_.invariant_costs;
      for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= K; ++k) {
          bool before_rdc = rule_ == RuleKind::variable_cost
                                ? c[k][i] < c[0][i]
                                : c[k][i] < c[0][i] / eta_;
          if (before_rdc) pref_[i].push_back(k);
        }
        std::sort(pref_[i].begin(), pref_[i].end(), [&](int x, int y) {
          if (c[x][i] != c[y][i]) return c[x][i] < c[y][i];
          return x < y;
        });
      }
      break;
    }
    case RuleKind::explicit_order:
      if (!explicit_pref_.empty()) pref_ = explicit_pref_;
      break;
  }
}

void GatedGreedyPolicy::rebuild_links() {
  const int n = h_.n;
  head_.assign(n, -1);
  next_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    int len = (int)pref_[i].size();
    if (len == 0) continue;
    head_[i] = 0;
    next_[i].resize(len);
    for (int j = 0; j < len; ++j) next_[i][j] = j + 1 < len ? j + 1 : -1;
  }
}

double GatedGreedyPolicy::build_proposal(
    const std::vector<i64>& order,
    const std::vector<std::vector<double>>& cost_col,
    const InventoryState& inv) {
  for (size_t idx : touched_cells_) proposal_.q[idx] = 0;
  touched_cells_.clear();
  for (int k : touched_dcs_) dc_active_[k] = 0;
  touched_dcs_.clear();

  const int n = h_.n;
  double cost = 0;
  auto ship = [&](int k, int i, i64 m, double c) {
    proposal_.q[size_t(k) * n + i] = m;
    touched_cells_.push_back(size_t(k) * n + i);
    if (!dc_active_[k]) {
      dc_active_[k] = 1;
      touched_dcs_.push_back(k);
      cost += h_.fixed_costs[k];
    }
    cost += c * double(m);
  };

  for (int i = 0; i < n; ++i) {
    i64 rem = order[i];
    if (rem == 0) continue;
    if (time_dependent_) {
      // single FDC, ranked per period: FDC first iff c_1 < c_0/eta (strict)
      if (cost_col[1][i] < cost_col[0][i] / eta_) {
        i64 m = std::min(rem, inv.levels[0][i]);
        if (m > 0) {
          ship(1, i, m, cost_col[1][i]);
          rem -= m;
        }
      }
    } else {
      int* prev = &head_[i];
      int j = *prev;
      while (j != -1 && rem > 0) {
        int k = pref_[i][j];
        i64 avail = inv.levels[k - 1][i];
        if (avail == 0) {  // depleted for good; unlink so we never rescan it
          *prev = next_[i][j];
          j = *prev;
          continue;
        }
        i64 m = std::min(rem, avail);
        ship(k, i, m, cost_col[k][i]);
        rem -= m;
        prev = &next_[i][j];
        j = *prev;
      }
    }
    if (rem > 0) ship(0, i, rem, cost_col[0][i]);
  }
  return cost;
}

void GatedGreedyPolicy::decide(int t, const std::vector<i64>& order,
                               const std::vector<std::vector<double>>& cost_col,
                               const InventoryState& inv, Plan& out,
                               StepInfo& info) {
  (void)t;
  const int n = h_.n, K = h_.K;
  if (out.K != K || out.n != n) {
    out.K = K;
    out.n = n;
    out.q.assign(size_t(K + 1) * n, 0);
  }
  i64 total = 0;
  for (int i = 0; i < n; ++i) total += order[i];
  if (total == 0) return;  // empty order: no gating, no draw, zero plan

  double prop_cost = build_proposal(order, cost_col, inv);
  info.proposal = &proposal_;

  bool g = false;
  switch (gate_) {
    case GateKind::none:
      break;
    case GateKind::order_size: {
      bool oversize = double(total) > theta_;
      if (target_ == GateTarget::rdc) {
        g = oversize;
      } else {
        bool covered = true;
        for (int i = 0; i < n && covered; ++i)
          covered = inv.levels[0][i] >= order[i];
        g = !oversize && covered;
      }
      break;
    }
    case GateKind::cost_comparison: {
      double rdc_only = h_.fixed_costs[0];
      for (int i = 0; i < n; ++i)
        if (order[i] > 0) rdc_only += cost_col[0][i] * double(order[i]);
      g = prop_cost > rdc_only;  // strict: ties keep the greedy plan
      break;
    }
    case GateKind::randomized_cost_comparison: {
      double x = 0;
      for (size_t idx : touched_cells_) {
        if (idx < size_t(n)) continue;  // RDC row
        int i = int(idx - size_t(n));
        x += (cost_col[0][i] - cost_col[1][i]) * double(proposal_.q[idx]);
      }
      double p = randomized_gate_probability(x, h_.fixed_costs[0], h_.fixed_costs[1]);
      g = gate_rng_.bernoulli(p);  // exactly one draw per non-empty period
      break;
    }
  }
  info.gated = g;

  if (!g) {
    for (size_t idx : touched_cells_) out.q[idx] = proposal_.q[idx];
    return;
  }
  int dest = target_ == GateTarget::rdc ? 0 : 1;
  for (int i = 0; i < n; ++i)
    if (order[i] > 0) out.q[size_t(dest) * n + i] = order[i];
}

std::vector<std::vector<int>> GatedGreedyPolicy::fdc_preference() const {
  if (time_dependent_) return {};
  return pref_;
}

void BetterOfTwoPolicy::begin(const InstanceHeader& h, std::uint64_t seed) {
  if (h.K != 1) throw ConfigError("better-of-two: needs exactly one FDC");
  if (!h.cost_bounds) throw ConfigError("better-of-two: needs cost_bounds");
  auto [a, b] = *h.cost_bounds;
  choice_ = better_of_two_select(h.fixed_costs[0], h.fixed_costs[1], a, b);
  if (choice_.algorithm == "cost-comparison-adjv-priority") {
    inner_ = std::make_unique<GatedGreedyPolicy>(
        choice_.algorithm, RuleKind::adjusted_variable_cost,
        GateKind::cost_comparison, GateTarget::rdc);
  } else {
    inner_ = std::make_unique<GatedGreedyPolicy>(
        choice_.algorithm, RuleKind::adjusted_variable_cost,
        GateKind::order_size, GateTarget::fdc);
    inner_->set_eta(choice_.eta);
    inner_->set_theta(choice_.theta);
  }
  inner_->begin(h, seed);
}

void BetterOfTwoPolicy::decide(int t, const std::vector<i64>& order,
                               const std::vector<std::vector<double>>& cost_col,
                               const InventoryState& inv, Plan& out,
                               StepInfo& info) {
  inner_->decide(t, order, cost_col, inv, out, info);
}

std::vector<std::vector<int>> BetterOfTwoPolicy::fdc_preference() const {
  return inner_ ? inner_->fdc_preference() : std::vector<std::vector<int>>{};
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec) {
  const std::string& name = spec.name;
  std::unique_ptr<GatedGreedyPolicy> p;
  if (name == "order-size-f-priority") {
    p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::fixed_cost,
                                            GateKind::order_size, GateTarget::rdc);
  } else if (name == "cost-comparison-v-priority") {
    p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::variable_cost,
                                            GateKind::cost_comparison,
                                            GateTarget::rdc);
  } else if (name == "cost-comparison-adjv-priority") {
    p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::adjusted_variable_cost,
                                            GateKind::cost_comparison,
                                            GateTarget::rdc);
  } else if (name == "order-size-adjv-priority") {
    p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::adjusted_variable_cost,
                                            GateKind::order_size, GateTarget::fdc);
  } else if (name == "randomized-cc-v-priority") {
    p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::variable_cost,
                                            GateKind::randomized_cost_comparison,
                                            GateTarget::rdc);
  } else if (name == "better-of-two") {
    return std::make_unique<BetterOfTwoPolicy>();
  } else if (name == "pure-greedy") {
    if (spec.greedy_rule == "f-priority") {
      p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::fixed_cost,
                                              GateKind::none, GateTarget::rdc);
    } else if (spec.greedy_rule == "v-priority") {
      p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::variable_cost,
                                              GateKind::none, GateTarget::rdc);
    } else {
      throw ConfigError("pure-greedy: unknown greedy_rule '" + spec.greedy_rule + "'");
    }
  } else if (name == "all-rdc") {
    // explicit ranking with no FDCs before the RDC for any item
    p = std::make_unique<GatedGreedyPolicy>(name, RuleKind::explicit_order,
                                            GateKind::none, GateTarget::rdc);
  } else if (name == "myopic") {
    return make_myopic_policy();
  } else if (name == "ipfc") {
    return make_ipfc_policy();
  } else {
    throw ConfigError("unknown policy '" + name + "'");
  }
  if (spec.theta) p->set_theta(*spec.theta);
  if (spec.eta) p->set_eta(*spec.eta);
  return p;
}

}  // namespace fulfill
