#pragma once
// Gated priority-based greedy policies.
//
// All of these share one skeleton: rank the DCs per item, fill greedily down
// the ranking (the RDC truncates it), then let a gating condition decide
// whether to throw the greedy plan away and route the whole order to a single
// DC instead.  The named instantiations differ only in ranking and gate.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fulfill/model.hpp"
#include "fulfill/rng.hpp"

namespace fulfill {

enum class RuleKind { fixed_cost, variable_cost, adjusted_variable_cost, explicit_order };
enum class GateKind { order_size, cost_comparison, randomized_cost_comparison, none };
enum class GateTarget { rdc, fdc };

// Order-size threshold that equalizes the first two terms of the ratio
// guarantee: sqrt(f0/a + (fmin-b)^2/(4a^2)) - (fmin-b)/(2a).  fmin is the
// cheapest FDC fixed cost.  Throws std::domain_error when a <= 0.
double theta_default(double f0, double fmin, double a, double b);

// Gate probability for the randomized cost-comparison policy.  x is the
// variable-cost saving the greedy plan extracts from the FDC.  Piecewise:
// 1 on [0, f1]; (f1^2-(f0+x)f0)/(f1^2+(f0+x)(x-f1)) up to
// max{f1, f1^2/f0 - f0}; 0 beyond.  Throws std::domain_error unless
// f0, f1 > 0.
double randomized_gate_probability(double x, double f0, double f1);

struct PolicySpec {
  std::string name = "pure-greedy";
  // Optional overrides; when absent the named policy derives its defaults
  // from (f_0, f_k, a, b) at begin().
  std::optional<double> theta;
  std::optional<double> eta;
  std::string greedy_rule = "f-priority";  // pure-greedy: f-priority | v-priority
};

// Static selection between the two single-FDC policies, from the fixed costs
// and the cost bounds.  When the order-size variant wins, carries its (eta,
// theta) recommendation.
struct BetterOfTwoChoice {
  std::string algorithm;  // "cost-comparison-adjv-priority" | "order-size-adjv-priority"
  double eta = 1.0;
  double theta = 0.0;
};
BetterOfTwoChoice better_of_two_select(double f0, double f1, double a, double b);

class GatedGreedyPolicy : public Policy {
 public:
  GatedGreedyPolicy(std::string id, RuleKind rule, GateKind gate,
                    GateTarget target);

  const char* id() const override { return id_.c_str(); }
  void begin(const InstanceHeader& h, std::uint64_t seed) override;
  void decide(int t, const std::vector<i64>& order,
              const std::vector<std::vector<double>>& cost_col,
              const InventoryState& inv, Plan& out, StepInfo& info) override;
  std::vector<std::vector<int>> fdc_preference() const override;

  RuleKind rule_kind() const { return rule_; }
  GateKind gate_kind() const { return gate_; }
  GateTarget gate_target() const { return target_; }
  double theta() const { return theta_; }
  double eta() const { return eta_; }

  // Optional overrides, applied at begin() in place of the derived defaults.
  void set_theta(double theta) { theta_override_ = theta; }
  void set_eta(double eta) { eta_override_ = eta; }
  // explicit_order only: per item, the FDCs preceding the RDC, best first.
  void set_explicit_ranking(std::vector<std::vector<int>> pref);

 private:
  void build_static_ranking();
  void rebuild_links();
  // Fills proposal_ with the greedy quantities for this order and returns
  // their period cost (fixed charges included, RDC remainder included).
  double build_proposal(const std::vector<i64>& order,
                        const std::vector<std::vector<double>>& cost_col,
                        const InventoryState& inv);

  std::string id_;
  RuleKind rule_;
  GateKind gate_;
  GateTarget target_;
  std::optional<double> theta_override_, eta_override_;
  double theta_ = 0, eta_ = 1.0;

  InstanceHeader h_;
  Rng gate_rng_{0};
  bool time_dependent_ = false;  // adjusted-V under time-varying costs (K=1)

  // Ranking storage: pref_[i] lists FDC ids in fill order; head_/next_ carry
  // a per-item skip list so depleted FDCs are unlinked once and never
  // scanned again (keeps per-order work independent of K on long runs).
  std::vector<std::vector<int>> pref_;
  std::vector<int> head_;
  std::vector<std::vector<int>> next_;
  std::vector<std::vector<int>> explicit_pref_;

  Plan proposal_;
  std::vector<size_t> touched_cells_;  // flat plan indices written last period
  std::vector<char> dc_active_;        // per-DC "ships this period" flags
  std::vector<int> touched_dcs_;
};

// Resolves to one of the two single-FDC policies at begin() and forwards.
class BetterOfTwoPolicy : public Policy {
 public:
  const char* id() const override { return "better-of-two"; }
  void begin(const InstanceHeader& h, std::uint64_t seed) override;
  void decide(int t, const std::vector<i64>& order,
              const std::vector<std::vector<double>>& cost_col,
              const InventoryState& inv, Plan& out, StepInfo& info) override;
  std::vector<std::vector<int>> fdc_preference() const override;
  const BetterOfTwoChoice& choice() const { return choice_; }

 private:
  BetterOfTwoChoice choice_;
  std::unique_ptr<GatedGreedyPolicy> inner_;
};

// Builds any policy addressable by name: the gated-greedy family
// (order-size-f-priority, cost-comparison-v-priority,
// cost-comparison-adjv-priority, order-size-adjv-priority,
// randomized-cc-v-priority, better-of-two, pure-greedy, all-rdc) plus the
// baselines (myopic, ipfc).  Throws ConfigError on unknown names or bad
// greedy_rule.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec);

}  // namespace fulfill
