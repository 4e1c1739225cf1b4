#pragma once
// Instance generation (stochastic and adversarial families) and the JSON
// instance file format.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fulfill/model.hpp"

namespace fulfill {

struct StochasticConfig {
  int n = 50, K = 10, T = 2000;
  double f0 = 50, f_fdc = 5;
  double a = 8, b = 30;
  std::vector<int> order_sizes = {1, 2, 3, 10, 15, 20};
  std::vector<int> type_counts = {50, 50, 30, 20, 20, 10};
  std::vector<double> size_probs = {0.4, 0.2, 0.1, 0.1, 0.1, 0.1};
  double tau = 0.2;  // inventory scale
  CostRegime regime = CostRegime::varying;
};

// Draws order types, costs, inventories, and T periods of orders from the
// instance substream of `seed`.  Deterministic given (cfg, seed).
Instance gen_stochastic(const StochasticConfig& cfg, std::uint64_t seed);

// Adversarial families, by id:
//   example-1            {"M": int}
//   thm2-pair            {"n", "f", "f0", "a", "K"?: 1, "variant": "I1"|"I2"}
//   thm2-varying-pair    {"N", "a", "b", "K"?: 2, "f0"?, "f"?, "variant"}
//   thm5-table           {"s", "d", "n", "K", "c0"?, "c1"?, "c2"?, "f0"?, "f"?, "variant"}
//   thm7-pair            {"N", "a", "b", "f0"?, "f1"?, "variant"}
//   thm8/10-pair         {"M"?, "N"?, "eps"?, "f0"?, "f1"?, "variant"}
//   stress               {"f0": double}
// Pair families default to variant I1.  Instances carry their analytic
// optimum (exact or upper bound) in meta.  Throws ConfigError on unknown
// families or parameters outside a family's stated regime.
Instance gen_adversarial(const std::string& family, const std::string& params_json);

// All variants of a family (simple families yield one instance, paired two).
std::vector<Instance> gen_adversarial_family(const std::string& family,
                                             const std::string& params_json);

struct ParseError : std::runtime_error {
  std::string pointer;  // JSON pointer to the offending element
  ParseError(std::string ptr, const std::string& msg)
      : std::runtime_error(msg + " (at " + (ptr.empty() ? "/" : ptr) + ")"),
        pointer(std::move(ptr)) {}
};

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
void write_instance(const Instance& inst, const std::string& path);
Instance read_instance(const std::string& path);

}  // namespace fulfill
