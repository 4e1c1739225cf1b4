#pragma once
// Clairvoyant-optimum oracles and the guarantee formulas.
//
// Brute force solves tiny instances exactly (memoized DFS over periods and
// inventory states).  Adversarial-family instances instead carry analytic
// values derived from their construction, either exact or upper bounds.

#include <optional>
#include <string>
#include <vector>

#include "fulfill/model.hpp"

namespace fulfill {

enum class OptMethod { brute_force, analytic_exact, analytic_upper_bound };

const char* to_string(OptMethod m);

struct OptResult {
  double opt_cost = 0;
  OptMethod method = OptMethod::brute_force;
  std::optional<std::vector<Plan>> plan;  // per period, when requested
  long long states_expanded = 0;
  double elapsed = 0;
  bool overflow = false;  // state budget exhausted; opt_cost is meaningless
};

struct BruteForceLimits {
  long long max_states = 10'000'000;
  bool want_plan = false;
  // every Nth memo hit is re-expanded and checked against the cached value
  // (0 disables; used by the memoization-soundness tests)
  int recheck_every = 0;
};

OptResult bruteforce_opt(const Instance& inst, const BruteForceLimits& limits = {});

// Reads the instance's family annotation (exact optimum or upper bound).
// Throws ConfigError when the instance carries none.
OptResult analytic_opt(const Instance& inst);
// Generates the family instance, then reads its annotation.
OptResult analytic_opt(const std::string& family, const std::string& params_json);

struct RatioResult {
  double value = 1;
  bool lower_bound_on_ratio = false;  // denominator was only an upper bound
  bool infinite = false;              // positive cost against a zero optimum
};
RatioResult competitive_ratio(double alg_cost, const OptResult& opt);

// Inputs for bound_value; each formula validates the fields it needs.
struct BoundInputs {
  std::optional<double> f0, f1, fmin, a, b, theta, w;
  std::vector<double> fdc_fixed_costs;  // f_1..f_K, where a formula needs all
};

// Guarantee formulas by id: theorem-1, theorem-2, theorem-3, theorem-4,
// theorem-6, theorem-7, theorem-9, theorem-10, corollary-1,
// corollary-1-closed, prop-1, prop-2.  Throws ConfigError on unknown ids and
// std::domain_error on inputs outside a formula's domain.
double bound_value(const std::string& id, const BoundInputs& in);

}  // namespace fulfill
