#pragma once

#include <memory>

#include "mb/problems.hpp"

namespace mb {

// Explicit decision tree: children pair each observation class of the probe
// with its probability, the payoff delta earned on that branch, and the
// subtree.
struct OracleNode {
  Action action;
  struct Child {
    double observation = 0.0;
    double prob = 0.0;
    double reward = 0.0;
    std::unique_ptr<OracleNode> node;
  };
  std::vector<Child> children;
};

struct OracleResult {
  double optimum = 0.0;
  std::unique_ptr<OracleNode> policy;
  std::size_t state_count = 0;
};

// Exhaustive-action optimum, written independently of the fast solvers:
// memoized search over the full probe/offer/stop space.  Meant for small
// instances; throws StateBudgetExceeded when the space outgrows the budget.
OracleResult brute_force_opt(const InstanceSpec& inst, const ProductDist& dist,
                             std::size_t state_budget = default_state_budget());

// Evaluate an explicit oracle tree (cross-check that the recorded policy
// really attains the recorded optimum).
double tree_value(const OracleNode* node);

// Replace the truth d by the itemwise-dominating e and confirm the optimum
// moves the declared direction (up-monotone: down or equal; down-monotone:
// up or equal).  Optima come from brute_force_opt.
bool check_monotonicity(const InstanceSpec& inst, const ProductDist& d,
                        const ProductDist& e, double slack = 1e-9);

struct StabilityReport {
  bool ok = false;
  double gap = 0.0;    // alpha-regret of sigma under d
  double bound = 0.0;  // f_max * sum over probes of probability * distance
};

// Simulation bound for a policy sigma computed from the optimistic estimate
// e but run under the truth d: the alpha-regret is at most f_max times the
// probe-probability-weighted estimation distances.  Distances are total
// variation, taken per probed threshold level (censored: truncated
// distributions, binary: the threshold indicator).
StabilityReport check_stability(
    const InstanceSpec& inst, const ProductDist& d, const ProductDist& e,
    double alpha, const Policy& sigma,
    std::size_t state_budget = default_state_budget());

}  // namespace mb
