#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mb/dist.hpp"

namespace mb {

enum class Feedback { semi_bandit, censored, binary };
enum class Sense { minimize, maximize };
// How the optimum moves when every item distribution is replaced by a
// stochastically dominating one: `up` means the optimum can only drop.
enum class Direction { up, down };
enum class Optimism { dominating, dominated };

struct ProblemMeta {
  Sense sense;
  Direction direction;
  Feedback feedback;
  double f_max = 0.0;  // declared payoff bound for this instance

  // Which side of the truth an optimistic estimate must sit on.
  Optimism optimism() const {
    bool dominating = (direction == Direction::up) == (sense == Sense::minimize);
    return dominating ? Optimism::dominating : Optimism::dominated;
  }
};

// Canonical encoding of what a policy knows mid-run.  Policies must encode
// equal knowledge states as bit-identical vectors so memoization can pool
// them.
struct InfoState {
  std::vector<double> v;
  bool operator==(const InfoState&) const = default;
};

struct InfoStateHash {
  std::size_t operator()(const InfoState& s) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double d : s.v) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(d));
      __builtin_memcpy(&bits, &d, sizeof(bits));
      h ^= bits;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Action {
  enum class Kind { probe, stop };
  Kind kind = Kind::stop;
  int item = -1;   // probe target, 0-based
  int level = 0;   // threshold level, 1-based into the item's support;
                   // 0 under semi-bandit = full observation, 0 under
                   // censored/binary = null probe (consumes the item,
                   // reveals nothing)
  double payoff = 0.0;  // stop only

  static Action probe(int item, int level = 0) {
    Action a;
    a.kind = Kind::probe;
    a.item = item;
    a.level = level;
    return a;
  }
  static Action stop(double payoff) {
    Action a;
    a.kind = Kind::stop;
    a.payoff = payoff;
    return a;
  }
};

struct ProbeRecord {
  int item = -1;
  int level = 0;
  double observation = 0.0;
};

struct ExecutionTrace {
  std::vector<ProbeRecord> probed;
  double payoff = 0.0;
};

struct StateBudgetExceeded : std::runtime_error {
  StateBudgetExceeded() : std::runtime_error("state budget exceeded") {}
};

// Adaptive policy as a reward-accumulating state machine.  act() is a pure
// function of the info state; advance() consumes one observation and
// reports the additive payoff contribution of that step.  Total payoff of
// a run = sum of step deltas + the final stop payoff.
class Policy {
public:
  virtual ~Policy() = default;

  const ProblemMeta& meta() const { return meta_; }
  // Declared support of each item (thresholds for censored/binary probes).
  const std::vector<std::vector<double>>& supports() const { return supports_; }
  std::size_t n_items() const { return supports_.size(); }

  virtual InfoState initial() const = 0;
  virtual Action act(const InfoState& s) const = 0;

  struct Step {
    InfoState state;
    double payoff_delta = 0.0;
  };
  virtual Step advance(const InfoState& s, const Action& probe,
                       double obs) const = 0;

protected:
  Policy(ProblemMeta meta, std::vector<std::vector<double>> supports)
      : meta_(std::move(meta)), supports_(std::move(supports)) {}

private:
  ProblemMeta meta_;
  std::vector<std::vector<double>> supports_;
};

// What a probe at `level` reveals about raw value x under each feedback
// mode (level 0: everything for semi-bandit, nothing otherwise).
double observe(Feedback mode, const std::vector<double>& support, int level,
               double raw);

// Run the policy once against fixed item realizations.
ExecutionTrace execute(const Policy& policy,
                       const std::vector<double>& realization);

std::size_t default_state_budget();  // env MB_STATE_BUDGET, default 1e6

// Expected payoff under an independent product distribution, by memoized
// backward recursion over observation classes.  Throws StateBudgetExceeded
// if the reachable info-state space outgrows the budget.
double exact_value(const Policy& policy, const ProductDist& dist,
                   std::size_t state_budget = default_state_budget());

// Probability that each (item, level) probe happens during a run under
// `dist`.  Semi-bandit probes key as level 0; null probes as level 0 under
// censored/binary.
std::map<std::pair<int, int>, double> probe_probabilities(
    const Policy& policy, const ProductDist& dist,
    std::size_t state_budget = default_state_budget());

// Per-item probe probabilities, levels pooled.
std::vector<double> item_probe_probabilities(
    const Policy& policy, const ProductDist& dist,
    std::size_t state_budget = default_state_budget());

// Sample-mean payoff and its standard error under arbitrary ground truth.
std::pair<double, double> monte_carlo_value(
    const Policy& policy, const std::vector<TrueDistSpec>& truth,
    std::size_t n_samples, Rng rng);

}  // namespace mb
