#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mb/problems.hpp"
#include "mb/sampling.hpp"

namespace mb {

// Per-item observation history, bucketed the way the samplers consume it.
// Counts are maintained incrementally so building round-t estimates costs
// O(k) per item, not O(t).
class SampleStore {
 public:
  SampleStore(Feedback mode, std::vector<std::vector<double>> supports);

  void record(const ExecutionTrace& trace);

  // Optimistic per-item estimates from everything recorded so far.
  ProductDist estimates(Optimism opt, double delta) const;

  // Plain empirical estimates for the commit step of explore-then-commit.
  // Censored mode uses only uncensored (top-level) probes; binary mode uses
  // monotonized per-level tail frequencies.  Items with no usable data fall
  // back to the optimistic prior for `opt`.
  ProductDist empirical(Optimism opt) const;

  std::int64_t probes(std::size_t item) const { return probes_[item]; }
  // Raw full observations of one item (semi-bandit mode only; feeds the
  // continuous-range sampler).
  const std::vector<double>& raw(std::size_t item) const { return raw_[item]; }

 private:
  Feedback mode_;
  std::vector<std::vector<double>> supports_;
  std::vector<std::vector<double>> raw_;
  std::vector<std::vector<std::int64_t>> counts_;  // semi-bandit, per value
  // censored: [item][level-1][value index <= level-1]
  std::vector<std::vector<std::vector<std::int64_t>>> censored_;
  // binary: [item][level-1] = {successes, trials}
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> binary_;
  std::vector<std::int64_t> probes_;
};

struct RoundRecord {
  int t = 0;
  double expected_payoff = 0.0;
  bool expected_is_mc = false;
  double realized_payoff = 0.0;
  int probes = 0;
  double regret_increment = 0.0;
  double realized_regret_increment = 0.0;
  double wall_ms = 0.0;  // zero unless timing was requested
};

struct RunConfig {
  double delta = 0.0;            // 0: default schedule for the feedback mode
  std::size_t state_budget = 0;  // 0: default_state_budget()
  std::size_t mc_samples = 20000;
  double alpha = 1.0;
  bool timing = false;
  // extra invariant checking each round (dominance => optimism/stability);
  // slow, meant for tests
  bool debug_checks = false;
};

struct RunResult {
  std::vector<RoundRecord> rounds;
  double opt = 0.0;  // per-round benchmark value (alpha applied separately)
  bool opt_is_mc = false;
};

// delta = 2/(nT)^3 under semi-bandit feedback, 2/(knT)^3 (k = largest
// support size) under censored/binary.
double default_delta(const InstanceSpec& inst, int horizon);

RunResult run_online(const InstanceSpec& inst, int horizon, std::uint64_t seed,
                     const RunConfig& cfg = {});
// explore_per_item = 0 picks ceil(T^(2/3)).
RunResult run_etc(const InstanceSpec& inst, int horizon, int explore_per_item,
                  std::uint64_t seed, const RunConfig& cfg = {});
RunResult run_clairvoyant(const InstanceSpec& inst, int horizon,
                          std::uint64_t seed, const RunConfig& cfg = {});

std::vector<std::pair<int, double>> cumulative_regret(
    const std::vector<RoundRecord>& rounds);

}  // namespace mb
