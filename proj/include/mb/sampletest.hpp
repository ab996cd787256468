#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mb/dist.hpp"

namespace mb {

// Statistical check of the sampler guarantees: draw m samples from a known
// truth, build the optimistic estimate, and count how often the promised
// event {dominance and closeness} fails.
struct SampleTestConfig {
  std::vector<double> support;
  std::vector<double> weights;  // normalized to a pmf
  double delta = 0.1;
  std::vector<std::size_t> m_values{16, 64, 256};
  std::size_t trials = 2000;
  std::uint64_t seed = 7;
};

struct VariantReport {
  std::string variant;  // up | down | cts | censored | binary
  std::vector<std::pair<std::size_t, double>> rates;  // (m, failure rate)
  bool pass = false;  // every rate <= delta * 1.2
};

// Failure rates of the plain dominating construction (event: output
// dominates truth and tv <= k * eps).  trials must be >= 100 / delta.
std::vector<double> sampling_failure_rates(const DiscreteDist& truth,
                                           const std::vector<std::size_t>& m_values,
                                           double delta, std::size_t trials,
                                           std::uint64_t seed = 7);

// All five feedback variants on the same truth.  Censored/binary assign
// sample j the threshold level (j mod k) + 1; their closeness checks are
// per probed level against the truncated / indicator compressions.
std::vector<VariantReport> sampling_guarantee_test(const SampleTestConfig& cfg);

}  // namespace mb
