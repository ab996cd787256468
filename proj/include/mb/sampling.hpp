#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mb/dist.hpp"

namespace mb {

// sqrt(log(2/delta) / (2m)) capped at 1; m = 0 gives the vacuous width 1.
// delta may be anything in (0, 2]; values >= 2 give width 0 (useful for
// the exact-empirical edge case).
double confidence_width(double delta, std::size_t m);
// Same with the union-bound numerator log(2k/delta).
double confidence_width_leveled(double delta, std::size_t k, std::size_t m);

// Optimistic empirical distribution from full observations: dominates the
// sampled distribution w.p. >= 1 - delta, and always dominates the plain
// empirical distribution.  Samples must sit on `support` (within 1e-9).
// With no samples, returns the prior point mass at the top of the support.
DiscreteDist emp_stoc_dom(const std::vector<double>& support,
                          const std::vector<double>& samples, double delta);

// Pessimistic mirror: dominated by the sampled distribution w.p. >= 1 -
// delta; mass moves toward the bottom of the support instead.
DiscreteDist emp_stoc_dom_down(const std::vector<double>& support,
                               const std::vector<double>& samples,
                               double delta);

// Continuous version on a known range [lo, hi]: the output step cdf is
// (F_m - eps)^+ below hi and 1 at hi.  Needs at least one sample.
StepCdf emp_stoc_dom_cts(const std::vector<double>& samples, double lo,
                         double hi, double delta);

// Censored observations: samples_by_level[c-1] holds values min(x, a_c)
// from probes at threshold level c.  A sample taken at level b is evidence
// about every level c <= b; the per-level widths use those pooled counts.
DiscreteDist censored_dominating(
    const std::vector<double>& support,
    const std::vector<std::vector<double>>& samples_by_level, double delta);

// Binary threshold observations: counts[c-1] = {successes, trials} for
// probes at level c, success meaning x >= a_c.
DiscreteDist binary_dominating(
    const std::vector<double>& support,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& counts,
    double delta);

// Count-vector entry points used by the learner so that round t costs O(k)
// instead of O(t).  The sample-list functions above reduce to these.
DiscreteDist emp_stoc_dom_counts(const std::vector<double>& support,
                                 const std::vector<std::int64_t>& counts,
                                 double delta);
DiscreteDist emp_stoc_dom_down_counts(const std::vector<double>& support,
                                      const std::vector<std::int64_t>& counts,
                                      double delta);
// counts_by_level[c-1][j] = number of level-c probes whose censored value
// equals support[j] (so j <= c-1).
DiscreteDist censored_dominating_counts(
    const std::vector<double>& support,
    const std::vector<std::vector<std::int64_t>>& counts_by_level,
    double delta);

}  // namespace mb
