#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "mb/policy.hpp"

namespace mb {

// Test components in series order of our choosing; each item works with
// probability p_i (failure shows up as realization 1 on support {0,1});
// pay c_i per test; stop at first failure.  Minimize expected cost.
struct SeriesTesting {
  std::vector<double> costs;
};

// Weitzman box search: pay c_i to open box i, keep the best opened value.
struct PandoraBox {
  std::vector<double> costs;
};

// Items arrive in index order; accept at most one, irrevocably.
struct ProphetInequality {};

// One resource of integer capacity; fare classes arrive in order n..1 with
// strictly decreasing prices p_1 > ... > p_n (class 1 last); each class
// buys min(demand, offered units).  Demand probes are censored at the
// offer.
struct SingleResourceRevenue {
  std::vector<double> prices;  // prices[j] is class j+1
  int capacity = 1;
};

// Buyers arrive in index order; post a price from the buyer's support or
// skip; at most `rank` sales.  Only the sale indicator is observed.
struct SequentialPricing {
  int rank = 1;
};

using ProblemPayload = std::variant<SeriesTesting, PandoraBox,
                                    ProphetInequality, SingleResourceRevenue,
                                    SequentialPricing>;

struct InstanceSpec {
  ProblemPayload problem;
  // Declared per-item supports.  For continuous-truth prophet/pandora items
  // this is just {lo, hi} of the range.
  std::vector<std::vector<double>> supports;
  // Ground truth; may be empty when the instance is only being solved.
  std::vector<TrueDistSpec> truth;

  std::size_t n() const { return supports.size(); }
  const char* kind() const;
  ProblemMeta meta() const;
  void validate() const;

  bool truth_all_discrete() const;
  // Truth as a product of finite distributions, reindexed onto the declared
  // supports; throws if any item is continuous.
  ProductDist truth_product() const;
};

// Smallest r with E[(X - r)^+] = cost (Weitzman index); cost must be >= 0.
double reservation_value(const DiscreteDist& d, double cost);

// Exact optimal policy for the instance under product estimate `est`.  For
// series testing / revenue management / pricing the estimate must live on
// the declared supports; for prophet/pandora any finite supports work
// (continuous pipeline hands in discretized cdfs).
std::unique_ptr<Policy> solve(const InstanceSpec& inst, const ProductDist& est);

std::unique_ptr<Policy> solve_series_testing(
    const std::vector<double>& working_probs, const std::vector<double>& costs);
std::unique_ptr<Policy> solve_pandora(const ProductDist& values,
                                      const std::vector<double>& costs);
std::unique_ptr<Policy> solve_prophet(const ProductDist& values);
std::unique_ptr<Policy> solve_srm(const ProductDist& demands,
                                  const std::vector<double>& prices,
                                  int capacity);
std::unique_ptr<Policy> solve_fspm(const ProductDist& valuations, int rank);

// Exploration policy for the explore-then-commit baseline: a legal policy
// that concentrates observation on `target`.  `visit` counts how often the
// target has been explored before (cycles threshold levels where feedback
// is binary).
std::unique_ptr<Policy> make_explore_policy(const InstanceSpec& inst,
                                            int target, std::int64_t visit);

}  // namespace mb
