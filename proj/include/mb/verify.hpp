#pragma once

#include <iosfwd>
#include <string>

#include "mb/oracle.hpp"

namespace mb {

struct VerifyOptions {
  std::uint64_t seed = 1;
  int oracle_per_problem = 100;
  int monotonicity_per_problem = 200;
  int stability_total = 500;
};

struct VerifyReport {
  int oracle_checked = 0;
  int oracle_failures = 0;
  double oracle_max_err = 0.0;
  int monotonicity_checked = 0;
  int monotonicity_failures = 0;
  int stability_checked = 0;
  int stability_failures = 0;
  double stability_max_excess = 0.0;  // max(gap - bound) seen

  bool ok() const {
    return oracle_failures == 0 && monotonicity_failures == 0 &&
           stability_failures == 0;
  }
};

// Random small instance (n <= 4, k <= 3; srm C <= 3; fspm rank <= 2) with
// discrete ground truth on the declared supports.
InstanceSpec random_instance(const std::string& kind, Rng& rng);

// Itemwise stochastically dominating (or dominated) copy of d: random
// upward (downward) mass moves.
ProductDist shifted_product(const ProductDist& d, Optimism direction, Rng& rng);

// Oracle equivalence + monotonicity + stability suites; writes one line per
// suite to `log` when given.
VerifyReport run_verify(const VerifyOptions& opt, std::ostream* log = nullptr);

}  // namespace mb
