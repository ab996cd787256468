#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mb {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;   // in log space
  std::size_t used = 0;     // points that survived the positivity filter
  std::vector<std::string> warnings;
};

// Least-squares slope of log(y) vs log(x).  Points with nonpositive x or y
// are dropped with a warning; fewer than 3 survivors is a refusal
// (ConfigError).
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace mb
