#include "mb/slope.hpp"

#include <cmath>

#include "mb/config.hpp"

namespace mb {

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  SlopeFit fit;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      fit.warnings.push_back("dropped nonpositive point (" +
                             std::to_string(x) + ", " + std::to_string(y) + ")");
      continue;
    }
    logs.emplace_back(std::log(x), std::log(y));
  }
  fit.used = logs.size();
  if (logs.size() < 3)
    throw ConfigError("log-log fit refused: fewer than 3 positive points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : logs) {
    sx += x;
    sy += y;
  }
  double mx = sx / static_cast<double>(logs.size());
  double my = sy / static_cast<double>(logs.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0))
    throw ConfigError("log-log fit refused: degenerate abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace mb
