#include "mb/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace mb {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || delta > 2.0)
    throw DistError("delta must lie in (0, 2]");
}

int snap_index(const std::vector<double>& support, double v) {
  auto it = std::lower_bound(support.begin(), support.end(), v - kSupportTol);
  if (it == support.end() || std::abs(*it - v) > kSupportTol)
    throw DistError("sample value not on the declared support");
  return static_cast<int>(it - support.begin());
}

void check_support_arg(const std::vector<double>& s) {
  if (s.empty()) throw DistError("support must be nonempty");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1] + kSupportTol))
      throw DistError("support must be strictly increasing");
}

DiscreteDist point_mass_at(const std::vector<double>& support,
                           std::size_t idx) {
  std::vector<double> p(support.size(), 0.0);
  p[idx] = 1.0;
  return DiscreteDist(support, std::move(p));
}

std::vector<std::int64_t> count_on_support(
    const std::vector<double>& support, const std::vector<double>& samples) {
  std::vector<std::int64_t> counts(support.size(), 0);
  for (double v : samples) ++counts[static_cast<std::size_t>(snap_index(support, v))];
  return counts;
}

}  // namespace

double confidence_width(double delta, std::size_t m) {
  check_delta(delta);
  if (m == 0) return 1.0;
  double w = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(m)));
  return std::min(w, 1.0);
}

double confidence_width_leveled(double delta, std::size_t k, std::size_t m) {
  check_delta(delta);
  if (m == 0) return 1.0;
  double num = std::log(2.0 * static_cast<double>(k) / delta);
  double w = std::sqrt(std::max(num, 0.0) / (2.0 * static_cast<double>(m)));
  return std::min(w, 1.0);
}

DiscreteDist emp_stoc_dom_counts(const std::vector<double>& support,
                                 const std::vector<std::int64_t>& counts,
                                 double delta) {
  check_support_arg(support);
  check_delta(delta);
  std::size_t k = support.size();
  if (counts.size() != k) throw DistError("counts size mismatch");
  std::int64_t m = 0;
  for (auto c : counts) {
    if (c < 0) throw DistError("negative count");
    m += c;
  }
  if (m == 0) return point_mass_at(support, k - 1);

  double eps = confidence_width(delta, static_cast<std::size_t>(m));
  std::vector<double> phat(k);
  for (std::size_t i = 0; i < k; ++i)
    phat[i] = static_cast<double>(counts[i]) / static_cast<double>(m);

  if (phat[k - 1] + eps >= 1.0) return point_mass_at(support, k - 1);

  // Shift eps of mass off the bottom of the empirical pmf and onto the top.
  std::vector<double> out(k, 0.0);
  double prefix = 0.0;
  std::size_t y = 0;
  for (; y < k; ++y) {
    prefix += phat[y];
    if (prefix >= eps) break;
  }
  // y < k-1 whenever phat[k-1] + eps < 1; guard the float boundary anyway.
  if (y + 1 >= k) return point_mass_at(support, k - 1);
  out[y] = prefix - eps;
  for (std::size_t i = y + 1; i + 1 < k; ++i) out[i] = phat[i];
  out[k - 1] = phat[k - 1] + eps;
  return DiscreteDist(support, std::move(out));
}

DiscreteDist emp_stoc_dom_down_counts(const std::vector<double>& support,
                                      const std::vector<std::int64_t>& counts,
                                      double delta) {
  check_support_arg(support);
  check_delta(delta);
  std::size_t k = support.size();
  if (counts.size() != k) throw DistError("counts size mismatch");
  std::int64_t m = 0;
  for (auto c : counts) {
    if (c < 0) throw DistError("negative count");
    m += c;
  }
  if (m == 0) return point_mass_at(support, 0);

  double eps = confidence_width(delta, static_cast<std::size_t>(m));
  std::vector<double> phat(k);
  for (std::size_t i = 0; i < k; ++i)
    phat[i] = static_cast<double>(counts[i]) / static_cast<double>(m);

  if (phat[0] + eps >= 1.0) return point_mass_at(support, 0);

  std::vector<double> out(k, 0.0);
  double suffix = 0.0;
  std::size_t y = k;
  while (y-- > 0) {
    suffix += phat[y];
    if (suffix >= eps) break;
  }
  if (y == 0) return point_mass_at(support, 0);
  out[y] = suffix - eps;
  for (std::size_t i = 1; i < y; ++i) out[i] = phat[i];
  out[0] = phat[0] + eps;
  return DiscreteDist(support, std::move(out));
}

DiscreteDist emp_stoc_dom(const std::vector<double>& support,
                          const std::vector<double>& samples, double delta) {
  check_support_arg(support);
  return emp_stoc_dom_counts(support, count_on_support(support, samples),
                             delta);
}

DiscreteDist emp_stoc_dom_down(const std::vector<double>& support,
                               const std::vector<double>& samples,
                               double delta) {
  check_support_arg(support);
  return emp_stoc_dom_down_counts(support, count_on_support(support, samples),
                                  delta);
}

StepCdf emp_stoc_dom_cts(const std::vector<double>& samples, double lo,
                         double hi, double delta) {
  check_delta(delta);
  if (samples.empty()) throw DistError("emp_stoc_dom_cts: no samples");
  double eps = confidence_width(delta, samples.size());
  StepCdf emp = empirical_cdf(samples, lo, hi);
  std::vector<double> xs, fs;
  for (std::size_t i = 0; i < emp.xs().size(); ++i) {
    double x = emp.xs()[i];
    if (x >= hi) break;
    xs.push_back(x);
    fs.push_back(std::max(emp.values()[i] - eps, 0.0));
  }
  xs.push_back(hi);
  fs.push_back(1.0);
  return StepCdf(lo, hi, std::move(xs), std::move(fs));
}

namespace {

// Shared mass-transfer loop: given per-level tail estimates and widths
// (level c is array index c-1; level 1 entries are unused since
// Pr[X >= a_1] = 1 is known a priori), push mass upward as far as each
// level's optimistic tail bound allows.
DiscreteDist transfer_loop(const std::vector<double>& support,
                           const std::vector<double>& phat,
                           const std::vector<double>& eps) {
  std::size_t k = support.size();
  std::vector<double> e(k, 0.0);
  e[0] = 1.0;
  for (std::size_t idx = 0; idx + 1 < k; ++idx) {
    double moved = std::min(e[idx], phat[idx + 1] + eps[idx + 1]);
    e[idx + 1] = moved;
    e[idx] -= moved;
  }
  return DiscreteDist(support, std::move(e));
}

}  // namespace

DiscreteDist censored_dominating_counts(
    const std::vector<double>& support,
    const std::vector<std::vector<std::int64_t>>& counts_by_level,
    double delta) {
  check_support_arg(support);
  check_delta(delta);
  std::size_t k = support.size();
  if (counts_by_level.size() != k)
    throw DistError("censored counts: need one bucket per level");
  std::vector<std::int64_t> level_total(k, 0);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts_by_level[c].size() != c + 1)
      throw DistError("censored counts: level c values live on a_1..a_c");
    for (auto v : counts_by_level[c]) {
      if (v < 0) throw DistError("negative count");
      level_total[c] += v;
    }
  }

  std::vector<double> phat(k, 0.0), eps(k, 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    // Pool every sample probed at level >= c+1: each tells us whether
    // x >= a_{c+1}.
    std::int64_t n_c = 0, top = 0;
    for (std::size_t b = c; b < k; ++b) {
      n_c += level_total[b];
      for (std::size_t j = c; j < counts_by_level[b].size(); ++j)
        top += counts_by_level[b][j];
    }
    if (n_c > 0) {
      phat[c] = static_cast<double>(top) / static_cast<double>(n_c);
      eps[c] = confidence_width_leveled(delta, k,
                                        static_cast<std::size_t>(n_c));
    }
  }
  return transfer_loop(support, phat, eps);
}

DiscreteDist censored_dominating(
    const std::vector<double>& support,
    const std::vector<std::vector<double>>& samples_by_level, double delta) {
  check_support_arg(support);
  std::size_t k = support.size();
  if (samples_by_level.size() != k)
    throw DistError("censored samples: need one bucket per level");
  std::vector<std::vector<std::int64_t>> counts(k);
  for (std::size_t c = 0; c < k; ++c) {
    counts[c].assign(c + 1, 0);
    for (double v : samples_by_level[c]) {
      int idx = snap_index(support, v);
      if (static_cast<std::size_t>(idx) > c)
        throw DistError("censored sample exceeds its probe level");
      ++counts[c][static_cast<std::size_t>(idx)];
    }
  }
  return censored_dominating_counts(support, counts, delta);
}

DiscreteDist binary_dominating(
    const std::vector<double>& support,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& counts,
    double delta) {
  check_support_arg(support);
  check_delta(delta);
  std::size_t k = support.size();
  if (counts.size() != k)
    throw DistError("binary counts: need one (successes, trials) per level");
  std::vector<double> phat(k, 0.0), eps(k, 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    auto [succ, trials] = counts[c];
    if (trials < 0 || succ < 0 || succ > trials)
      throw DistError("binary counts: need 0 <= successes <= trials");
    if (trials > 0) {
      phat[c] = static_cast<double>(succ) / static_cast<double>(trials);
      eps[c] = confidence_width_leveled(delta, k,
                                        static_cast<std::size_t>(trials));
    }
  }
  return transfer_loop(support, phat, eps);
}

}  // namespace mb
