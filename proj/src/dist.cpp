#include "mb/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mb {

namespace {

void check_support(const std::vector<double>& s) {
  if (s.empty()) throw DistError("support must be nonempty");
  for (double v : s)
    if (!std::isfinite(v)) throw DistError("support values must be finite");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1] + kSupportTol))
      throw DistError("support must be strictly increasing");
}

}  // namespace

DiscreteDist::DiscreteDist(std::vector<double> support,
                           std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  check_support(support_);
  if (probs_.size() != support_.size())
    throw DistError("support/probs size mismatch");
  double sum = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p)) throw DistError("pmf mass must be finite");
    if (p < 0.0) {
      if (p < -kMassEps) throw DistError("negative pmf mass");
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kMassDriftTol)
    throw DistError("pmf mass does not sum to one");
  if (sum != 1.0)
    for (double& p : probs_) p /= sum;
  double check = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(check - 1.0) > kMassEps)
    throw DistError("pmf normalization failed");

  cdf_.resize(probs_.size());
  tail_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    cdf_[i] = std::min(acc, 1.0);
  }
  cdf_.back() = 1.0;
  acc = 0.0;
  for (std::size_t i = probs_.size(); i-- > 0;) {
    acc += probs_[i];
    tail_[i] = std::min(acc, 1.0);
  }
  tail_.front() = 1.0;
}

DiscreteDist DiscreteDist::point_mass(double v) {
  return DiscreteDist({v}, {1.0});
}

double DiscreteDist::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m += probs_[i] * support_[i];
  return m;
}

int DiscreteDist::find(double v, double tol) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), v - tol);
  if (it == support_.end() || std::abs(*it - v) > tol) return -1;
  return static_cast<int>(it - support_.begin());
}

double DiscreteDist::sample(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return support_.back();
  return support_[static_cast<std::size_t>(it - cdf_.begin())];
}

std::vector<double> merge_supports(const std::vector<double>& a,
                                   const std::vector<double>& b, double tol) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j] + tol)) {
      out.push_back(a[i]);
      if (j < b.size() && std::abs(b[j] - a[i]) <= tol) ++j;
      ++i;
    } else {
      out.push_back(b[j]);
      ++j;
    }
  }
  return out;
}

DiscreteDist reindex(const DiscreteDist& d, const std::vector<double>& support,
                     double tol) {
  check_support(support);
  std::vector<double> probs(support.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto it = std::lower_bound(support.begin(), support.end(),
                               d.value(i) - tol);
    if (it == support.end() || std::abs(*it - d.value(i)) > tol)
      throw DistError("reindex: support point missing from target");
    probs[static_cast<std::size_t>(it - support.begin())] += d.prob(i);
  }
  return DiscreteDist(support, std::move(probs));
}

double tv_distance(const DiscreteDist& d, const DiscreteDist& e) {
  auto s = merge_supports(d.support(), e.support());
  DiscreteDist dd = reindex(d, s), ee = reindex(e, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    acc += std::abs(dd.prob(i) - ee.prob(i));
  return 0.5 * acc;
}

bool stochastically_dominates(const DiscreteDist& e, const DiscreteDist& d,
                              double tol) {
  auto s = merge_supports(d.support(), e.support());
  DiscreteDist dd = reindex(d, s), ee = reindex(e, s);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (ee.cdf_at(i) > dd.cdf_at(i) + tol) return false;
  return true;
}

DiscreteDist truncate_at(const DiscreteDist& d, int level) {
  if (level < 1 || static_cast<std::size_t>(level) > d.size())
    throw DistError("truncate_at: level out of range");
  std::size_t c = static_cast<std::size_t>(level);
  std::vector<double> support(d.support().begin(), d.support().begin() + c);
  std::vector<double> probs(d.probs().begin(), d.probs().begin() + c);
  probs[c - 1] = d.tail_at(c - 1);
  return DiscreteDist(std::move(support), std::move(probs));
}

DiscreteDist binary_compress(const DiscreteDist& d, int level) {
  if (level < 1 || static_cast<std::size_t>(level) > d.size())
    throw DistError("binary_compress: level out of range");
  double tail = d.tail_at(static_cast<std::size_t>(level - 1));
  return DiscreteDist({0.0, 1.0}, {1.0 - tail, tail});
}

double expected_min(const DiscreteDist& d, double cap) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    acc += d.prob(i) * std::min(d.value(i), cap);
  return acc;
}

double expected_excess(const DiscreteDist& d, double r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    acc += d.prob(i) * std::max(d.value(i) - r, 0.0);
  return acc;
}

StepCdf::StepCdf(double lo, double hi, std::vector<double> xs,
                 std::vector<double> fs)
    : lo_(lo), hi_(hi), xs_(std::move(xs)), fs_(std::move(fs)) {
  if (!(lo_ < hi_)) throw DistError("StepCdf: need lo < hi");
  if (xs_.size() != fs_.size()) throw DistError("StepCdf: xs/fs mismatch");
  double prev_x = lo_ - 1.0, prev_f = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (xs_[i] < lo_ - kSupportTol || xs_[i] > hi_ + kSupportTol)
      throw DistError("StepCdf: breakpoint outside range");
    if (i > 0 && !(xs_[i] > prev_x)) throw DistError("StepCdf: xs not increasing");
    if (fs_[i] < prev_f - kMassEps || fs_[i] > 1.0 + kMassEps)
      throw DistError("StepCdf: values not a cdf");
    fs_[i] = std::clamp(fs_[i], prev_f, 1.0);
    prev_x = xs_[i];
    prev_f = fs_[i];
  }
  if (xs_.empty() || xs_.back() < hi_ - kSupportTol) {
    xs_.push_back(hi_);
    fs_.push_back(1.0);
  } else {
    xs_.back() = hi_;
    if (std::abs(fs_.back() - 1.0) > kMassDriftTol)
      throw DistError("StepCdf: must reach one at hi");
    fs_.back() = 1.0;
  }
}

double StepCdf::eval(double x) const {
  if (x >= hi_) return 1.0;
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  if (it == xs_.begin()) return 0.0;
  return fs_[static_cast<std::size_t>(it - xs_.begin()) - 1];
}

StepCdf empirical_cdf(std::vector<double> samples, double lo, double hi) {
  if (samples.empty()) throw DistError("empirical_cdf: no samples");
  std::sort(samples.begin(), samples.end());
  if (samples.front() < lo - kSupportTol || samples.back() > hi + kSupportTol)
    throw DistError("empirical_cdf: sample outside [lo, hi]");
  std::vector<double> xs, fs;
  std::size_t m = samples.size();
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j < m && samples[j] == samples[i]) ++j;
    xs.push_back(std::clamp(samples[i], lo, hi));
    fs.push_back(static_cast<double>(j) / static_cast<double>(m));
    i = j;
  }
  return StepCdf(lo, hi, std::move(xs), std::move(fs));
}

double ks_distance(const StepCdf& f, const StepCdf& g) {
  double d = 0.0;
  for (double x : f.xs()) d = std::max(d, std::abs(f.eval(x) - g.eval(x)));
  for (double x : g.xs()) d = std::max(d, std::abs(f.eval(x) - g.eval(x)));
  return d;
}

bool stochastically_dominates(const StepCdf& e, const StepCdf& d, double tol) {
  for (double x : e.xs())
    if (e.eval(x) > d.eval(x) + tol) return false;
  for (double x : d.xs())
    if (e.eval(x) > d.eval(x) + tol) return false;
  return true;
}

DiscreteDist to_discrete(const StepCdf& f) {
  std::vector<double> support, probs;
  double prev = 0.0;
  for (std::size_t i = 0; i < f.xs().size(); ++i) {
    double jump = f.values()[i] - prev;
    if (jump > 0.0) {
      support.push_back(f.xs()[i]);
      probs.push_back(jump);
    }
    prev = f.values()[i];
  }
  return DiscreteDist(std::move(support), std::move(probs));
}

namespace {

void check_pwl(const PiecewiseLinearCdf& p) {
  if (p.xs.size() < 2 || p.xs.size() != p.fs.size())
    throw DistError("piecewise-linear cdf needs matching knots");
  if (std::abs(p.fs.front()) > kMassEps ||
      std::abs(p.fs.back() - 1.0) > kMassDriftTol)
    throw DistError("piecewise-linear cdf must run from 0 to 1");
  for (std::size_t i = 1; i < p.xs.size(); ++i) {
    if (!(p.xs[i] > p.xs[i - 1])) throw DistError("pwl knots not increasing");
    if (p.fs[i] < p.fs[i - 1] - kMassEps) throw DistError("pwl cdf decreasing");
  }
}

}  // namespace

double lower_bound(const TrueDistSpec& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiscreteDist>) return v.min_value();
        else if constexpr (std::is_same_v<T, Uniform>) return v.lo;
        else return v.xs.front();
      },
      s);
}

double upper_bound(const TrueDistSpec& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiscreteDist>) return v.max_value();
        else if constexpr (std::is_same_v<T, Uniform>) return v.hi;
        else return v.xs.back();
      },
      s);
}

bool is_discrete(const TrueDistSpec& s) {
  return std::holds_alternative<DiscreteDist>(s);
}

double sample(const TrueDistSpec& s, double u) {
  return std::visit(
      [u](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiscreteDist>) {
          return v.sample(u);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          if (!(v.lo < v.hi)) throw DistError("uniform: need lo < hi");
          return v.lo + u * (v.hi - v.lo);
        } else {
          check_pwl(v);
          double target = std::min(u, 1.0);
          for (std::size_t i = 1; i < v.xs.size(); ++i) {
            if (target <= v.fs[i] || i + 1 == v.xs.size()) {
              double df = v.fs[i] - v.fs[i - 1];
              if (df <= 0.0) return v.xs[i - 1];
              double w = (target - v.fs[i - 1]) / df;
              return v.xs[i - 1] + std::clamp(w, 0.0, 1.0) * (v.xs[i] - v.xs[i - 1]);
            }
          }
          return v.xs.back();
        }
      },
      s);
}

double sample(const TrueDistSpec& s, Rng& rng) { return sample(s, rng.uniform()); }

ProductDist::ProductDist(std::vector<DiscreteDist> items)
    : items_(std::move(items)) {
  if (items_.empty()) throw DistError("ProductDist: need at least one item");
}

}  // namespace mb
