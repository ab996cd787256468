#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mb/rng.hpp"

namespace mb {

// Value snapping / support merge tolerance.
inline constexpr double kSupportTol = 1e-9;
// Acceptable pmf mass drift before renormalizing kicks in.
inline constexpr double kMassDriftTol = 1e-9;
// Hard floor: after cleanup a pmf must sum to 1 within this.
inline constexpr double kMassEps = 1e-12;

struct DistError : std::runtime_error {
  explicit DistError(const std::string& what) : std::runtime_error(what) {}
};

// Finite distribution on a strictly increasing support.  Construction
// clamps masses in [-1e-12, 0) to zero, renormalizes when the total is
// within 1e-9 of one, and rejects anything worse.
class DiscreteDist {
public:
  DiscreteDist(std::vector<double> support, std::vector<double> probs);

  static DiscreteDist point_mass(double v);

  std::size_t size() const { return support_.size(); }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  double value(std::size_t idx) const { return support_[idx]; }
  double prob(std::size_t idx) const { return probs_[idx]; }
  double min_value() const { return support_.front(); }
  double max_value() const { return support_.back(); }

  double mean() const;
  // Pr[X <= support[idx]] / Pr[X >= support[idx]]
  double cdf_at(std::size_t idx) const { return cdf_[idx]; }
  double tail_at(std::size_t idx) const { return tail_[idx]; }

  // Index of v in the support within tol, or -1.
  int find(double v, double tol = kSupportTol) const;

  // Inverse-cdf draw from u in [0,1).
  double sample(double u) const;

private:
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<double> cdf_;   // prefix sums
  std::vector<double> tail_;  // suffix sums
};

// Union of two supports; values closer than tol are identified (the first
// operand's value wins).
std::vector<double> merge_supports(const std::vector<double>& a,
                                   const std::vector<double>& b,
                                   double tol = kSupportTol);

// Re-express d on a larger support, zero-padding missing points.  Throws if
// some mass of d sits on a value absent from `support`.
DiscreteDist reindex(const DiscreteDist& d, const std::vector<double>& support,
                     double tol = kSupportTol);

double tv_distance(const DiscreteDist& d, const DiscreteDist& e);

// First-order stochastic dominance: does e dominate d?  Checked on the
// merged support; tol absorbs float noise only.
bool stochastically_dominates(const DiscreteDist& e, const DiscreteDist& d,
                              double tol = kMassEps);

// Censoring at support level c (1-based): values above a_c collapse onto it.
DiscreteDist truncate_at(const DiscreteDist& d, int level);

// Threshold indicator at level c (1-based): support {0,1},
// Pr[1] = Pr[X >= a_c].
DiscreteDist binary_compress(const DiscreteDist& d, int level);

// E[min(X, cap)] and E[(X - r)^+].
double expected_min(const DiscreteDist& d, double cap);
double expected_excess(const DiscreteDist& d, double r);

// Right-continuous step cdf on [lo, hi]; F = 0 left of the first
// breakpoint, and F(hi) = 1.
class StepCdf {
public:
  StepCdf(double lo, double hi, std::vector<double> xs, std::vector<double> fs);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return fs_; }

  double eval(double x) const;

private:
  double lo_, hi_;
  std::vector<double> xs_;
  std::vector<double> fs_;
};

StepCdf empirical_cdf(std::vector<double> samples, double lo, double hi);
double ks_distance(const StepCdf& f, const StepCdf& g);
bool stochastically_dominates(const StepCdf& e, const StepCdf& d,
                              double tol = kMassEps);
// Jumps of the step cdf as a finite distribution.
DiscreteDist to_discrete(const StepCdf& f);

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

// Continuous cdf through knots (xs[j], fs[j]), linear in between;
// fs.front() = 0, fs.back() = 1.
struct PiecewiseLinearCdf {
  std::vector<double> xs;
  std::vector<double> fs;
};

// Ground-truth distribution of one item; discrete for exact evaluation,
// Uniform / piecewise-linear for the continuous pipeline.
using TrueDistSpec = std::variant<DiscreteDist, Uniform, PiecewiseLinearCdf>;

double lower_bound(const TrueDistSpec& s);
double upper_bound(const TrueDistSpec& s);
bool is_discrete(const TrueDistSpec& s);
// Inverse-cdf draw at u in [0,1).
double sample(const TrueDistSpec& s, double u);
double sample(const TrueDistSpec& s, Rng& rng);

// Independent product over items; n >= 1.
class ProductDist {
public:
  explicit ProductDist(std::vector<DiscreteDist> items);

  std::size_t n() const { return items_.size(); }
  const DiscreteDist& item(std::size_t i) const { return items_[i]; }
  const std::vector<DiscreteDist>& items() const { return items_; }

private:
  std::vector<DiscreteDist> items_;
};

}  // namespace mb
