#include "mb/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mb {

namespace {

constexpr double kHuge = 1e300;

std::size_t st(double v) { return static_cast<std::size_t>(v); }

std::vector<std::vector<double>> supports_of(const ProductDist& d) {
  std::vector<std::vector<double>> s;
  s.reserve(d.n());
  for (const auto& item : d.items()) s.push_back(item.support());
  return s;
}

double max_support_value(const std::vector<std::vector<double>>& supports) {
  double u = 0.0;
  for (const auto& s : supports) u = std::max(u, s.back());
  return u;
}

// ---------------------------------------------------------------- series

class SeriesPolicy final : public Policy {
 public:
  SeriesPolicy(ProblemMeta meta, std::vector<std::vector<double>> supports,
               std::vector<int> order, std::vector<double> costs)
      : Policy(std::move(meta), std::move(supports)),
        order_(std::move(order)),
        costs_(std::move(costs)) {}

  InfoState initial() const override { return {{0.0, 0.0}}; }

  Action act(const InfoState& s) const override {
    if (s.v[1] != 0.0 || st(s.v[0]) >= order_.size()) return Action::stop(0.0);
    return Action::probe(order_[st(s.v[0])], 0);
  }

  Step advance(const InfoState& s, const Action& a, double obs) const override {
    double failed = obs >= 0.5 ? 1.0 : 0.0;
    return {{{s.v[0] + 1.0, failed}}, costs_[st(a.item)]};
  }

 private:
  std::vector<int> order_;
  std::vector<double> costs_;
};

std::unique_ptr<Policy> build_series(ProblemMeta meta,
                                     std::vector<std::vector<double>> supports,
                                     const std::vector<double>& fail_probs,
                                     const std::vector<double>& costs,
                                     int forced_first = -1) {
  std::size_t n = costs.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ra = fail_probs[st(a)] / costs[st(a)];
    double rb = fail_probs[st(b)] / costs[st(b)];
    if (ra != rb) return ra > rb;
    return a < b;
  });
  if (forced_first >= 0) {
    order.erase(std::find(order.begin(), order.end(), forced_first));
    // exploration variant: test the target first, then cheapest-resolution
    // order on the rest so the run still terminates legally
    order.insert(order.begin(), forced_first);
  }
  return std::make_unique<SeriesPolicy>(std::move(meta), std::move(supports),
                                        std::move(order), costs);
}

double series_fail_prob(const DiscreteDist& d) {
  int one = d.find(1.0);
  if (d.size() != 2 || d.find(0.0) != 0 || one != 1)
    throw DistError("series testing needs support {0, 1}");
  return d.prob(st(one));
}

// --------------------------------------------------------------- pandora

class PandoraPolicy final : public Policy {
 public:
  PandoraPolicy(ProblemMeta meta, std::vector<std::vector<double>> supports,
                std::vector<int> order, std::vector<double> thresholds,
                std::vector<double> costs)
      : Policy(std::move(meta), std::move(supports)),
        order_(std::move(order)),
        thresholds_(std::move(thresholds)),
        costs_(std::move(costs)) {}

  InfoState initial() const override { return {{0.0, 0.0}}; }

  Action act(const InfoState& s) const override {
    std::size_t pos = st(s.v[0]);
    if (pos >= order_.size() || s.v[1] >= thresholds_[pos])
      return Action::stop(s.v[1]);
    return Action::probe(order_[pos], 0);
  }

  Step advance(const InfoState& s, const Action& a, double obs) const override {
    return {{{s.v[0] + 1.0, std::max(s.v[1], obs)}}, -costs_[st(a.item)]};
  }

 private:
  std::vector<int> order_;
  std::vector<double> thresholds_;
  std::vector<double> costs_;
};

std::unique_ptr<Policy> build_pandora(ProblemMeta meta,
                                      const ProductDist& values,
                                      const std::vector<double>& costs) {
  std::size_t n = values.n();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = reservation_value(values.item(i), costs[i]);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (r[st(a)] != r[st(b)]) return r[st(a)] > r[st(b)];
    return a < b;
  });
  std::vector<double> thresholds(n);
  for (std::size_t i = 0; i < n; ++i) thresholds[i] = r[st(order[i])];
  return std::make_unique<PandoraPolicy>(std::move(meta), supports_of(values),
                                         std::move(order),
                                         std::move(thresholds), costs);
}

// --------------------------------------------------------------- prophet

class ProphetPolicy final : public Policy {
 public:
  ProphetPolicy(ProblemMeta meta, std::vector<std::vector<double>> supports,
                std::vector<double> thresholds)
      : Policy(std::move(meta), std::move(supports)),
        thresholds_(std::move(thresholds)) {}

  InfoState initial() const override { return {{0.0, 0.0}}; }

  Action act(const InfoState& s) const override {
    if (s.v[1] != 0.0 || st(s.v[0]) >= thresholds_.size())
      return Action::stop(0.0);
    return Action::probe(static_cast<int>(st(s.v[0])), 0);
  }

  Step advance(const InfoState& s, const Action&, double obs) const override {
    // accept strictly above the continuation value
    if (obs > thresholds_[st(s.v[0])])
      return {{{static_cast<double>(thresholds_.size()), 1.0}}, obs};
    return {{{s.v[0] + 1.0, 0.0}}, 0.0};
  }

 private:
  std::vector<double> thresholds_;
};

std::vector<double> prophet_thresholds(const ProductDist& values) {
  std::size_t n = values.n();
  std::vector<double> tau(n);
  double cont = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    tau[i] = cont;
    const DiscreteDist& d = values.item(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j)
      acc += d.prob(j) * std::max(d.value(j), cont);
    cont = acc;
  }
  return tau;
}

// ------------------------------------------------------------------ srm

class SrmPolicy final : public Policy {
 public:
  SrmPolicy(ProblemMeta meta, std::vector<std::vector<double>> supports,
            std::vector<double> prices, int capacity, std::vector<int> protect)
      : Policy(std::move(meta), std::move(supports)),
        prices_(std::move(prices)),
        capacity_(capacity),
        protect_(std::move(protect)) {}

  InfoState initial() const override {
    return {{0.0, static_cast<double>(capacity_)}};
  }

  Action act(const InfoState& s) const override {
    std::size_t t = st(s.v[0]);
    std::size_t n = prices_.size();
    if (t >= n) return Action::stop(0.0);
    int idx = static_cast<int>(n - 1 - t);
    int cap = static_cast<int>(s.v[1]);
    int q = cap - std::min(protect_[st(idx)], cap);
    if (q == 0) return Action::probe(idx, 0);  // hold everything back
    return Action::probe(idx, q + 1);          // support {0..C}: a_{q+1} = q
  }

  Step advance(const InfoState& s, const Action& a, double obs) const override {
    double sold = obs;
    return {{{s.v[0] + 1.0, s.v[1] - sold}}, prices_[st(a.item)] * sold};
  }

 private:
  std::vector<double> prices_;
  int capacity_;
  std::vector<int> protect_;
};

// Protection levels via the value recursion over classes served after each
// arrival; V[i] covers items 0..i-1 (classes i..1).
std::vector<int> srm_protect(const ProductDist& demands,
                             const std::vector<double>& prices, int capacity) {
  std::size_t n = demands.n();
  std::vector<std::vector<double>> v(
      n + 1, std::vector<double>(st(capacity) + 1, 0.0));
  std::vector<int> protect(n, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t idx = i - 1;
    int y = 0;
    for (int c = 1; c <= capacity; ++c)
      if (v[idx][st(c)] - v[idx][st(c) - 1] > prices[idx]) y = c;
    protect[idx] = y;
    const DiscreteDist& d = demands.item(idx);
    for (int c = 0; c <= capacity; ++c) {
      int q = c - std::min(y, c);
      double acc = 0.0;
      for (std::size_t j = 0; j < d.size(); ++j) {
        int sold = std::min(static_cast<int>(std::lround(d.value(j))), q);
        acc += d.prob(j) *
               (prices[idx] * sold + v[idx][st(c - sold)]);
      }
      v[i][st(c)] = acc;
    }
  }
  return protect;
}

// ----------------------------------------------------------------- fspm

class FspmPolicy final : public Policy {
 public:
  FspmPolicy(ProblemMeta meta, std::vector<std::vector<double>> supports,
             int rank, std::vector<std::vector<int>> plevel)
      : Policy(std::move(meta), std::move(supports)),
        rank_(rank),
        plevel_(std::move(plevel)) {}

  InfoState initial() const override {
    return {{0.0, static_cast<double>(rank_)}};
  }

  Action act(const InfoState& s) const override {
    std::size_t i = st(s.v[0]);
    std::size_t r = st(s.v[1]);
    if (i >= plevel_.size() || r == 0) return Action::stop(0.0);
    return Action::probe(static_cast<int>(i), plevel_[i][r]);
  }

  Step advance(const InfoState& s, const Action& a, double obs) const override {
    if (a.level == 0) return {{{s.v[0] + 1.0, s.v[1]}}, 0.0};
    if (obs >= 0.5) {
      double price = supports()[st(a.item)][st(a.level) - 1];
      return {{{s.v[0] + 1.0, s.v[1] - 1.0}}, price};
    }
    return {{{s.v[0] + 1.0, s.v[1]}}, 0.0};
  }

 private:
  int rank_;
  std::vector<std::vector<int>> plevel_;
};

std::vector<std::vector<int>> fspm_plan(const ProductDist& valuations,
                                        int rank) {
  std::size_t n = valuations.n();
  std::size_t cap = st(rank);
  std::vector<std::vector<double>> v(n + 1, std::vector<double>(cap + 1, 0.0));
  std::vector<std::vector<int>> plevel(n, std::vector<int>(cap + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    const DiscreteDist& d = valuations.item(i);
    for (std::size_t r = 1; r <= cap; ++r) {
      // ascending support scan keeps the lowest price on value ties; skip
      // only when strictly better
      double best = -kHuge;
      int bl = 0;
      for (std::size_t lvl = 1; lvl <= d.size(); ++lvl) {
        double tail = d.tail_at(lvl - 1);
        double val = tail * (d.value(lvl - 1) + v[i + 1][r - 1]) +
                     (1.0 - tail) * v[i + 1][r];
        if (val > best) {
          best = val;
          bl = static_cast<int>(lvl);
        }
      }
      if (v[i + 1][r] > best) {
        best = v[i + 1][r];
        bl = 0;
      }
      v[i][r] = best;
      plevel[i][r] = bl;
    }
  }
  return plevel;
}

// ------------------------------------------------------------- metadata

ProblemMeta make_meta(const ProblemPayload& payload,
                      const std::vector<std::vector<double>>& supports) {
  return std::visit(
      [&](const auto& p) -> ProblemMeta {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeriesTesting>) {
          double fmax = std::accumulate(p.costs.begin(), p.costs.end(), 0.0);
          return {Sense::minimize, Direction::up, Feedback::semi_bandit, fmax};
        } else if constexpr (std::is_same_v<T, PandoraBox>) {
          return {Sense::maximize, Direction::down, Feedback::semi_bandit,
                  max_support_value(supports)};
        } else if constexpr (std::is_same_v<T, ProphetInequality>) {
          return {Sense::maximize, Direction::down, Feedback::semi_bandit,
                  max_support_value(supports)};
        } else if constexpr (std::is_same_v<T, SingleResourceRevenue>) {
          return {Sense::maximize, Direction::down, Feedback::censored,
                  p.prices.front() * p.capacity};
        } else {
          static_assert(std::is_same_v<T, SequentialPricing>);
          return {Sense::maximize, Direction::down, Feedback::binary,
                  p.rank * max_support_value(supports)};
        }
      },
      payload);
}

void check_grid_support(const std::vector<double>& s, int capacity) {
  if (s.size() != st(capacity) + 1)
    throw DistError("demand support must be the grid {0..capacity}");
  for (int j = 0; j <= capacity; ++j)
    if (std::abs(s[st(j)] - j) > kSupportTol)
      throw DistError("demand support must be the grid {0..capacity}");
}

void require_same_supports(const std::vector<std::vector<double>>& declared,
                           const ProductDist& est) {
  for (std::size_t i = 0; i < declared.size(); ++i) {
    const auto& a = declared[i];
    const auto& b = est.item(i).support();
    if (a.size() != b.size())
      throw DistError("estimate support does not match the declared one");
    for (std::size_t j = 0; j < a.size(); ++j)
      if (std::abs(a[j] - b[j]) > kSupportTol)
        throw DistError("estimate support does not match the declared one");
  }
}

}  // namespace

// ------------------------------------------------------------ instances

const char* InstanceSpec::kind() const {
  return std::visit(
      [](const auto& p) -> const char* {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeriesTesting>) return "series_testing";
        else if constexpr (std::is_same_v<T, PandoraBox>) return "pandora";
        else if constexpr (std::is_same_v<T, ProphetInequality>) return "prophet";
        else if constexpr (std::is_same_v<T, SingleResourceRevenue>) return "srm";
        else return "fspm";
      },
      problem);
}

ProblemMeta InstanceSpec::meta() const { return make_meta(problem, supports); }

void InstanceSpec::validate() const {
  if (supports.empty()) throw DistError("instance needs at least one item");
  for (const auto& s : supports) {
    if (s.empty()) throw DistError("empty item support");
    for (double v : s)
      if (!std::isfinite(v) || v < 0.0)
        throw DistError("support values must be finite and nonnegative");
    for (std::size_t j = 1; j < s.size(); ++j)
      if (!(s[j] > s[j - 1] + kSupportTol))
        throw DistError("support must be strictly increasing");
  }
  if (!truth.empty() && truth.size() != n())
    throw DistError("truth must cover every item");
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeriesTesting>) {
          if (p.costs.size() != n()) throw DistError("costs size mismatch");
          for (double c : p.costs)
            if (!(c > 0.0)) throw DistError("series costs must be positive");
          for (const auto& s : supports)
            if (s.size() != 2 || std::abs(s[0]) > kSupportTol ||
                std::abs(s[1] - 1.0) > kSupportTol)
              throw DistError("series testing needs support {0, 1}");
        } else if constexpr (std::is_same_v<T, PandoraBox>) {
          if (p.costs.size() != n()) throw DistError("costs size mismatch");
          for (double c : p.costs)
            if (c < 0.0) throw DistError("negative inspection cost");
        } else if constexpr (std::is_same_v<T, SingleResourceRevenue>) {
          if (p.prices.size() != n()) throw DistError("prices size mismatch");
          if (p.capacity < 1) throw DistError("capacity must be >= 1");
          for (std::size_t j = 0; j < p.prices.size(); ++j) {
            if (!(p.prices[j] > 0.0)) throw DistError("prices must be positive");
            if (j > 0 && !(p.prices[j] < p.prices[j - 1]))
              throw DistError("prices must be strictly decreasing");
          }
          for (const auto& s : supports) check_grid_support(s, p.capacity);
        } else if constexpr (std::is_same_v<T, SequentialPricing>) {
          if (p.rank < 1) throw DistError("rank must be >= 1");
        }
      },
      problem);
  // censored/binary feedback and exact evaluation need finite truth on the
  // declared grid; continuous truth is only for the semi-bandit problems
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (is_discrete(truth[i])) {
      const auto& d = std::get<DiscreteDist>(truth[i]);
      reindex(d, supports[i]);  // throws if off-grid
    } else {
      ProblemMeta m = meta();
      if (m.feedback != Feedback::semi_bandit)
        throw DistError("continuous truth needs full observations");
      if (lower_bound(truth[i]) < supports[i].front() - kSupportTol ||
          upper_bound(truth[i]) > supports[i].back() + kSupportTol)
        throw DistError("continuous truth outside the declared range");
    }
  }
}

bool InstanceSpec::truth_all_discrete() const {
  if (truth.empty()) return false;
  for (const auto& t : truth)
    if (!is_discrete(t)) return false;
  return true;
}

ProductDist InstanceSpec::truth_product() const {
  if (truth.size() != n()) throw DistError("instance has no full truth");
  std::vector<DiscreteDist> items;
  items.reserve(n());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!is_discrete(truth[i]))
      throw DistError("continuous truth has no finite product form");
    items.push_back(reindex(std::get<DiscreteDist>(truth[i]), supports[i]));
  }
  return ProductDist(std::move(items));
}

// -------------------------------------------------------------- solvers

double reservation_value(const DiscreteDist& d, double cost) {
  if (!(cost >= 0.0) || !std::isfinite(cost))
    throw DistError("inspection cost must be nonnegative");
  if (cost == 0.0) return d.max_value();
  // walk E[(X - r)^+] segments down from the top of the support
  double g = 0.0;
  for (std::size_t j = d.size(); j-- > 1;) {
    double slope = d.tail_at(j);
    double g_lo = g + slope * (d.value(j) - d.value(j - 1));
    if (g_lo >= cost) return d.value(j) - (cost - g) / slope;
    g = g_lo;
  }
  return d.value(0) - (cost - g);
}

std::unique_ptr<Policy> solve_series_testing(
    const std::vector<double>& working_probs,
    const std::vector<double>& costs) {
  if (working_probs.size() != costs.size() || costs.empty())
    throw DistError("series testing: bad arguments");
  std::vector<double> fail(working_probs.size());
  for (std::size_t i = 0; i < fail.size(); ++i) {
    if (working_probs[i] < 0.0 || working_probs[i] > 1.0)
      throw DistError("working probability outside [0, 1]");
    if (!(costs[i] > 0.0)) throw DistError("series costs must be positive");
    fail[i] = 1.0 - working_probs[i];
  }
  std::vector<std::vector<double>> supports(costs.size(), {0.0, 1.0});
  ProblemMeta meta{Sense::minimize, Direction::up, Feedback::semi_bandit,
                   std::accumulate(costs.begin(), costs.end(), 0.0)};
  return build_series(meta, std::move(supports), fail, costs);
}

std::unique_ptr<Policy> solve_pandora(const ProductDist& values,
                                      const std::vector<double>& costs) {
  if (costs.size() != values.n()) throw DistError("pandora: bad arguments");
  ProblemMeta meta{Sense::maximize, Direction::down, Feedback::semi_bandit,
                   max_support_value(supports_of(values))};
  return build_pandora(meta, values, costs);
}

std::unique_ptr<Policy> solve_prophet(const ProductDist& values) {
  ProblemMeta meta{Sense::maximize, Direction::down, Feedback::semi_bandit,
                   max_support_value(supports_of(values))};
  return std::make_unique<ProphetPolicy>(meta, supports_of(values),
                                         prophet_thresholds(values));
}

std::unique_ptr<Policy> solve_srm(const ProductDist& demands,
                                  const std::vector<double>& prices,
                                  int capacity) {
  if (prices.size() != demands.n() || capacity < 1)
    throw DistError("srm: bad arguments");
  for (const auto& item : demands.items())
    check_grid_support(item.support(), capacity);
  ProblemMeta meta{Sense::maximize, Direction::down, Feedback::censored,
                   prices.front() * capacity};
  return std::make_unique<SrmPolicy>(meta, supports_of(demands), prices,
                                     capacity,
                                     srm_protect(demands, prices, capacity));
}

std::unique_ptr<Policy> solve_fspm(const ProductDist& valuations, int rank) {
  if (rank < 1) throw DistError("fspm: rank must be >= 1");
  ProblemMeta meta{Sense::maximize, Direction::down, Feedback::binary,
                   rank * max_support_value(supports_of(valuations))};
  return std::make_unique<FspmPolicy>(meta, supports_of(valuations), rank,
                                      fspm_plan(valuations, rank));
}

std::unique_ptr<Policy> solve(const InstanceSpec& inst,
                              const ProductDist& est) {
  inst.validate();
  if (est.n() != inst.n())
    throw DistError("estimate does not cover every item");
  ProblemMeta meta = inst.meta();
  return std::visit(
      [&](const auto& p) -> std::unique_ptr<Policy> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeriesTesting>) {
          require_same_supports(inst.supports, est);
          std::vector<double> fail(inst.n());
          for (std::size_t i = 0; i < inst.n(); ++i)
            fail[i] = series_fail_prob(est.item(i));
          return build_series(meta, inst.supports, fail, p.costs);
        } else if constexpr (std::is_same_v<T, PandoraBox>) {
          return build_pandora(meta, est, p.costs);
        } else if constexpr (std::is_same_v<T, ProphetInequality>) {
          return std::make_unique<ProphetPolicy>(meta, supports_of(est),
                                                 prophet_thresholds(est));
        } else if constexpr (std::is_same_v<T, SingleResourceRevenue>) {
          require_same_supports(inst.supports, est);
          return std::make_unique<SrmPolicy>(
              meta, inst.supports, p.prices, p.capacity,
              srm_protect(est, p.prices, p.capacity));
        } else {
          static_assert(std::is_same_v<T, SequentialPricing>);
          require_same_supports(inst.supports, est);
          return std::make_unique<FspmPolicy>(meta, inst.supports, p.rank,
                                              fspm_plan(est, p.rank));
        }
      },
      inst.problem);
}

std::unique_ptr<Policy> make_explore_policy(const InstanceSpec& inst,
                                            int target, std::int64_t visit) {
  inst.validate();
  if (target < 0 || st(target) >= inst.n())
    throw DistError("explore target out of range");
  ProblemMeta meta = inst.meta();
  return std::visit(
      [&](const auto& p) -> std::unique_ptr<Policy> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SeriesTesting>) {
          // test the target first, then sweep the rest so the round ends
          std::vector<double> fail(inst.n(), 0.0);
          return build_series(meta, inst.supports, fail, p.costs, target);
        } else if constexpr (std::is_same_v<T, PandoraBox>) {
          // open only the target box, then quit
          return std::make_unique<PandoraPolicy>(
              meta, inst.supports, std::vector<int>{target},
              std::vector<double>{kHuge}, p.costs);
        } else if constexpr (std::is_same_v<T, ProphetInequality>) {
          // pass on everything before the target, take the target
          std::vector<double> tau(inst.n(), kHuge);
          tau[st(target)] = -1.0;
          return std::make_unique<ProphetPolicy>(meta, inst.supports,
                                                 std::move(tau));
        } else if constexpr (std::is_same_v<T, SingleResourceRevenue>) {
          // hold everything back except at the target class, which is
          // offered the full capacity (an uncensored demand sample)
          std::vector<int> protect(inst.n(), p.capacity);
          protect[st(target)] = 0;
          return std::make_unique<SrmPolicy>(meta, inst.supports, p.prices,
                                             p.capacity, std::move(protect));
        } else {
          static_assert(std::is_same_v<T, SequentialPricing>);
          // skip every other buyer; cycle the target's price levels so all
          // thresholds get sampled
          std::size_t k = inst.supports[st(target)].size();
          int lvl = static_cast<int>(st(visit % static_cast<std::int64_t>(k))) + 1;
          std::vector<std::vector<int>> plevel(
              inst.n(), std::vector<int>(st(p.rank) + 1, 0));
          for (std::size_t r = 1; r <= st(p.rank); ++r)
            plevel[st(target)][r] = lvl;
          return std::make_unique<FspmPolicy>(meta, inst.supports, p.rank,
                                              std::move(plevel));
        }
      },
      inst.problem);
}

}  // namespace mb
