#include "mb/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "mb/oracle.hpp"

namespace mb {

namespace {

std::size_t st(std::int64_t v) { return static_cast<std::size_t>(v); }

constexpr std::uint64_t kEvalSalt = 0x6576616c2d726e67ULL;  // "eval-rng"

int find_in(const std::vector<double>& sup, double v) {
  for (std::size_t j = 0; j < sup.size(); ++j)
    if (std::abs(sup[j] - v) <= kSupportTol) return static_cast<int>(j);
  return -1;
}

DiscreteDist prior_point_mass(const std::vector<double>& sup, Optimism opt) {
  return DiscreteDist::point_mass(opt == Optimism::dominating ? sup.back()
                                                              : sup.front());
}

}  // namespace

// ----------------------------------------------------------- SampleStore

SampleStore::SampleStore(Feedback mode,
                         std::vector<std::vector<double>> supports)
    : mode_(mode), supports_(std::move(supports)) {
  std::size_t n = supports_.size();
  raw_.resize(n);
  probes_.assign(n, 0);
  switch (mode_) {
    case Feedback::semi_bandit:
      counts_.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        counts_[i].assign(supports_[i].size(), 0);
      break;
    case Feedback::censored:
      censored_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = supports_[i].size();
        censored_[i].resize(k);
        for (std::size_t c = 1; c <= k; ++c)
          censored_[i][c - 1].assign(c, 0);
      }
      break;
    case Feedback::binary:
      binary_.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        binary_[i].assign(supports_[i].size(), {0, 0});
      break;
  }
}

void SampleStore::record(const ExecutionTrace& trace) {
  for (const ProbeRecord& pr : trace.probed) {
    std::size_t i = st(pr.item);
    const auto& sup = supports_[i];
    switch (mode_) {
      case Feedback::semi_bandit: {
        raw_[i].push_back(pr.observation);
        int j = find_in(sup, pr.observation);
        if (j >= 0) ++counts_[i][st(j)];
        ++probes_[i];
        break;
      }
      case Feedback::censored: {
        if (pr.level == 0) break;  // null probe, nothing learned
        int j = find_in(sup, pr.observation);
        if (j < 0 || j >= pr.level)
          throw DistError("censored observation off the declared support");
        ++censored_[i][st(pr.level - 1)][st(j)];
        ++probes_[i];
        break;
      }
      case Feedback::binary: {
        if (pr.level == 0) break;
        auto& cell = binary_[i][st(pr.level - 1)];
        if (pr.observation > 0.5) ++cell.first;
        ++cell.second;
        ++probes_[i];
        break;
      }
    }
  }
}

ProductDist SampleStore::estimates(Optimism opt, double delta) const {
  std::vector<DiscreteDist> items;
  items.reserve(supports_.size());
  for (std::size_t i = 0; i < supports_.size(); ++i) {
    const auto& sup = supports_[i];
    switch (mode_) {
      case Feedback::semi_bandit: {
        std::int64_t total = 0;
        for (std::int64_t c : counts_[i]) total += c;
        if (total != static_cast<std::int64_t>(raw_[i].size()))
          throw DistError(
              "observations off the declared support; use the continuous "
              "estimate path");
        items.push_back(opt == Optimism::dominating
                            ? emp_stoc_dom_counts(sup, counts_[i], delta)
                            : emp_stoc_dom_down_counts(sup, counts_[i], delta));
        break;
      }
      case Feedback::censored:
        if (opt != Optimism::dominating)
          throw std::logic_error(
              "censored sampler only supports the dominating direction");
        items.push_back(censored_dominating_counts(sup, censored_[i], delta));
        break;
      case Feedback::binary:
        if (opt != Optimism::dominating)
          throw std::logic_error(
              "binary sampler only supports the dominating direction");
        items.push_back(binary_dominating(sup, binary_[i], delta));
        break;
    }
  }
  return ProductDist(std::move(items));
}

ProductDist SampleStore::empirical(Optimism opt) const {
  std::vector<DiscreteDist> items;
  items.reserve(supports_.size());
  for (std::size_t i = 0; i < supports_.size(); ++i) {
    const auto& sup = supports_[i];
    std::size_t k = sup.size();
    switch (mode_) {
      case Feedback::semi_bandit: {
        std::int64_t total = 0;
        for (std::int64_t c : counts_[i]) total += c;
        if (raw_[i].empty()) {
          items.push_back(prior_point_mass(sup, opt));
        } else if (total == static_cast<std::int64_t>(raw_[i].size())) {
          std::vector<double> probs(k);
          for (std::size_t j = 0; j < k; ++j)
            probs[j] = static_cast<double>(counts_[i][j]) /
                       static_cast<double>(total);
          items.emplace_back(sup, std::move(probs));
        } else {
          // off-support (continuous-truth) observations
          items.push_back(
              to_discrete(empirical_cdf(raw_[i], sup.front(), sup.back())));
        }
        break;
      }
      case Feedback::censored: {
        // only top-level probes are uncensored
        const auto& top = censored_[i][k - 1];
        std::int64_t total = 0;
        for (std::int64_t c : top) total += c;
        if (total == 0) {
          items.push_back(prior_point_mass(sup, opt));
        } else {
          std::vector<double> probs(k);
          for (std::size_t j = 0; j < k; ++j)
            probs[j] =
                static_cast<double>(top[j]) / static_cast<double>(total);
          items.emplace_back(sup, std::move(probs));
        }
        break;
      }
      case Feedback::binary: {
        // monotonized tail frequencies, then difference into a pmf
        std::vector<double> tail(k + 1, 0.0);
        tail[0] = 1.0;  // x >= a_1 always
        for (std::size_t c = 1; c < k; ++c) {
          auto [succ, trials] = binary_[i][c];
          double raw = trials > 0 ? static_cast<double>(succ) /
                                        static_cast<double>(trials)
                                  : tail[c - 1];
          tail[c] = std::min(tail[c - 1], raw);
        }
        std::vector<double> probs(k);
        for (std::size_t j = 0; j < k; ++j) probs[j] = tail[j] - tail[j + 1];
        items.emplace_back(sup, std::move(probs));
        break;
      }
    }
  }
  return ProductDist(std::move(items));
}

// ------------------------------------------------------------- run loops

double default_delta(const InstanceSpec& inst, int horizon) {
  double n = static_cast<double>(inst.n());
  double t = static_cast<double>(horizon);
  if (inst.meta().feedback == Feedback::semi_bandit)
    return 2.0 / std::pow(n * t, 3.0);
  std::size_t k = 0;
  for (const auto& s : inst.supports) k = std::max(k, s.size());
  return 2.0 / std::pow(static_cast<double>(k) * n * t, 3.0);
}

namespace {

struct Evald {
  double value = 0.0;
  bool is_mc = false;
};

Evald eval_expected(const Policy& policy, const InstanceSpec& inst,
                    const ProductDist* truth, std::size_t budget,
                    std::size_t mc_samples, const Rng& eval_rng) {
  if (truth != nullptr) {
    try {
      return {exact_value(policy, *truth, budget), false};
    } catch (const StateBudgetExceeded&) {
      // fall through to sampling
    }
  }
  auto [mean, se] = monte_carlo_value(policy, inst.truth, mc_samples, eval_rng);
  (void)se;
  return {mean, true};
}

struct RunContext {
  const InstanceSpec& inst;
  ProblemMeta meta;
  double alpha = 1.0;
  std::size_t budget = 0;
  std::size_t mc_samples = 0;
  bool timing = false;
  std::unique_ptr<ProductDist> truth;  // null when any item is continuous
  std::vector<Rng> streams;            // per-item realization streams
  Rng eval_rng;
  double opt = 0.0;
  bool opt_is_mc = false;

  RunContext(const InstanceSpec& inst_, std::uint64_t seed,
             const RunConfig& cfg)
      : inst(inst_), meta(inst_.meta()), eval_rng(Rng(seed).split(kEvalSalt)) {
    inst.validate();
    if (inst.truth.empty())
      throw DistError("online run needs ground-truth distributions");
    alpha = cfg.alpha;
    budget = cfg.state_budget ? cfg.state_budget : default_state_budget();
    mc_samples = cfg.mc_samples;
    timing = cfg.timing;
    if (inst.truth_all_discrete())
      truth = std::make_unique<ProductDist>(inst.truth_product());
    Rng base(seed);
    for (std::size_t i = 0; i < inst.n(); ++i)
      streams.push_back(base.split(i));
  }

  // Reference optimum: exact when the truth is a finite product, otherwise
  // the exact optimum of a fine quantile discretization (flagged).
  void compute_opt() {
    if (truth) {
      auto sigma = solve(inst, *truth);
      Evald ev =
          eval_expected(*sigma, inst, truth.get(), budget, mc_samples, eval_rng);
      opt = ev.value;
      opt_is_mc = ev.is_mc;
      return;
    }
    constexpr std::size_t kGrid = 512;
    std::vector<DiscreteDist> items;
    for (const auto& spec : inst.truth) {
      std::vector<double> vals(kGrid);
      for (std::size_t j = 0; j < kGrid; ++j)
        vals[j] = sample(spec, (static_cast<double>(j) + 0.5) /
                                   static_cast<double>(kGrid));
      std::sort(vals.begin(), vals.end());
      std::vector<double> sup, probs;
      for (double v : vals) {
        if (!sup.empty() && v <= sup.back() + kSupportTol)
          probs.back() += 1.0 / static_cast<double>(kGrid);
        else {
          sup.push_back(v);
          probs.push_back(1.0 / static_cast<double>(kGrid));
        }
      }
      items.emplace_back(std::move(sup), std::move(probs));
    }
    ProductDist disc(std::move(items));
    auto sigma = solve(inst, disc);
    opt = exact_value(*sigma, disc, budget);
    opt_is_mc = true;
  }

  std::vector<double> draw(int t) const {
    std::vector<double> x(inst.n());
    for (std::size_t i = 0; i < inst.n(); ++i)
      x[i] = sample(inst.truth[i], streams[i].uniform_at(st(t)));
    return x;
  }

  RoundRecord make_record(int t, const Evald& ev, const ExecutionTrace& trace,
                          double wall_ms) const {
    RoundRecord r;
    r.t = t;
    r.expected_payoff = ev.value;
    r.expected_is_mc = ev.is_mc;
    r.realized_payoff = trace.payoff;
    r.probes = static_cast<int>(trace.probed.size());
    bool maximize = meta.sense == Sense::maximize;
    r.regret_increment =
        maximize ? alpha * opt - ev.value : ev.value - alpha * opt;
    r.realized_regret_increment =
        maximize ? alpha * opt - trace.payoff : trace.payoff - alpha * opt;
    r.wall_ms = wall_ms;
    return r;
  }
};

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

ProductDist round_estimates(const SampleStore& store, const RunContext& ctx,
                            double delta) {
  Optimism opt = ctx.meta.optimism();
  if (ctx.truth || ctx.meta.feedback != Feedback::semi_bandit)
    return store.estimates(opt, delta);
  // continuous-range path
  if (opt != Optimism::dominating)
    throw std::logic_error(
        "continuous sampler only supports the dominating direction");
  std::vector<DiscreteDist> items;
  for (std::size_t i = 0; i < ctx.inst.n(); ++i) {
    const auto& sup = ctx.inst.supports[i];
    const auto& raw = store.raw(i);
    if (raw.empty())
      items.push_back(DiscreteDist::point_mass(sup.back()));
    else
      items.push_back(
          to_discrete(emp_stoc_dom_cts(raw, sup.front(), sup.back(), delta)));
  }
  return ProductDist(std::move(items));
}

void debug_round_checks(const RunContext& ctx, const ProductDist& est,
                        const Policy& sigma, const Evald& ev) {
  if (!ctx.truth || ev.is_mc) return;
  Optimism opt = ctx.meta.optimism();
  bool dominance = true;
  for (std::size_t i = 0; i < ctx.inst.n() && dominance; ++i) {
    const DiscreteDist& d = ctx.truth->item(i);
    const DiscreteDist& e = est.item(i);
    dominance = opt == Optimism::dominating ? stochastically_dominates(e, d)
                                            : stochastically_dominates(d, e);
  }
  if (!dominance) return;
  // optimism: the solver believes it does at least as well as OPT
  double believed = exact_value(sigma, est, ctx.budget);
  bool optimistic = ctx.meta.sense == Sense::maximize
                        ? believed >= ctx.opt - 1e-9
                        : believed <= ctx.opt + 1e-9;
  if (!optimistic) throw std::logic_error("optimism inequality violated");
  StabilityReport rep =
      check_stability(ctx.inst, *ctx.truth, est, ctx.alpha, sigma, ctx.budget);
  if (!rep.ok) throw std::logic_error("per-round stability bound violated");
}

}  // namespace

RunResult run_online(const InstanceSpec& inst, int horizon, std::uint64_t seed,
                     const RunConfig& cfg) {
  RunContext ctx(inst, seed, cfg);
  if (horizon < static_cast<int>(inst.n()))
    throw DistError("horizon must be at least the number of items");
  double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(inst, horizon);
  ctx.compute_opt();

  SampleStore store(ctx.meta.feedback, inst.supports);
  RunResult out;
  out.opt = ctx.opt;
  out.opt_is_mc = ctx.opt_is_mc;
  out.rounds.reserve(st(horizon));
  for (int t = 1; t <= horizon; ++t) {
    auto t0 = Clock::now();
    ProductDist est = round_estimates(store, ctx, delta);
    auto sigma = solve(inst, est);
    Evald ev = eval_expected(*sigma, inst, ctx.truth.get(), ctx.budget,
                             ctx.mc_samples, ctx.eval_rng);
    if (cfg.debug_checks) debug_round_checks(ctx, est, *sigma, ev);
    ExecutionTrace trace = execute(*sigma, ctx.draw(t));
    store.record(trace);
    double wall = ctx.timing ? ms_between(t0, Clock::now()) : 0.0;
    out.rounds.push_back(ctx.make_record(t, ev, trace, wall));
  }
  return out;
}

RunResult run_etc(const InstanceSpec& inst, int horizon, int explore_per_item,
                  std::uint64_t seed, const RunConfig& cfg) {
  RunContext ctx(inst, seed, cfg);
  int n = static_cast<int>(inst.n());
  if (horizon < n)
    throw DistError("horizon must be at least the number of items");
  std::int64_t budget_rounds =
      explore_per_item > 0
          ? static_cast<std::int64_t>(explore_per_item)
          : static_cast<std::int64_t>(
                std::ceil(std::pow(static_cast<double>(horizon), 2.0 / 3.0)));
  if (budget_rounds * n > horizon)
    throw DistError(
        "explore-then-commit refused: exploration budget exceeds the horizon");
  ctx.compute_opt();

  SampleStore store(ctx.meta.feedback, inst.supports);
  RunResult out;
  out.opt = ctx.opt;
  out.opt_is_mc = ctx.opt_is_mc;
  out.rounds.reserve(st(horizon));

  // exploration policies repeat: cache one policy + value per distinct cell
  std::map<std::pair<int, std::int64_t>, std::pair<std::unique_ptr<Policy>, Evald>>
      cache;
  std::int64_t explore_total = budget_rounds * n;
  for (int t = 1; t <= explore_total && t <= horizon; ++t) {
    auto t0 = Clock::now();
    int target = (t - 1) % n;
    std::int64_t visit = (t - 1) / n;
    std::int64_t variant = 0;
    if (ctx.meta.feedback == Feedback::binary)
      variant = visit % static_cast<std::int64_t>(inst.supports[st(target)].size());
    auto key = std::make_pair(target, variant);
    auto it = cache.find(key);
    if (it == cache.end()) {
      auto pol = make_explore_policy(inst, target, visit);
      Evald ev = eval_expected(*pol, inst, ctx.truth.get(), ctx.budget,
                               ctx.mc_samples, ctx.eval_rng);
      it = cache.emplace(key, std::make_pair(std::move(pol), ev)).first;
    }
    ExecutionTrace trace = execute(*it->second.first, ctx.draw(t));
    store.record(trace);
    double wall = ctx.timing ? ms_between(t0, Clock::now()) : 0.0;
    out.rounds.push_back(ctx.make_record(t, it->second.second, trace, wall));
  }

  if (explore_total >= horizon) return out;
  auto c0 = Clock::now();
  ProductDist est = store.empirical(ctx.meta.optimism());
  auto sigma = solve(inst, est);
  Evald ev = eval_expected(*sigma, inst, ctx.truth.get(), ctx.budget,
                           ctx.mc_samples, ctx.eval_rng);
  double commit_wall = ctx.timing ? ms_between(c0, Clock::now()) : 0.0;
  for (int t = static_cast<int>(explore_total) + 1; t <= horizon; ++t) {
    auto t0 = Clock::now();
    ExecutionTrace trace = execute(*sigma, ctx.draw(t));
    double wall = ctx.timing ? commit_wall + ms_between(t0, Clock::now()) : 0.0;
    commit_wall = 0.0;
    out.rounds.push_back(ctx.make_record(t, ev, trace, wall));
  }
  return out;
}

RunResult run_clairvoyant(const InstanceSpec& inst, int horizon,
                          std::uint64_t seed, const RunConfig& cfg) {
  RunContext ctx(inst, seed, cfg);
  if (!ctx.truth)
    throw DistError("clairvoyant baseline needs discrete ground truth");
  if (horizon < 1) throw DistError("horizon must be positive");
  ctx.compute_opt();

  auto sigma = solve(inst, *ctx.truth);
  Evald ev{ctx.opt, ctx.opt_is_mc};
  RunResult out;
  out.opt = ctx.opt;
  out.opt_is_mc = ctx.opt_is_mc;
  out.rounds.reserve(st(horizon));
  for (int t = 1; t <= horizon; ++t) {
    auto t0 = Clock::now();
    ExecutionTrace trace = execute(*sigma, ctx.draw(t));
    double wall = ctx.timing ? ms_between(t0, Clock::now()) : 0.0;
    out.rounds.push_back(ctx.make_record(t, ev, trace, wall));
  }
  return out;
}

std::vector<std::pair<int, double>> cumulative_regret(
    const std::vector<RoundRecord>& rounds) {
  std::vector<std::pair<int, double>> out;
  out.reserve(rounds.size());
  double cum = 0.0;
  for (const RoundRecord& r : rounds) {
    cum += r.regret_increment;
    out.emplace_back(r.t, cum);
  }
  return out;
}

}  // namespace mb
