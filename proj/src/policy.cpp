#include "mb/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

namespace mb {

double observe(Feedback mode, const std::vector<double>& support, int level,
               double raw) {
  switch (mode) {
    case Feedback::semi_bandit:
      return raw;
    case Feedback::censored:
      if (level == 0) return 0.0;
      return std::min(raw, support[static_cast<std::size_t>(level - 1)]);
    case Feedback::binary:
      if (level == 0) return 0.0;
      return raw >= support[static_cast<std::size_t>(level - 1)] - kSupportTol
                 ? 1.0
                 : 0.0;
  }
  throw std::logic_error("bad feedback mode");
}

ExecutionTrace execute(const Policy& policy,
                       const std::vector<double>& realization) {
  if (realization.size() != policy.n_items())
    throw DistError("execute: realization size mismatch");
  ExecutionTrace trace;
  std::vector<bool> probed(policy.n_items(), false);
  InfoState s = policy.initial();
  for (std::size_t steps = 0; steps <= policy.n_items(); ++steps) {
    Action a = policy.act(s);
    if (a.kind == Action::Kind::stop) {
      trace.payoff += a.payoff;
      return trace;
    }
    if (a.item < 0 || static_cast<std::size_t>(a.item) >= policy.n_items() ||
        probed[static_cast<std::size_t>(a.item)])
      throw std::logic_error("policy probed an invalid or used item");
    probed[static_cast<std::size_t>(a.item)] = true;
    double obs = observe(policy.meta().feedback,
                         policy.supports()[static_cast<std::size_t>(a.item)],
                         a.level, realization[static_cast<std::size_t>(a.item)]);
    trace.probed.push_back({a.item, a.level, obs});
    auto step = policy.advance(s, a, obs);
    trace.payoff += step.payoff_delta;
    s = std::move(step.state);
  }
  throw std::logic_error("policy failed to stop after probing every item");
}

std::size_t default_state_budget() {
  static const std::size_t budget = [] {
    if (const char* env = std::getenv("MB_STATE_BUDGET")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(1000000);
  }();
  return budget;
}

namespace {

// Observation classes of one probe: (probability, observation) pairs with
// zero-probability branches dropped.
std::vector<std::pair<double, double>> branches(Feedback mode,
                                                const Action& a,
                                                const DiscreteDist& d) {
  std::vector<std::pair<double, double>> out;
  switch (mode) {
    case Feedback::semi_bandit:
      for (std::size_t i = 0; i < d.size(); ++i)
        if (d.prob(i) > 0.0) out.emplace_back(d.prob(i), d.value(i));
      break;
    case Feedback::censored: {
      if (a.level == 0) {
        out.emplace_back(1.0, 0.0);
        break;
      }
      std::size_t c = static_cast<std::size_t>(a.level);
      if (c > d.size()) throw DistError("probe level beyond support");
      for (std::size_t i = 0; i + 1 < c; ++i)
        if (d.prob(i) > 0.0) out.emplace_back(d.prob(i), d.value(i));
      double tail = d.tail_at(c - 1);
      if (tail > 0.0) out.emplace_back(tail, d.value(c - 1));
      break;
    }
    case Feedback::binary: {
      if (a.level == 0) {
        out.emplace_back(1.0, 0.0);
        break;
      }
      std::size_t c = static_cast<std::size_t>(a.level);
      if (c > d.size()) throw DistError("probe level beyond support");
      double tail = d.tail_at(c - 1);
      if (tail < 1.0) out.emplace_back(1.0 - tail, 0.0);
      if (tail > 0.0) out.emplace_back(tail, 1.0);
      break;
    }
  }
  return out;
}

struct Evaluator {
  const Policy& policy;
  const ProductDist& dist;
  std::size_t budget;
  std::unordered_map<InfoState, double, InfoStateHash> memo;

  double value(const InfoState& s) {
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    Action a = policy.act(s);
    double v;
    if (a.kind == Action::Kind::stop) {
      v = a.payoff;
    } else {
      v = 0.0;
      const DiscreteDist& d = dist.item(static_cast<std::size_t>(a.item));
      for (auto [p, obs] : branches(policy.meta().feedback, a, d)) {
        auto step = policy.advance(s, a, obs);
        v += p * (step.payoff_delta + value(step.state));
      }
    }
    if (memo.size() >= budget) throw StateBudgetExceeded();
    memo.emplace(s, v);
    return v;
  }
};

}  // namespace

double exact_value(const Policy& policy, const ProductDist& dist,
                   std::size_t state_budget) {
  if (dist.n() != policy.n_items())
    throw DistError("exact_value: item count mismatch");
  Evaluator ev{policy, dist, state_budget, {}};
  return ev.value(policy.initial());
}

std::map<std::pair<int, int>, double> probe_probabilities(
    const Policy& policy, const ProductDist& dist, std::size_t state_budget) {
  if (dist.n() != policy.n_items())
    throw DistError("probe_probabilities: item count mismatch");
  std::map<std::pair<int, int>, double> q;
  std::unordered_map<InfoState, double, InfoStateHash> wave, next;
  wave.emplace(policy.initial(), 1.0);
  std::size_t seen = 1;
  // Every probe consumes an item, so mass dies out within n_items waves.
  for (std::size_t depth = 0; depth <= policy.n_items() && !wave.empty();
       ++depth) {
    next.clear();
    for (const auto& [s, mass] : wave) {
      Action a = policy.act(s);
      if (a.kind == Action::Kind::stop) continue;
      q[{a.item, a.level}] += mass;
      const DiscreteDist& d = dist.item(static_cast<std::size_t>(a.item));
      for (auto [p, obs] : branches(policy.meta().feedback, a, d)) {
        auto step = policy.advance(s, a, obs);
        next[std::move(step.state)] += p * mass;
      }
    }
    seen += next.size();
    if (seen > state_budget) throw StateBudgetExceeded();
    std::swap(wave, next);
  }
  if (!wave.empty())
    throw std::logic_error("policy failed to stop after probing every item");
  return q;
}

std::vector<double> item_probe_probabilities(const Policy& policy,
                                             const ProductDist& dist,
                                             std::size_t state_budget) {
  std::vector<double> q(policy.n_items(), 0.0);
  for (const auto& [key, p] : probe_probabilities(policy, dist, state_budget))
    q[static_cast<std::size_t>(key.first)] += p;
  return q;
}

std::pair<double, double> monte_carlo_value(
    const Policy& policy, const std::vector<TrueDistSpec>& truth,
    std::size_t n_samples, Rng rng) {
  if (truth.size() != policy.n_items())
    throw DistError("monte_carlo_value: item count mismatch");
  if (n_samples == 0) throw DistError("monte_carlo_value: need samples");
  std::vector<Rng> streams;
  streams.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    streams.push_back(rng.split(i));
  double sum = 0.0, sumsq = 0.0;
  std::vector<double> x(truth.size());
  for (std::size_t t = 0; t < n_samples; ++t) {
    for (std::size_t i = 0; i < truth.size(); ++i)
      x[i] = sample(truth[i], streams[i].uniform_at(t));
    double payoff = execute(policy, x).payoff;
    sum += payoff;
    sumsq += payoff * payoff;
  }
  double mean = sum / static_cast<double>(n_samples);
  double var = std::max(sumsq / static_cast<double>(n_samples) - mean * mean, 0.0);
  double stderr_ = std::sqrt(var / static_cast<double>(n_samples));
  return {mean, stderr_};
}

}  // namespace mb
