#include "mb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mb {

namespace {

constexpr std::size_t kTreeNodeCap = 50000;

std::size_t st(double v) { return static_cast<std::size_t>(v); }

struct TreeTooBig {};

struct TreeBudget {
  std::size_t left = kTreeNodeCap;
  void take() {
    if (left == 0) throw TreeTooBig{};
    --left;
  }
};

std::unique_ptr<OracleNode> make_stop(double payoff, TreeBudget& tb) {
  tb.take();
  auto node = std::make_unique<OracleNode>();
  node->action = Action::stop(payoff);
  return node;
}

using Memo = std::unordered_map<InfoState, double, InfoStateHash>;

void budget_check(const Memo& memo, std::size_t budget) {
  if (memo.size() >= budget) throw StateBudgetExceeded();
}

// ---------------------------------------------------------------- series

struct SeriesOracle {
  const std::vector<double>& costs;
  std::vector<double> fail;
  std::size_t budget;
  Memo memo;

  double value(std::uint64_t mask) {
    std::size_t n = costs.size();
    if (mask + 1 == (1ULL << n)) return 0.0;
    InfoState key{{static_cast<double>(mask)}};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double best = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) continue;
      double v = costs[i] + (1.0 - fail[i]) * value(mask | (1ULL << i));
      best = std::min(best, v);
    }
    budget_check(memo, budget);
    memo.emplace(key, best);
    return best;
  }

  int arg(std::uint64_t mask) {
    std::size_t n = costs.size();
    double best = 1e300;
    int bi = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) continue;
      double v = costs[i] + (1.0 - fail[i]) * value(mask | (1ULL << i));
      if (v < best) {
        best = v;
        bi = static_cast<int>(i);
      }
    }
    return bi;
  }

  std::unique_ptr<OracleNode> tree(std::uint64_t mask, TreeBudget& tb) {
    std::size_t n = costs.size();
    if (mask + 1 == (1ULL << n)) return make_stop(0.0, tb);
    tb.take();
    int i = arg(mask);
    auto node = std::make_unique<OracleNode>();
    node->action = Action::probe(i, 0);
    std::size_t ui = st(i);
    OracleNode::Child failure{1.0, fail[ui], costs[ui], make_stop(0.0, tb)};
    node->children.push_back(std::move(failure));
    OracleNode::Child pass{0.0, 1.0 - fail[ui], costs[ui],
                           tree(mask | (1ULL << ui), tb)};
    node->children.push_back(std::move(pass));
    return node;
  }
};

// --------------------------------------------------------------- pandora

struct PandoraOracle {
  const std::vector<double>& costs;
  const ProductDist& dist;
  std::size_t budget;
  Memo memo;

  double value(std::uint64_t mask, double best) {
    InfoState key{{static_cast<double>(mask), best}};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double v = best;  // stop and keep the best opened value
    for (std::size_t i = 0; i < costs.size(); ++i) {
      if (mask & (1ULL << i)) continue;
      const DiscreteDist& d = dist.item(i);
      double acc = -costs[i];
      for (std::size_t j = 0; j < d.size(); ++j)
        if (d.prob(j) > 0.0)
          acc += d.prob(j) *
                 value(mask | (1ULL << i), std::max(best, d.value(j)));
      v = std::max(v, acc);
    }
    budget_check(memo, budget);
    memo.emplace(key, v);
    return v;
  }

  std::unique_ptr<OracleNode> tree(std::uint64_t mask, double best,
                                   TreeBudget& tb) {
    double stop_v = best;
    double v = stop_v;
    int bi = -1;
    for (std::size_t i = 0; i < costs.size(); ++i) {
      if (mask & (1ULL << i)) continue;
      const DiscreteDist& d = dist.item(i);
      double acc = -costs[i];
      for (std::size_t j = 0; j < d.size(); ++j)
        if (d.prob(j) > 0.0)
          acc += d.prob(j) *
                 value(mask | (1ULL << i), std::max(best, d.value(j)));
      if (acc > v) {
        v = acc;
        bi = static_cast<int>(i);
      }
    }
    if (bi < 0) return make_stop(stop_v, tb);
    tb.take();
    auto node = std::make_unique<OracleNode>();
    node->action = Action::probe(bi, 0);
    const DiscreteDist& d = dist.item(st(bi));
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d.prob(j) <= 0.0) continue;
      OracleNode::Child ch;
      ch.observation = d.value(j);
      ch.prob = d.prob(j);
      ch.reward = -costs[st(bi)];
      ch.node = tree(mask | (1ULL << st(bi)), std::max(best, d.value(j)), tb);
      node->children.push_back(std::move(ch));
    }
    return node;
  }
};

// --------------------------------------------------------------- prophet

struct ProphetOracle {
  const ProductDist& dist;

  std::vector<double> cont;  // cont[i] = value of facing items i..n-1

  void build() {
    std::size_t n = dist.n();
    cont.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      const DiscreteDist& d = dist.item(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < d.size(); ++j)
        acc += d.prob(j) * std::max(d.value(j), cont[i + 1]);
      cont[i] = acc;
    }
  }

  std::unique_ptr<OracleNode> tree(std::size_t i, TreeBudget& tb) {
    if (i >= dist.n()) return make_stop(0.0, tb);
    tb.take();
    auto node = std::make_unique<OracleNode>();
    node->action = Action::probe(static_cast<int>(i), 0);
    const DiscreteDist& d = dist.item(i);
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d.prob(j) <= 0.0) continue;
      OracleNode::Child ch;
      ch.observation = d.value(j);
      ch.prob = d.prob(j);
      if (d.value(j) > cont[i + 1]) {
        ch.reward = d.value(j);
        ch.node = make_stop(0.0, tb);
      } else {
        ch.reward = 0.0;
        ch.node = tree(i + 1, tb);
      }
      node->children.push_back(std::move(ch));
    }
    return node;
  }
};

// ------------------------------------------------------------------ srm

struct SrmOracle {
  const std::vector<double>& prices;
  int capacity;
  const ProductDist& dist;  // demand of item j (class j+1)
  std::size_t budget;
  Memo memo;

  // t arrivals done; items arrive n-1 .. 0
  double value(std::size_t t, int cap) {
    std::size_t n = prices.size();
    if (t >= n) return 0.0;
    InfoState key{{static_cast<double>(t), static_cast<double>(cap)}};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t idx = n - 1 - t;
    const DiscreteDist& d = dist.item(idx);
    double best = -1e300;
    for (int q = 0; q <= cap; ++q) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (d.prob(j) <= 0.0) continue;
        int sold = std::min(static_cast<int>(std::lround(d.value(j))), q);
        acc += d.prob(j) * (prices[idx] * sold + value(t + 1, cap - sold));
      }
      best = std::max(best, acc);
    }
    budget_check(memo, budget);
    memo.emplace(key, best);
    return best;
  }

  std::unique_ptr<OracleNode> tree(std::size_t t, int cap, TreeBudget& tb) {
    std::size_t n = prices.size();
    if (t >= n) return make_stop(0.0, tb);
    std::size_t idx = n - 1 - t;
    const DiscreteDist& d = dist.item(idx);
    double best = -1e300;
    int bq = 0;
    for (int q = 0; q <= cap; ++q) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (d.prob(j) <= 0.0) continue;
        int sold = std::min(static_cast<int>(std::lround(d.value(j))), q);
        acc += d.prob(j) * (prices[idx] * sold + value(t + 1, cap - sold));
      }
      if (acc > best) {
        best = acc;
        bq = q;
      }
    }
    tb.take();
    auto node = std::make_unique<OracleNode>();
    node->action = Action::probe(static_cast<int>(idx), bq == 0 ? 0 : bq + 1);
    // group outcomes by units sold (the censored observation)
    std::vector<double> sold_prob(st(bq) + 1, 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) {
      int sold = std::min(static_cast<int>(std::lround(d.value(j))), bq);
      sold_prob[st(sold)] += d.prob(j);
    }
    for (int sold = 0; sold <= bq; ++sold) {
      if (sold_prob[st(sold)] <= 0.0) continue;
      OracleNode::Child ch;
      ch.observation = sold;
      ch.prob = sold_prob[st(sold)];
      ch.reward = prices[idx] * sold;
      ch.node = tree(t + 1, cap - sold, tb);
      node->children.push_back(std::move(ch));
    }
    return node;
  }
};

// ----------------------------------------------------------------- fspm

struct FspmOracle {
  int rank;
  const ProductDist& dist;
  std::size_t budget;
  Memo memo;

  double value(std::size_t i, int r) {
    if (i >= dist.n() || r == 0) return 0.0;
    InfoState key{{static_cast<double>(i), static_cast<double>(r)}};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const DiscreteDist& d = dist.item(i);
    double best = value(i + 1, r);  // skip this buyer
    for (std::size_t lvl = 1; lvl <= d.size(); ++lvl) {
      double tail = d.tail_at(lvl - 1);
      double v = tail * (d.value(lvl - 1) + value(i + 1, r - 1)) +
                 (1.0 - tail) * value(i + 1, r);
      best = std::max(best, v);
    }
    budget_check(memo, budget);
    memo.emplace(key, best);
    return best;
  }

  std::unique_ptr<OracleNode> tree(std::size_t i, int r, TreeBudget& tb) {
    if (i >= dist.n() || r == 0) return make_stop(0.0, tb);
    const DiscreteDist& d = dist.item(i);
    double best = value(i + 1, r);
    int bl = 0;
    for (std::size_t lvl = 1; lvl <= d.size(); ++lvl) {
      double tail = d.tail_at(lvl - 1);
      double v = tail * (d.value(lvl - 1) + value(i + 1, r - 1)) +
                 (1.0 - tail) * value(i + 1, r);
      if (v > best) {
        best = v;
        bl = static_cast<int>(lvl);
      }
    }
    tb.take();
    auto node = std::make_unique<OracleNode>();
    node->action = Action::probe(static_cast<int>(i), bl);
    if (bl == 0) {
      OracleNode::Child ch;
      ch.observation = 0.0;
      ch.prob = 1.0;
      ch.reward = 0.0;
      ch.node = tree(i + 1, r, tb);
      node->children.push_back(std::move(ch));
    } else {
      double tail = d.tail_at(st(bl) - 1);
      if (tail < 1.0) {
        OracleNode::Child ch;
        ch.observation = 0.0;
        ch.prob = 1.0 - tail;
        ch.reward = 0.0;
        ch.node = tree(i + 1, r, tb);
        node->children.push_back(std::move(ch));
      }
      if (tail > 0.0) {
        OracleNode::Child ch;
        ch.observation = 1.0;
        ch.prob = tail;
        ch.reward = d.value(st(bl) - 1);
        ch.node = tree(i + 1, r - 1, tb);
        node->children.push_back(std::move(ch));
      }
    }
    return node;
  }
};

}  // namespace

OracleResult brute_force_opt(const InstanceSpec& inst, const ProductDist& dist,
                             std::size_t state_budget) {
  inst.validate();
  if (dist.n() != inst.n())
    throw DistError("oracle: distribution does not cover every item");
  OracleResult out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        TreeBudget tb;
        if constexpr (std::is_same_v<T, SeriesTesting>) {
          if (inst.n() > 62) throw StateBudgetExceeded();
          std::vector<double> fail(inst.n());
          for (std::size_t i = 0; i < inst.n(); ++i) {
            const DiscreteDist& d = dist.item(i);
            int one = d.find(1.0);
            fail[i] = one < 0 ? 0.0 : d.prob(st(one));
          }
          SeriesOracle o{p.costs, std::move(fail), state_budget, {}};
          out.optimum = o.value(0);
          out.state_count = o.memo.size();
          try {
            out.policy = o.tree(0, tb);
          } catch (const TreeTooBig&) {
            out.policy = nullptr;
          }
        } else if constexpr (std::is_same_v<T, PandoraBox>) {
          if (inst.n() > 62) throw StateBudgetExceeded();
          PandoraOracle o{p.costs, dist, state_budget, {}};
          out.optimum = o.value(0, 0.0);
          out.state_count = o.memo.size();
          try {
            out.policy = o.tree(0, 0.0, tb);
          } catch (const TreeTooBig&) {
            out.policy = nullptr;
          }
        } else if constexpr (std::is_same_v<T, ProphetInequality>) {
          ProphetOracle o{dist, {}};
          o.build();
          out.optimum = o.cont[0];
          out.state_count = o.cont.size();
          try {
            out.policy = o.tree(0, tb);
          } catch (const TreeTooBig&) {
            out.policy = nullptr;
          }
        } else if constexpr (std::is_same_v<T, SingleResourceRevenue>) {
          SrmOracle o{p.prices, p.capacity, dist, state_budget, {}};
          out.optimum = o.value(0, p.capacity);
          out.state_count = o.memo.size();
          try {
            out.policy = o.tree(0, p.capacity, tb);
          } catch (const TreeTooBig&) {
            out.policy = nullptr;
          }
        } else {
          static_assert(std::is_same_v<T, SequentialPricing>);
          FspmOracle o{p.rank, dist, state_budget, {}};
          out.optimum = o.value(0, p.rank);
          out.state_count = o.memo.size();
          try {
            out.policy = o.tree(0, p.rank, tb);
          } catch (const TreeTooBig&) {
            out.policy = nullptr;
          }
        }
      },
      inst.problem);
  return out;
}

double tree_value(const OracleNode* node) {
  if (node == nullptr) throw DistError("tree_value: empty tree");
  if (node->action.kind == Action::Kind::stop) return node->action.payoff;
  double acc = 0.0;
  for (const auto& ch : node->children)
    acc += ch.prob * (ch.reward + tree_value(ch.node.get()));
  return acc;
}

namespace {

void require_itemwise_dominance(const ProductDist& high,
                                const ProductDist& low, const char* what) {
  if (high.n() != low.n()) throw DistError("product size mismatch");
  for (std::size_t i = 0; i < high.n(); ++i)
    if (!stochastically_dominates(high.item(i), low.item(i)))
      throw DistError(std::string(what) +
                      ": dominance precondition violated");
}

}  // namespace

bool check_monotonicity(const InstanceSpec& inst, const ProductDist& d,
                        const ProductDist& e, double slack) {
  require_itemwise_dominance(e, d, "check_monotonicity");
  double opt_d = brute_force_opt(inst, d).optimum;
  double opt_e = brute_force_opt(inst, e).optimum;
  if (inst.meta().direction == Direction::up) return opt_e <= opt_d + slack;
  return opt_e >= opt_d - slack;
}

StabilityReport check_stability(const InstanceSpec& inst, const ProductDist& d,
                                const ProductDist& e, double alpha,
                                const Policy& sigma,
                                std::size_t state_budget) {
  ProblemMeta meta = inst.meta();
  if (meta.optimism() == Optimism::dominating)
    require_itemwise_dominance(e, d, "check_stability");
  else
    require_itemwise_dominance(d, e, "check_stability");

  double opt_d = exact_value(*solve(inst, d), d, state_budget);
  double val = exact_value(sigma, d, state_budget);
  StabilityReport rep;
  rep.gap = meta.sense == Sense::minimize ? val - alpha * opt_d
                                          : alpha * opt_d - val;

  double sum = 0.0;
  for (const auto& [key, q] : probe_probabilities(sigma, d, state_budget)) {
    auto [item, level] = key;
    const DiscreteDist& di = d.item(st(item));
    const DiscreteDist& ei = e.item(st(item));
    double dist_ic = 0.0;
    switch (meta.feedback) {
      case Feedback::semi_bandit:
        dist_ic = tv_distance(di, ei);
        break;
      case Feedback::censored:
        // null offers reveal and sell nothing; no divergence possible
        if (level > 0)
          dist_ic = tv_distance(truncate_at(di, level), truncate_at(ei, level));
        break;
      case Feedback::binary:
        if (level > 0)
          dist_ic = tv_distance(binary_compress(di, level),
                                binary_compress(ei, level));
        break;
    }
    sum += q * dist_ic;
  }
  rep.bound = meta.f_max * sum;
  rep.ok = rep.gap <= rep.bound + 1e-9;
  return rep;
}

}  // namespace mb
