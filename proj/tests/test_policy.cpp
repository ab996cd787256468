#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mb/policy.hpp"
#include "mb/problems.hpp"

using namespace mb;

namespace {

// walk every joint realization with its probability
double enumerated_value(const Policy& policy, const ProductDist& dist) {
  std::vector<std::size_t> idx(dist.n(), 0);
  double total = 0.0;
  while (true) {
    double p = 1.0;
    std::vector<double> x(dist.n());
    for (std::size_t i = 0; i < dist.n(); ++i) {
      p *= dist.item(i).prob(idx[i]);
      x[i] = dist.item(i).value(idx[i]);
    }
    if (p > 0.0) total += p * execute(policy, x).payoff;
    std::size_t i = 0;
    for (; i < dist.n(); ++i) {
      if (++idx[i] < dist.item(i).size()) break;
      idx[i] = 0;
    }
    if (i == dist.n()) break;
  }
  return total;
}

// deliberately broken: probes item 0 forever
struct DoubleProbe final : Policy {
  DoubleProbe()
      : Policy({Sense::maximize, Direction::down, Feedback::semi_bandit, 1.0},
               {{0.0, 1.0}, {0.0, 1.0}}) {}
  InfoState initial() const override { return {{0.0}}; }
  Action act(const InfoState&) const override { return Action::probe(0, 0); }
  Step advance(const InfoState& s, const Action&, double) const override {
    return {{{s.v[0] + 1.0}}, 0.0};
  }
};

}  // namespace

TEST_CASE("observation channels") {
  std::vector<double> sup{1.0, 2.0, 3.0};
  CHECK_EQ(observe(Feedback::semi_bandit, sup, 0, 2.0), 2.0);
  CHECK_EQ(observe(Feedback::semi_bandit, sup, 0, 0.25), 0.25);

  CHECK_EQ(observe(Feedback::censored, sup, 0, 3.0), 0.0);  // null probe
  CHECK_EQ(observe(Feedback::censored, sup, 2, 3.0), 2.0);
  CHECK_EQ(observe(Feedback::censored, sup, 2, 1.0), 1.0);
  CHECK_EQ(observe(Feedback::censored, sup, 3, 3.0), 3.0);

  CHECK_EQ(observe(Feedback::binary, sup, 0, 3.0), 0.0);
  CHECK_EQ(observe(Feedback::binary, sup, 2, 2.0), 1.0);  // at the threshold
  CHECK_EQ(observe(Feedback::binary, sup, 2, 2.0 - 1e-6), 0.0);
  CHECK_EQ(observe(Feedback::binary, sup, 3, 2.0), 0.0);
}

TEST_CASE("optimism side from sense and direction") {
  ProblemMeta m{Sense::minimize, Direction::up, Feedback::semi_bandit, 1.0};
  CHECK(m.optimism() == Optimism::dominating);
  m = {Sense::maximize, Direction::down, Feedback::semi_bandit, 1.0};
  CHECK(m.optimism() == Optimism::dominating);
  m = {Sense::minimize, Direction::down, Feedback::semi_bandit, 1.0};
  CHECK(m.optimism() == Optimism::dominated);
  m = {Sense::maximize, Direction::up, Feedback::semi_bandit, 1.0};
  CHECK(m.optimism() == Optimism::dominated);
}

TEST_CASE("info state hashing pools equal knowledge") {
  InfoStateHash h;
  CHECK_EQ(h({{1.0, 2.0}}), h({{1.0, 2.0}}));
  CHECK(h({{1.0, 2.0}}) != h({{2.0, 1.0}}));
  CHECK(h({{0.0}}) != h({{}}));
}

TEST_CASE("execute runs the policy against fixed realizations") {
  DiscreteDist coin({0.0, 1.0}, {0.5, 0.5});
  ProductDist d({coin, coin});
  auto policy = solve_prophet(d);

  // first item accepted: one probe, payoff 1
  ExecutionTrace t = execute(*policy, {1.0, 0.0});
  CHECK_EQ(t.probed.size(), 1u);
  CHECK_EQ(t.probed[0].item, 0);
  CHECK_EQ(t.probed[0].observation, 1.0);
  CHECK_EQ(t.payoff, 1.0);

  // first rejected, second accepted
  t = execute(*policy, {0.0, 1.0});
  CHECK_EQ(t.probed.size(), 2u);
  CHECK_EQ(t.payoff, 1.0);

  // nothing worth taking
  t = execute(*policy, {0.0, 0.0});
  CHECK_EQ(t.payoff, 0.0);

  CHECK_THROWS_AS(execute(*policy, {1.0}), DistError);
  DoubleProbe bad;
  CHECK_THROWS_AS(execute(bad, {0.0, 0.0}), std::logic_error);
}

TEST_CASE("prophet on two fair coins") {
  DiscreteDist coin({0.0, 1.0}, {0.5, 0.5});
  ProductDist d({coin, coin});
  auto policy = solve_prophet(d);

  // accept the first item only at 1 (continuation is 0.5), then take
  // anything positive
  CHECK_EQ(exact_value(*policy, d), doctest::Approx(0.75));
  CHECK_EQ(enumerated_value(*policy, d), doctest::Approx(0.75));

  auto q = item_probe_probabilities(*policy, d);
  CHECK_EQ(q[0], doctest::Approx(1.0));
  CHECK_EQ(q[1], doctest::Approx(0.5));

  auto by_level = probe_probabilities(*policy, d);
  CHECK_EQ(by_level.at({0, 0}), doctest::Approx(1.0));
  CHECK_EQ(by_level.at({1, 0}), doctest::Approx(0.5));
}

TEST_CASE("series testing orders by failure rate per cost") {
  auto policy = solve_series_testing({0.5, 0.9}, {1.0, 1.0});
  DiscreteDist a({0.0, 1.0}, {0.5, 0.5});
  DiscreteDist b({0.0, 1.0}, {0.9, 0.1});
  ProductDist d({a, b});

  // test the flaky component first: 1 + 0.5 * 1
  CHECK_EQ(exact_value(*policy, d), doctest::Approx(1.5));
  CHECK_EQ(enumerated_value(*policy, d), doctest::Approx(1.5));

  // first failure ends the run
  ExecutionTrace t = execute(*policy, {1.0, 0.0});
  CHECK_EQ(t.probed.size(), 1u);
  CHECK_EQ(t.payoff, 1.0);
  t = execute(*policy, {0.0, 0.0});
  CHECK_EQ(t.probed.size(), 2u);
  CHECK_EQ(t.payoff, 2.0);
}

TEST_CASE("pandora opens in reservation order and stops at the cap") {
  DiscreteDist v({0.0, 10.0}, {0.5, 0.5});
  ProductDist d({v, v});
  auto policy = solve_pandora(d, {1.0, 1.0});

  // E[(X - 8)^+] = 1, so both boxes have reservation value 8
  CHECK_EQ(reservation_value(v, 1.0), doctest::Approx(8.0));
  CHECK_EQ(exact_value(*policy, d), doctest::Approx(6.0));
  CHECK_EQ(enumerated_value(*policy, d), doctest::Approx(6.0));

  // a 10 beats the second reservation value, so the run stops
  ExecutionTrace t = execute(*policy, {10.0, 10.0});
  CHECK_EQ(t.probed.size(), 1u);
  CHECK_EQ(t.payoff, doctest::Approx(9.0));
  t = execute(*policy, {0.0, 10.0});
  CHECK_EQ(t.payoff, doctest::Approx(8.0));
  t = execute(*policy, {0.0, 0.0});
  CHECK_EQ(t.payoff, doctest::Approx(-2.0));
}

TEST_CASE("exact value agrees with exhaustive enumeration") {
  // censored feedback: two fare classes, one unit
  DiscreteDist d1({0.0, 1.0}, {0.4, 0.6});
  DiscreteDist d2({0.0, 1.0}, {0.3, 0.7});
  ProductDist demands({d1, d2});
  auto srm = solve_srm(demands, {2.0, 1.0}, 1);
  CHECK_EQ(exact_value(*srm, demands),
           doctest::Approx(enumerated_value(*srm, demands)));

  // binary feedback: two iid buyers, one unit to sell
  DiscreteDist val({1.0, 2.0}, {0.5, 0.5});
  ProductDist vals({val, val});
  auto fspm = solve_fspm(vals, 1);
  CHECK_EQ(exact_value(*fspm, vals), doctest::Approx(1.5));
  CHECK_EQ(enumerated_value(*fspm, vals), doctest::Approx(1.5));
}

TEST_CASE("monte carlo value matches the exact recursion") {
  DiscreteDist coin({0.0, 1.0}, {0.5, 0.5});
  ProductDist d({coin, coin});
  auto policy = solve_prophet(d);
  std::vector<TrueDistSpec> truth{coin, coin};
  auto [mean, se] = monte_carlo_value(*policy, truth, 20000, Rng(11));
  CHECK(se > 0.0);
  CHECK(std::abs(mean - 0.75) <= 3.0 * se);

  CHECK_THROWS_AS(monte_carlo_value(*policy, truth, 0, Rng(1)), DistError);
  CHECK_THROWS_AS(monte_carlo_value(*policy, {coin}, 10, Rng(1)), DistError);
}

TEST_CASE("state budget cuts off the recursion") {
  DiscreteDist coin({0.0, 1.0}, {0.5, 0.5});
  ProductDist d({coin, coin});
  auto policy = solve_prophet(d);
  CHECK_THROWS_AS(exact_value(*policy, d, 2), StateBudgetExceeded);
  CHECK_THROWS_AS(probe_probabilities(*policy, d, 2), StateBudgetExceeded);
  CHECK_EQ(default_state_budget(), 1000000u);
}
