#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mb/sampling.hpp"

using namespace mb;

TEST_CASE("confidence width") {
  CHECK_EQ(confidence_width(0.1, 0), 1.0);               // vacuous prior
  CHECK_EQ(confidence_width(2.0, 50), 0.0);              // exact-empirical edge
  CHECK_EQ(confidence_width(2.0 * std::exp(-4.0), 8), doctest::Approx(0.5));
  CHECK(confidence_width(0.1, 4) > confidence_width(0.1, 16));
  CHECK_EQ(confidence_width(1e-12, 1), 1.0);  // capped
  CHECK_THROWS_AS(confidence_width(0.0, 4), DistError);
  CHECK_THROWS_AS(confidence_width(2.5, 4), DistError);
  // union-bound variant: log(2k/delta) in the numerator
  CHECK_EQ(confidence_width_leveled(4.0 * std::exp(-4.0), 2, 50),
           doctest::Approx(0.2));
}

TEST_CASE("dominating construction, worked example") {
  // six 1s and two 3s on {1,2,3}; delta = 2 e^-4 makes eps exactly 1/2
  std::vector<double> sup{1.0, 2.0, 3.0};
  std::vector<double> samples{1, 1, 1, 1, 1, 1, 3, 3};
  double delta = 2.0 * std::exp(-4.0);
  DiscreteDist up = emp_stoc_dom(sup, samples, delta);
  CHECK_EQ(up.prob(0), doctest::Approx(0.25));
  CHECK_EQ(up.prob(1), doctest::Approx(0.0));
  CHECK_EQ(up.prob(2), doctest::Approx(0.75));

  // mirrored samples: six 3s and two 1s
  std::vector<double> mirrored{3, 3, 3, 3, 3, 3, 1, 1};
  DiscreteDist down = emp_stoc_dom_down(sup, mirrored, delta);
  CHECK_EQ(down.prob(0), doctest::Approx(0.75));
  CHECK_EQ(down.prob(1), doctest::Approx(0.0));
  CHECK_EQ(down.prob(2), doctest::Approx(0.25));

  DiscreteDist emp({1.0, 3.0}, {0.75, 0.25});
  DiscreteDist emp_mirror({1.0, 3.0}, {0.25, 0.75});
  CHECK(stochastically_dominates(up, emp));
  CHECK(stochastically_dominates(emp_mirror, down));
  CHECK_EQ(tv_distance(up, emp), doctest::Approx(0.5));  // exactly eps
  CHECK_EQ(tv_distance(down, emp_mirror), doctest::Approx(0.5));

  // same samples through the down construction saturate at the bottom
  DiscreteDist floor = emp_stoc_dom_down(sup, samples, delta);
  CHECK_EQ(floor.prob(0), doctest::Approx(1.0));
}

TEST_CASE("edge cases of the dominating construction") {
  std::vector<double> sup{0.0, 1.0, 2.0};

  // no samples: optimistic prior
  DiscreteDist prior = emp_stoc_dom(sup, {}, 0.1);
  CHECK_EQ(prior.prob(2), doctest::Approx(1.0));
  DiscreteDist prior_down = emp_stoc_dom_down(sup, {}, 0.1);
  CHECK_EQ(prior_down.prob(0), doctest::Approx(1.0));

  // eps = 0 returns the exact empirical
  DiscreteDist exact = emp_stoc_dom(sup, {0, 1, 1, 2}, 2.0);
  CHECK_EQ(exact.prob(0), doctest::Approx(0.25));
  CHECK_EQ(exact.prob(1), doctest::Approx(0.5));
  CHECK_EQ(exact.prob(2), doctest::Approx(0.25));

  // top mass + eps >= 1 collapses to the point mass at the top
  DiscreteDist top = emp_stoc_dom(sup, {2, 2, 1, 2}, 0.5);
  CHECK_EQ(top.prob(2), doctest::Approx(1.0));

  // samples off the support are rejected
  CHECK_THROWS_AS(emp_stoc_dom(sup, {0.5}, 0.1), DistError);

  // monotone in eps: smaller delta pushes mass upward
  DiscreteDist wide = emp_stoc_dom(sup, {0, 0, 1, 1, 2, 2}, 0.01);
  DiscreteDist narrow = emp_stoc_dom(sup, {0, 0, 1, 1, 2, 2}, 0.5);
  CHECK(stochastically_dominates(wide, narrow));
}

TEST_CASE("count-vector entry points match the sample-list forms") {
  std::vector<double> sup{1.0, 2.0, 3.0};
  std::vector<double> samples{1, 1, 1, 1, 1, 1, 3, 3};
  std::vector<std::int64_t> counts{6, 0, 2};
  double delta = 2.0 * std::exp(-4.0);
  CHECK_EQ(tv_distance(emp_stoc_dom(sup, samples, delta),
                       emp_stoc_dom_counts(sup, counts, delta)),
           doctest::Approx(0.0));
  CHECK_EQ(tv_distance(emp_stoc_dom_down(sup, samples, delta),
                       emp_stoc_dom_down_counts(sup, counts, delta)),
           doctest::Approx(0.0));
}

TEST_CASE("continuous construction, worked example") {
  // four evenly spaced samples on [0,1]; delta = 2 e^-1/2 makes eps 1/4
  double delta = 2.0 * std::exp(-0.5);
  StepCdf f = emp_stoc_dom_cts({0.2, 0.4, 0.6, 0.8}, 0.0, 1.0, delta);
  CHECK_EQ(f.eval(0.2), doctest::Approx(0.0));
  CHECK_EQ(f.eval(0.4), doctest::Approx(0.25));
  CHECK_EQ(f.eval(0.6), doctest::Approx(0.5));
  CHECK_EQ(f.eval(0.8), doctest::Approx(0.75));
  CHECK_EQ(f.eval(1.0), doctest::Approx(1.0));
  CHECK_EQ(f.eval(0.99), doctest::Approx(0.75));  // everything else at hi

  StepCdf emp = empirical_cdf({0.2, 0.4, 0.6, 0.8}, 0.0, 1.0);
  CHECK(stochastically_dominates(f, emp));
  CHECK_EQ(ks_distance(f, emp), doctest::Approx(0.25));

  CHECK_THROWS_AS(emp_stoc_dom_cts({}, 0.0, 1.0, 0.1), DistError);
  CHECK_THROWS_AS(emp_stoc_dom_cts({2.0}, 0.0, 1.0, 0.1), DistError);
}

TEST_CASE("censored construction, worked example") {
  // support {1,2}: 50 probes at level 2, half of them reached a_2;
  // delta = 4 e^-4 gives eps_2 = 0.2, so the tail estimate is 0.7
  std::vector<double> sup{1.0, 2.0};
  std::vector<std::vector<double>> by_level(2);
  for (int i = 0; i < 25; ++i) by_level[1].push_back(2.0);
  for (int i = 0; i < 25; ++i) by_level[1].push_back(1.0);
  double delta = 4.0 * std::exp(-4.0);
  DiscreteDist out = censored_dominating(sup, by_level, delta);
  CHECK_EQ(out.prob(0), doctest::Approx(0.3));
  CHECK_EQ(out.prob(1), doctest::Approx(0.7));

  // count-vector form agrees
  std::vector<std::vector<std::int64_t>> counts{{0}, {25, 25}};
  CHECK_EQ(tv_distance(censored_dominating_counts(sup, counts, delta), out),
           doctest::Approx(0.0));

  // no data: the transfer loop pushes everything to the top
  DiscreteDist prior = censored_dominating(sup, {{}, {}}, 0.1);
  CHECK_EQ(prior.prob(1), doctest::Approx(1.0));

  // a probe at level b also informs levels c < b via pooling: 100 samples
  // at level 3 give level 2 an estimate despite zero level-2 probes
  std::vector<double> sup3{1.0, 2.0, 3.0};
  std::vector<std::vector<double>> deep(3);
  for (int i = 0; i < 50; ++i) deep[2].push_back(3.0);
  for (int i = 0; i < 25; ++i) deep[2].push_back(2.0);
  for (int i = 0; i < 25; ++i) deep[2].push_back(1.0);
  // same observations truncated at level 2, no level-3 data
  std::vector<std::vector<double>> shallow(3);
  for (int i = 0; i < 75; ++i) shallow[1].push_back(2.0);
  for (int i = 0; i < 25; ++i) shallow[1].push_back(1.0);
  double eps = confidence_width_leveled(0.1, 3, 100);
  DiscreteDist a = censored_dominating(sup3, deep, 0.1);
  DiscreteDist b = censored_dominating(sup3, shallow, 0.1);
  CHECK_EQ(a.prob(0), doctest::Approx(0.25 - eps));
  CHECK_EQ(a.prob(1), doctest::Approx(0.25));
  CHECK_EQ(a.prob(2), doctest::Approx(0.5 + eps));
  // without the deep probes, level 3 falls back to the vacuous bound
  CHECK_EQ(b.prob(1), doctest::Approx(0.0));
  CHECK_EQ(b.prob(2), doctest::Approx(0.75 + eps));
  CHECK(a.prob(2) < b.prob(2));

  CHECK_THROWS_AS(censored_dominating(sup, {{3.0}, {}}, 0.1), DistError);
}

TEST_CASE("binary construction, worked example") {
  // support {1,2}: 10 trials at level 2, 5 successes; delta = 4 e^-0.8
  // gives eps_2 = 0.2
  std::vector<double> sup{1.0, 2.0};
  std::vector<std::pair<std::int64_t, std::int64_t>> counts{{0, 0}, {5, 10}};
  double delta = 4.0 * std::exp(-0.8);
  DiscreteDist out = binary_dominating(sup, counts, delta);
  CHECK_EQ(out.prob(0), doctest::Approx(0.3));
  CHECK_EQ(out.prob(1), doctest::Approx(0.7));

  // no data anywhere: point mass at the top
  DiscreteDist prior = binary_dominating(sup, {{0, 0}, {0, 0}}, 0.1);
  CHECK_EQ(prior.prob(1), doctest::Approx(1.0));

  // success counts cannot exceed trials
  CHECK_THROWS_AS(binary_dominating(sup, {{0, 0}, {3, 2}}, 0.1), DistError);
}

TEST_CASE("transfer loop caps moved mass at the available excess") {
  // three levels where the middle estimate is tiny: the top level cannot
  // receive more than what survives past the middle
  std::vector<double> sup{1.0, 2.0, 3.0};
  std::vector<std::pair<std::int64_t, std::int64_t>> counts{
      {0, 0}, {0, 1000}, {1000, 1000}};
  DiscreteDist out = binary_dominating(sup, counts, 0.5);
  // tail at level 2 is ~eps_2, so level 3 mass is capped by it
  double eps2 = confidence_width_leveled(0.5, 3, 1000);
  CHECK_EQ(out.prob(2), doctest::Approx(eps2));
  CHECK_EQ(out.prob(1), doctest::Approx(0.0));
  CHECK_EQ(out.prob(0), doctest::Approx(1.0 - eps2));
}

TEST_CASE("fuzz: samplers always dominate their empirical input") {
  Rng rng(2024);
  for (int iter = 0; iter < 500; ++iter) {
    std::size_t k = 1 + rng.below(4);
    std::vector<double> sup;
    double v = 0.5 * static_cast<double>(rng.below(3));
    for (std::size_t j = 0; j < k; ++j) {
      sup.push_back(v);
      v += 0.5 + 0.5 * static_cast<double>(rng.below(3));
    }
    std::size_t m = rng.below(40);
    std::vector<double> samples;
    std::vector<std::int64_t> counts(k, 0);
    for (std::size_t s = 0; s < m; ++s) {
      std::size_t j = rng.below(k);
      samples.push_back(sup[j]);
      ++counts[j];
    }
    double delta = 0.05 + 1.9 * rng.uniform();
    DiscreteDist up = emp_stoc_dom(sup, samples, delta);
    DiscreteDist down = emp_stoc_dom_down(sup, samples, delta);
    double eps = confidence_width(delta, m);
    if (m > 0) {
      std::vector<double> probs(k);
      for (std::size_t j = 0; j < k; ++j)
        probs[j] = static_cast<double>(counts[j]) / static_cast<double>(m);
      DiscreteDist emp(sup, probs);
      REQUIRE(stochastically_dominates(up, emp));
      REQUIRE(stochastically_dominates(emp, down));
      REQUIRE(tv_distance(up, emp) <= eps + 1e-12);
      REQUIRE(tv_distance(down, emp) <= eps + 1e-12);
    }
  }
}
