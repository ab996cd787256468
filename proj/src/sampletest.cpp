#include "mb/sampletest.hpp"

#include <cmath>

#include "mb/config.hpp"
#include "mb/sampling.hpp"

namespace mb {

namespace {

constexpr double kEventTol = 1e-12;  // float noise on non-strict boundaries

enum class Variant { up, down, cts, censored, binary };

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::up: return "up";
    case Variant::down: return "down";
    case Variant::cts: return "cts";
    case Variant::censored: return "censored";
    case Variant::binary: return "binary";
  }
  return "?";
}

// One trial: draw m samples, build the variant's estimate, test the
// guarantee event {dominance and closeness}.
bool trial_ok(Variant v, const DiscreteDist& truth, std::size_t m, double delta,
              Rng trial_rng) {
  const std::vector<double>& sup = truth.support();
  std::size_t k = sup.size();
  std::vector<double> samples(m);
  for (std::size_t s = 0; s < m; ++s)
    samples[s] = truth.sample(trial_rng.uniform_at(s));

  switch (v) {
    case Variant::up: {
      DiscreteDist out = emp_stoc_dom(sup, samples, delta);
      double eps = confidence_width(delta, m);
      return stochastically_dominates(out, truth) &&
             tv_distance(out, truth) <=
                 static_cast<double>(k) * eps + kEventTol;
    }
    case Variant::down: {
      DiscreteDist out = emp_stoc_dom_down(sup, samples, delta);
      double eps = confidence_width(delta, m);
      return stochastically_dominates(truth, out) &&
             tv_distance(out, truth) <=
                 static_cast<double>(k) * eps + kEventTol;
    }
    case Variant::cts: {
      double lo = sup.front(), hi = sup.back();
      StepCdf out = emp_stoc_dom_cts(samples, lo, hi, delta);
      std::vector<double> cdf(k);
      for (std::size_t j = 0; j < k; ++j) cdf[j] = truth.cdf_at(j);
      StepCdf tcdf(lo, hi, sup, cdf);
      double eps = confidence_width(delta, m);
      return stochastically_dominates(out, tcdf) &&
             ks_distance(out, tcdf) <= 2.0 * eps + kEventTol;
    }
    case Variant::censored: {
      // sample j probed at threshold level (j mod k) + 1
      std::vector<std::vector<double>> by_level(k);
      std::vector<std::size_t> level_count(k + 1, 0);
      for (std::size_t s = 0; s < m; ++s) {
        std::size_t c = s % k + 1;
        by_level[c - 1].push_back(std::min(samples[s], sup[c - 1]));
        ++level_count[c];
      }
      DiscreteDist out = censored_dominating(sup, by_level, delta);
      if (!stochastically_dominates(out, truth)) return false;
      for (std::size_t c = 1; c <= k; ++c) {
        std::size_t n_c = 0;  // pooled: a level-b probe informs all c <= b
        for (std::size_t b = c; b <= k; ++b) n_c += level_count[b];
        if (n_c == 0) continue;
        double bound = static_cast<double>(k) *
                       std::sqrt(2.0 * std::log(2.0 * static_cast<double>(k) /
                                                delta) /
                                 static_cast<double>(n_c));
        if (tv_distance(truncate_at(out, static_cast<int>(c)),
                        truncate_at(truth, static_cast<int>(c))) >
            bound + kEventTol)
          return false;
      }
      return true;
    }
    case Variant::binary: {
      std::vector<std::pair<std::int64_t, std::int64_t>> counts(k, {0, 0});
      for (std::size_t s = 0; s < m; ++s) {
        std::size_t c = s % k + 1;
        ++counts[c - 1].second;
        if (samples[s] >= sup[c - 1] - kSupportTol) ++counts[c - 1].first;
      }
      DiscreteDist out = binary_dominating(sup, counts, delta);
      if (!stochastically_dominates(out, truth)) return false;
      for (std::size_t c = 1; c <= k; ++c) {
        std::int64_t m_c = counts[c - 1].second;
        if (m_c == 0) continue;
        double bound = std::sqrt(
            2.0 * std::log(2.0 * static_cast<double>(k) / delta) /
            static_cast<double>(m_c));
        if (tv_distance(binary_compress(out, static_cast<int>(c)),
                        binary_compress(truth, static_cast<int>(c))) >
            bound + kEventTol)
          return false;
      }
      return true;
    }
  }
  return false;
}

VariantReport run_variant(Variant v, const DiscreteDist& truth,
                          const std::vector<std::size_t>& m_values,
                          double delta, std::size_t trials, std::uint64_t seed) {
  VariantReport rep;
  rep.variant = variant_name(v);
  rep.pass = true;
  Rng per_variant = Rng(seed).split(static_cast<std::uint64_t>(v) + 101);
  for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
    Rng per_m = per_variant.split(mi);
    std::size_t fails = 0;
    for (std::size_t trial = 0; trial < trials; ++trial)
      if (!trial_ok(v, truth, m_values[mi], delta, per_m.split(trial)))
        ++fails;
    double rate = static_cast<double>(fails) / static_cast<double>(trials);
    rep.rates.emplace_back(m_values[mi], rate);
    if (rate > delta * 1.2) rep.pass = false;
  }
  return rep;
}

}  // namespace

std::vector<double> sampling_failure_rates(
    const DiscreteDist& truth, const std::vector<std::size_t>& m_values,
    double delta, std::size_t trials, std::uint64_t seed) {
  if (!(delta > 0.0) || delta > 1.0)
    throw ConfigError("sampling test delta must lie in (0, 1]");
  if (static_cast<double>(trials) < 100.0 / delta)
    throw ConfigError("sampling test needs trials >= 100 / delta");
  VariantReport rep =
      run_variant(Variant::up, truth, m_values, delta, trials, seed);
  std::vector<double> rates;
  for (const auto& [m, rate] : rep.rates) {
    (void)m;
    rates.push_back(rate);
  }
  return rates;
}

std::vector<VariantReport> sampling_guarantee_test(const SampleTestConfig& cfg) {
  if (!(cfg.delta > 0.0) || cfg.delta > 1.0)
    throw ConfigError("sampling test delta must lie in (0, 1]");
  if (static_cast<double>(cfg.trials) < 100.0 / cfg.delta)
    throw ConfigError("sampling test needs trials >= 100 / delta");
  if (cfg.support.size() != cfg.weights.size())
    throw ConfigError("sampling test weights must match the support");
  double total = 0.0;
  for (double w : cfg.weights) total += w;
  if (!(total > 0.0)) throw ConfigError("sampling test weights must not all be zero");
  std::vector<double> probs = cfg.weights;
  for (double& p : probs) p /= total;
  DiscreteDist truth(cfg.support, probs);
  std::vector<VariantReport> out;
  for (Variant v : {Variant::up, Variant::down, Variant::cts, Variant::censored,
                    Variant::binary})
    out.push_back(
        run_variant(v, truth, cfg.m_values, cfg.delta, cfg.trials, cfg.seed));
  return out;
}

}  // namespace mb
