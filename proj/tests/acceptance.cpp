// Acceptance gate.  Runs every release criterion and prints one
// [PASS]/[FAIL] line per criterion; exit status is nonzero if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "mb/config.hpp"
#include "mb/csv.hpp"
#include "mb/experiment.hpp"
#include "mb/sampletest.hpp"
#include "mb/sampling.hpp"
#include "mb/slope.hpp"
#include "mb/verify.hpp"

using namespace mb;
namespace fs = std::filesystem;

#ifndef MB_SOURCE_DIR
#define MB_SOURCE_DIR "."
#endif

namespace {

struct Line {
  int id = 0;
  bool ok = false;
  std::string detail;
};

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::string src(const std::string& rel) {
  return std::string(MB_SOURCE_DIR) + "/" + rel;
}

fs::path scratch(const std::string& leaf) {
  fs::path p = fs::temp_directory_path() / "mb_accept" / leaf;
  fs::remove_all(p);
  return p;
}

int n_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---- criteria 1, 4, 5: verification suites --------------------------------

Line verify_suite(int id, VerifyOptions opt, double limit_s,
                  const char* label) {
  double t0 = now_s();
  VerifyReport rep = run_verify(opt);
  double secs = now_s() - t0;
  int checked = rep.oracle_checked + rep.monotonicity_checked +
                rep.stability_checked;
  int failures = rep.oracle_failures + rep.monotonicity_failures +
                 rep.stability_failures;
  bool ok = failures == 0 && (limit_s <= 0 || secs <= limit_s);
  return {id, ok,
          fmt("%s: %d checks, %d failures, %.1fs", label, checked, failures,
              secs)};
}

// ---- criterion 2: statistical sampler guarantees ---------------------------

Line sampling_criterion() {
  SampleTestConfig cfg;
  cfg.support = {1.0, 2.0, 3.0};
  cfg.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  cfg.delta = 0.1;
  cfg.m_values = {16, 64, 256};
  cfg.trials = 2000;
  double t0 = now_s();
  std::vector<VariantReport> reports = sampling_guarantee_test(cfg);
  double secs = now_s() - t0;
  double worst = 0.0;
  bool ok = secs <= 120.0;
  for (const VariantReport& rep : reports) {
    ok = ok && rep.pass;
    for (const auto& [m, rate] : rep.rates) worst = std::max(worst, rate);
  }
  ok = ok && worst <= 0.12;
  return {2, ok,
          fmt("sampler guarantees: %zu variants, worst failure rate %.4f "
              "(bound 0.12), %.1fs",
              reports.size(), worst, secs)};
}

// ---- criterion 3: fuzzing the constructions --------------------------------

bool valid_pmf(const DiscreteDist& d) {
  double total = 0.0;
  for (double p : d.probs()) {
    if (p < -1e-12) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= 1e-9;
}

std::vector<double> random_support(Rng& rng, std::size_t k) {
  std::vector<double> sup;
  double v = -1.0 + 0.25 * static_cast<double>(rng.below(8));
  for (std::size_t j = 0; j < k; ++j) {
    sup.push_back(v);
    v += 0.25 + 0.25 * static_cast<double>(rng.below(6));
  }
  return sup;
}

int fuzz_updown(Rng& rng, int iters) {
  int bad = 0;
  for (int it = 0; it < iters; ++it) {
    std::size_t k = 1 + rng.below(6);
    std::vector<double> sup = random_support(rng, k);
    std::size_t m = rng.below(300);
    std::vector<double> samples;
    std::vector<std::int64_t> counts(k, 0);
    for (std::size_t s = 0; s < m; ++s) {
      std::size_t j = rng.below(k);
      samples.push_back(sup[j]);
      ++counts[j];
    }
    double delta = 0.01 + 1.99 * rng.uniform();
    DiscreteDist up = emp_stoc_dom(sup, samples, delta);
    DiscreteDist down = emp_stoc_dom_down(sup, samples, delta);
    if (!valid_pmf(up) || !valid_pmf(down)) { ++bad; continue; }
    if (m == 0) continue;  // prior point mass; nothing to compare against
    std::vector<double> freq(k);
    for (std::size_t j = 0; j < k; ++j)
      freq[j] = static_cast<double>(counts[j]) / static_cast<double>(m);
    DiscreteDist emp(sup, freq);
    double eps = confidence_width(delta, m);
    if (!stochastically_dominates(up, emp) ||
        tv_distance(up, emp) > eps + 1e-12)
      ++bad;
    if (!stochastically_dominates(emp, down) ||
        tv_distance(down, emp) > eps + 1e-12)
      ++bad;
  }
  return bad;
}

int fuzz_cts(Rng& rng, int iters) {
  int bad = 0;
  for (int it = 0; it < iters; ++it) {
    double lo = -1.0 + 2.0 * rng.uniform();
    double hi = lo + 0.5 + 2.0 * rng.uniform();
    std::size_t m = 1 + rng.below(300);
    std::vector<double> samples(m);
    for (double& s : samples) s = lo + (hi - lo) * rng.uniform();
    double delta = 0.01 + 1.99 * rng.uniform();
    StepCdf out = emp_stoc_dom_cts(samples, lo, hi, delta);
    StepCdf emp = empirical_cdf(samples, lo, hi);
    double eps = confidence_width(delta, m);
    if (!stochastically_dominates(out, emp) ||
        ks_distance(out, emp) > eps + 1e-12)
      ++bad;
  }
  return bad;
}

// Reference tails for the leveled constructions: running prefix minimum of
// the per-level optimistic bounds.  Passing zero widths gives the plain
// pooled empirical analogue.
std::vector<double> prefix_min_tails(const std::vector<double>& phat,
                                     const std::vector<double>& eps) {
  std::size_t k = phat.size();
  std::vector<double> tails(k, 1.0);
  for (std::size_t c = 1; c < k; ++c)
    tails[c] = std::min(tails[c - 1], std::min(1.0, phat[c] + eps[c]));
  return tails;
}

bool leveled_ok(const DiscreteDist& out, const std::vector<double>& phat,
                const std::vector<double>& eps,
                const std::vector<bool>& has_data) {
  if (!valid_pmf(out)) return false;
  std::size_t k = phat.size();
  std::vector<double> zero(k, 0.0);
  std::vector<double> eps0(k);
  for (std::size_t c = 0; c < k; ++c) eps0[c] = has_data[c] ? 0.0 : 1.0;
  std::vector<double> want = prefix_min_tails(phat, eps);
  std::vector<double> base = prefix_min_tails(phat, eps0);
  double worst_eps = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (has_data[c]) worst_eps = std::max(worst_eps, eps[c]);
    double got = out.tail_at(c);
    if (std::abs(got - want[c]) > 1e-9) return false;      // construction law
    if (got < base[c] - 1e-9) return false;                // dominates eps = 0
    if (got - base[c] > worst_eps + 1e-9) return false;    // per-level closeness
  }
  return true;
}

int fuzz_censored(Rng& rng, int iters) {
  int bad = 0;
  for (int it = 0; it < iters; ++it) {
    std::size_t k = 1 + rng.below(5);
    std::vector<double> sup = random_support(rng, k);
    std::vector<std::vector<std::int64_t>> counts(k);
    for (std::size_t c = 0; c < k; ++c) {
      counts[c].assign(c + 1, 0);
      std::size_t total = rng.below(30);
      for (std::size_t s = 0; s < total; ++s) ++counts[c][rng.below(c + 1)];
    }
    double delta = 0.01 + 1.99 * rng.uniform();
    DiscreteDist out = censored_dominating_counts(sup, counts, delta);
    // replicate the pooled estimates
    std::vector<double> phat(k, 0.0), eps(k, 1.0);
    std::vector<bool> has_data(k, false);
    for (std::size_t c = 0; c < k; ++c) {
      std::int64_t n_c = 0, top = 0;
      for (std::size_t b = c; b < k; ++b)
        for (std::size_t j = 0; j < counts[b].size(); ++j) {
          n_c += counts[b][j];
          if (j >= c) top += counts[b][j];
        }
      if (n_c > 0) {
        phat[c] = static_cast<double>(top) / static_cast<double>(n_c);
        eps[c] = confidence_width_leveled(delta, k,
                                          static_cast<std::size_t>(n_c));
        has_data[c] = true;
      }
    }
    if (!leveled_ok(out, phat, eps, has_data)) ++bad;
  }
  return bad;
}

int fuzz_binary(Rng& rng, int iters) {
  int bad = 0;
  for (int it = 0; it < iters; ++it) {
    std::size_t k = 1 + rng.below(5);
    std::vector<double> sup = random_support(rng, k);
    double delta = 0.01 + 1.99 * rng.uniform();
    std::vector<std::pair<std::int64_t, std::int64_t>> counts(k);
    std::vector<double> phat(k, 0.0), eps(k, 1.0);
    std::vector<bool> has_data(k, false);
    for (std::size_t c = 0; c < k; ++c) {
      std::int64_t trials = static_cast<std::int64_t>(rng.below(40));
      std::int64_t succ =
          trials == 0 ? 0
                      : static_cast<std::int64_t>(
                            rng.below(static_cast<std::uint64_t>(trials) + 1));
      counts[c] = {succ, trials};
      if (trials > 0) {
        phat[c] = static_cast<double>(succ) / static_cast<double>(trials);
        eps[c] = confidence_width_leveled(delta, k,
                                          static_cast<std::size_t>(trials));
        has_data[c] = true;
      }
    }
    DiscreteDist out = binary_dominating(sup, counts, delta);
    if (!leveled_ok(out, phat, eps, has_data)) ++bad;
  }
  return bad;
}

Line fuzz_criterion() {
  double t0 = now_s();
  Rng rng(20240817);
  const int iters = 10000;
  int bad_ud = fuzz_updown(rng, iters);
  int bad_cts = fuzz_cts(rng, iters);
  int bad_cen = fuzz_censored(rng, iters);
  int bad_bin = fuzz_binary(rng, iters);
  int bad = bad_ud + bad_cts + bad_cen + bad_bin;
  double secs = now_s() - t0;
  return {3, bad == 0,
          fmt("fuzz: %d calls per construction, %d invariant failures, %.1fs",
              iters, bad, secs)};
}

// ---- criteria 6 and 7: regret scaling benchmarks ---------------------------

struct BenchResult {
  bool ran = false;
  double slope_online = 0.0;
  double slope_etc = 0.0;
  double final_online = 0.0;
  double final_etc = 0.0;
  double secs = 0.0;
  std::size_t failures = 0;
  std::string cfg_rel;
  std::string out_dir;
  std::vector<std::string> clair_csvs;
  std::string error;
};

BenchResult run_bench(const std::string& cfg_rel, const std::string& leaf) {
  BenchResult r;
  r.cfg_rel = cfg_rel;
  double t0 = now_s();
  try {
    ExperimentConfig cfg = load_config(src(cfg_rel));
    cfg.out_dir = scratch(leaf).string();
    r.out_dir = cfg.out_dir;
    ExperimentOutput out = run_experiment(cfg, n_threads());
    r.failures = out.failures.size();
    auto csv_of = [&](const std::string& alg, int horizon) {
      return cfg.out_dir + "/" + cfg.name + "_" + alg + "_T" +
             std::to_string(horizon) + ".csv";
    };
    std::vector<std::pair<double, double>> pts_online, pts_etc;
    for (int horizon : cfg.horizons) {
      std::vector<RegretRow> on = read_regret_csv(csv_of("online", horizon));
      std::vector<RegretRow> et = read_regret_csv(csv_of("etc", horizon));
      pts_online.emplace_back(horizon,
                              mean_final_regret(on, "online", horizon));
      pts_etc.emplace_back(horizon, mean_final_regret(et, "etc", horizon));
      r.clair_csvs.push_back(csv_of("clairvoyant", horizon));
    }
    r.slope_online = fit_loglog_slope(pts_online).slope;
    r.slope_etc = fit_loglog_slope(pts_etc).slope;
    r.final_online = pts_online.back().second;
    r.final_etc = pts_etc.back().second;
    r.ran = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.secs = now_s() - t0;
  return r;
}

Line pandora_criterion(BenchResult& keep) {
  keep = run_bench("configs/pandora_bench.cfg", "pandora");
  if (!keep.ran)
    return {6, false, "pandora benchmark failed: " + keep.error};
  bool ok = keep.failures == 0 && keep.secs <= 600.0 &&
            keep.slope_online >= 0.40 && keep.slope_online <= 0.65 &&
            keep.slope_etc >= 0.62 && keep.final_online < keep.final_etc;
  return {6, ok,
          fmt("pandora: online slope %.3f in [0.40, 0.65], etc slope %.3f >= "
              "0.62, finals %.0f < %.0f at T=16384, %.0fs",
              keep.slope_online, keep.slope_etc, keep.final_online,
              keep.final_etc, keep.secs)};
}

Line censored_binary_criterion(BenchResult& srm, BenchResult& fspm) {
  srm = run_bench("configs/srm_bench.cfg", "srm");
  fspm = run_bench("configs/fspm_bench.cfg", "fspm");
  if (!srm.ran || !fspm.ran)
    return {7, false,
            "benchmark failed: " + (srm.ran ? fspm.error : srm.error)};
  auto in_band = [](const BenchResult& r) {
    return r.failures == 0 && r.secs <= 600.0 && r.slope_online >= 0.40 &&
           r.slope_online <= 0.68 && r.final_online < r.final_etc;
  };
  bool ok = in_band(srm) && in_band(fspm);
  return {7, ok,
          fmt("srm online slope %.3f (%.0f < %.0f, %.0fs); fspm online slope "
              "%.3f (%.0f < %.0f, %.0fs); band [0.40, 0.68]",
              srm.slope_online, srm.final_online, srm.final_etc, srm.secs,
              fspm.slope_online, fspm.final_online, fspm.final_etc,
              fspm.secs)};
}

// ---- criterion 8: clairvoyant floor ----------------------------------------

Line clairvoyant_criterion(const std::vector<std::string>& csvs) {
  double worst = 0.0;
  std::size_t rows = 0;
  bool ok = !csvs.empty();
  for (const std::string& path : csvs) {
    try {
      for (const RegretRow& r : read_regret_csv(path)) {
        worst = std::max(worst, std::abs(r.cum_expected_regret));
        ++rows;
      }
    } catch (const std::exception&) {
      ok = false;
    }
  }
  ok = ok && worst <= 1e-6;
  return {8, ok,
          fmt("clairvoyant floor: %zu rows over %zu benchmark files, max "
              "|cum regret| %.2e",
              rows, csvs.size(), worst)};
}

// ---- criterion 9: byte-identical reruns ------------------------------------

// Compares every CSV under two directories byte for byte.  Returns the
// number of files matched, or 0 with err set.
std::size_t compare_csv_dirs(const fs::path& a, const fs::path& b,
                             std::string& err) {
  auto list = [](const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".csv")
        names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
  };
  std::vector<std::string> names = list(a);
  if (names.empty()) {
    err = "no CSVs under " + a.string();
    return 0;
  }
  if (names != list(b)) {
    err = "reruns produced different file sets under " + b.string();
    return 0;
  }
  for (const std::string& name : names)
    if (read_text_file((a / name).string()) !=
        read_text_file((b / name).string())) {
      err = "file differs between reruns: " + name;
      return 0;
    }
  return names.size();
}

Line reproducibility_criterion(const std::vector<const BenchResult*>& benches,
                               std::vector<std::string>& clair_csvs) {
  try {
    ExperimentConfig cfg = load_config(src("configs/smoke.cfg"));
    cfg.out_dir = scratch("smoke_a").string();
    ExperimentOutput a = run_experiment(cfg, n_threads());
    cfg.out_dir = scratch("smoke_b").string();
    ExperimentOutput b = run_experiment(cfg, n_threads());
    if (!a.failures.empty() || !b.failures.empty())
      return {9, false, "smoke run reported cell failures"};
    std::string err;
    std::size_t files = compare_csv_dirs(fs::path(a.csv_paths[0]).parent_path(),
                                         fs::path(b.csv_paths[0]).parent_path(),
                                         err);
    if (files == 0) return {9, false, err};
    std::size_t configs = 1;
    // Re-run every benchmark config as well and demand the same bytes.
    for (const BenchResult* bench : benches) {
      if (!bench->ran) return {9, false, "benchmark run unavailable"};
      ExperimentConfig again = load_config(src(bench->cfg_rel));
      again.out_dir =
          scratch(fs::path(bench->out_dir).filename().string() + "_rerun")
              .string();
      run_experiment(again, n_threads());
      std::size_t n = compare_csv_dirs(bench->out_dir, again.out_dir, err);
      if (n == 0) return {9, false, err};
      files += n;
      ++configs;
    }
    for (const std::string& p : a.csv_paths)
      if (p.find("clairvoyant") != std::string::npos)
        clair_csvs.push_back(p);
    return {9, true,
            fmt("reproducibility: %zu configs re-run, %zu CSVs byte-identical",
                configs, files)};
  } catch (const std::exception& e) {
    return {9, false, std::string("rerun failed: ") + e.what()};
  }
}

}  // namespace

int main() {
  std::vector<Line> lines;
  auto push = [&](Line line) {
    std::fprintf(stderr, "criterion %d done: %s\n", line.id,
                 line.detail.c_str());
    lines.push_back(std::move(line));
  };

  VerifyOptions oracle_only;
  oracle_only.seed = 11;
  oracle_only.monotonicity_per_problem = 0;
  oracle_only.stability_total = 0;
  push(verify_suite(1, oracle_only, 60.0, "oracle agreement"));

  push(sampling_criterion());
  push(fuzz_criterion());

  VerifyOptions stability_only;
  stability_only.seed = 13;
  stability_only.oracle_per_problem = 0;
  stability_only.monotonicity_per_problem = 0;
  push(verify_suite(4, stability_only, 60.0, "stability bound"));

  VerifyOptions mono_only;
  mono_only.seed = 17;
  mono_only.oracle_per_problem = 0;
  mono_only.stability_total = 0;
  push(verify_suite(5, mono_only, 0.0, "monotonicity"));

  BenchResult pandora, srm, fspm;
  push(pandora_criterion(pandora));
  push(censored_binary_criterion(srm, fspm));

  std::vector<std::string> clair;
  Line repro = reproducibility_criterion({&pandora, &srm, &fspm}, clair);

  clair.insert(clair.end(), pandora.clair_csvs.begin(),
               pandora.clair_csvs.end());
  clair.insert(clair.end(), srm.clair_csvs.begin(), srm.clair_csvs.end());
  clair.insert(clair.end(), fspm.clair_csvs.begin(), fspm.clair_csvs.end());
  push(clairvoyant_criterion(clair));
  push(repro);

  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.id < b.id; });
  bool all_ok = true;
  for (const Line& line : lines) {
    std::printf("[%s] criterion %d: %s\n", line.ok ? "PASS" : "FAIL", line.id,
                line.detail.c_str());
    all_ok = all_ok && line.ok;
  }
  return all_ok ? 0 : 1;
}
