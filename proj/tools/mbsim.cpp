// mbsim: run experiments, verify invariants, test sampler guarantees, plot.
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "mb/config.hpp"
#include "mb/experiment.hpp"
#include "mb/sampletest.hpp"
#include "mb/svg.hpp"
#include "mb/verify.hpp"

namespace {

struct Overrides {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  double delta = -1.0;
};

void apply(mb::ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.seed_set) cfg.seeds = {ov.seed};
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.delta >= 0.0) cfg.delta = ov.delta;
}

int cmd_run(const std::string& path, const Overrides& ov, int threads) {
  mb::ExperimentConfig cfg = mb::load_config(path);
  apply(cfg, ov);
  mb::ExperimentOutput out = mb::run_experiment(cfg, threads, true);
  for (const std::string& p : out.csv_paths) std::cout << p << "\n";
  std::cout << out.summary_path << "\n";
  if (!out.failures.empty())
    std::cerr << out.failures.size() << " cell(s) failed; see " << cfg.out_dir
              << "/" << cfg.name << "_failures.csv\n";
  return 0;
}

int cmd_plot(const std::vector<std::string>& paths, const std::string& out,
             bool loglog) {
  std::vector<mb::RegretRow> rows;
  for (const std::string& p : paths) {
    std::vector<mb::RegretRow> r = mb::read_regret_csv(p);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (rows.empty())
    std::cerr << "warning: no data rows; emitting empty axes\n";
  std::vector<mb::SummaryRow> summary = mb::summarize(rows);

  std::map<std::string, int> horizons_per_alg;
  for (const auto& s : summary) {
    auto it = horizons_per_alg.find(s.algorithm);
    if (it == horizons_per_alg.end())
      horizons_per_alg[s.algorithm] = s.horizon;
    else if (it->second != s.horizon)
      it->second = -1;  // several horizons: labels need the T
  }
  std::map<std::pair<std::string, int>, mb::PlotSeries> series;
  for (const auto& s : summary) {
    auto key = std::make_pair(s.algorithm, s.horizon);
    mb::PlotSeries& ps = series[key];
    if (ps.label.empty())
      ps.label = horizons_per_alg[s.algorithm] == -1
                     ? s.algorithm + " T=" + std::to_string(s.horizon)
                     : s.algorithm;
    ps.xs.push_back(s.t);
    ps.ys.push_back(s.mean);
    ps.yerr.push_back(s.stderr_);
  }
  std::vector<mb::PlotSeries> list;
  for (auto& [key, ps] : series) list.push_back(std::move(ps));
  mb::PlotOptions opt;
  opt.loglog = loglog;
  opt.title = "cumulative expected regret";
  mb::write_svg_plot(out, list, opt);
  std::cout << out << "\n";
  return 0;
}

int cmd_sampletest(const std::string& path, const Overrides& ov) {
  mb::ExperimentConfig cfg = mb::load_config(path);
  if (!cfg.sampletest)
    throw mb::ConfigError(path + ": config has no [sampletest] block");
  mb::SampleTestConfig st = *cfg.sampletest;
  if (ov.seed_set) st.seed = ov.seed;
  if (ov.delta >= 0.0) st.delta = ov.delta;
  std::vector<mb::VariantReport> reports = mb::sampling_guarantee_test(st);
  bool all_pass = true;
  for (const mb::VariantReport& rep : reports) {
    for (const auto& [m, rate] : rep.rates)
      std::cout << rep.variant << " m=" << m << " failure_rate=" << rate
                << " threshold=" << st.delta * 1.2 << "\n";
    std::cout << rep.variant << ": " << (rep.pass ? "PASS" : "FAIL") << "\n";
    all_pass = all_pass && rep.pass;
  }
  std::cout << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? 0 : 2;
}

int cmd_verify(std::uint64_t seed) {
  mb::VerifyOptions opt;
  opt.seed = seed;
  mb::VerifyReport rep = mb::run_verify(opt, &std::cout);
  std::cout << (rep.ok() ? "PASS" : "FAIL") << "\n";
  return rep.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator for online monotone stochastic optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_svg = "plot.svg";
  std::vector<std::string> csv_paths;
  Overrides ov;
  int threads = 1;
  bool loglog = false;
  std::uint64_t verify_seed = 1;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config file")->required();
  CLI::Option* run_seed = run->add_option("--seed", ov.seed, "single seed");
  run->add_option("--out-dir", ov.out_dir, "output directory");
  run->add_option("--delta", ov.delta, "confidence parameter override");
  run->add_option("--threads", threads, "worker threads");

  CLI::App* sweep = app.add_subcommand("sweep", "run a config, cells in parallel");
  sweep->add_option("config", config_path, "config file")->required();
  CLI::Option* sweep_seed = sweep->add_option("--seed", ov.seed, "single seed");
  sweep->add_option("--out-dir", ov.out_dir, "output directory");
  sweep->add_option("--delta", ov.delta, "confidence parameter override");
  int sweep_threads = 0;
  sweep->add_option("--threads", sweep_threads, "worker threads (0 = all cores)");

  CLI::App* verify = app.add_subcommand(
      "verify", "oracle equivalence + monotonicity + stability suites");
  verify->add_option("--seed", verify_seed, "suite seed");

  CLI::App* plot = app.add_subcommand("plot", "render regret CSVs to SVG");
  plot->add_option("csv", csv_paths, "regret CSV files")->required();
  plot->add_option("-o,--out", out_svg, "output SVG path");
  plot->add_flag("--loglog", loglog, "log-log axes");

  CLI::App* sampletest =
      app.add_subcommand("sampletest", "statistical sampler guarantee test");
  sampletest->add_option("config", config_path, "config file")->required();
  CLI::Option* st_seed = sampletest->add_option("--seed", ov.seed, "test seed");
  sampletest->add_option("--delta", ov.delta, "confidence parameter override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      ov.seed_set = run_seed->count() > 0;
      return cmd_run(config_path, ov, threads);
    }
    if (sweep->parsed()) {
      ov.seed_set = sweep_seed->count() > 0;
      int n = sweep_threads > 0
                  ? sweep_threads
                  : static_cast<int>(std::thread::hardware_concurrency());
      return cmd_run(config_path, ov, std::max(1, n));
    }
    if (verify->parsed()) return cmd_verify(verify_seed);
    if (plot->parsed()) return cmd_plot(csv_paths, out_svg, loglog);
    if (sampletest->parsed()) {
      ov.seed_set = st_seed->count() > 0;
      return cmd_sampletest(config_path, ov);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
