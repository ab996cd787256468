#include "mb/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace mb {

namespace {

struct Cell {
  std::string algorithm;
  int horizon = 0;
  std::uint64_t seed = 0;
};

struct CellOutcome {
  bool failed = false;
  std::string error;
  std::vector<RegretRow> rows;
};

CellOutcome execute_cell(const ExperimentConfig& cfg, const Cell& cell) {
  CellOutcome out;
  try {
    RunResult res = run_cell(cfg, cell.algorithm, cell.horizon, cell.seed);
    double cum_exp = 0.0, cum_real = 0.0;
    out.rows.reserve(res.rounds.size());
    for (const RoundRecord& r : res.rounds) {
      cum_exp += r.regret_increment;
      cum_real += r.realized_regret_increment;
      out.rows.push_back({cell.algorithm, cell.seed, r.t, cum_exp, cum_real,
                          r.wall_ms});
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
    out.rows.clear();
  }
  return out;
}

}  // namespace

RunResult run_cell(const ExperimentConfig& cfg, const std::string& algorithm,
                   int horizon, std::uint64_t seed) {
  RunConfig rc;
  rc.delta = cfg.delta;
  rc.state_budget = cfg.state_budget;
  rc.mc_samples = cfg.mc_samples;
  rc.alpha = cfg.alpha;
  rc.timing = cfg.timing;
  if (algorithm == "online") return run_online(cfg.instance, horizon, seed, rc);
  if (algorithm == "etc")
    return run_etc(cfg.instance, horizon, cfg.etc_explore, seed, rc);
  if (algorithm == "clairvoyant")
    return run_clairvoyant(cfg.instance, horizon, seed, rc);
  throw ConfigError("unknown algorithm '" + algorithm + "'");
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, int threads,
                                bool log_progress) {
  if (cfg.instance.n() == 0)
    throw ConfigError("config has no instance to run");
  if (cfg.horizons.empty()) throw ConfigError("config lists no horizons");

  std::vector<Cell> cells;
  for (const std::string& alg : cfg.algorithms)
    for (int horizon : cfg.horizons)
      for (std::uint64_t seed : cfg.seeds) cells.push_back({alg, horizon, seed});

  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      outcomes[idx] = execute_cell(cfg, cells[idx]);
      std::size_t d = done.fetch_add(1) + 1;
      if (log_progress) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::fprintf(stderr, "[%zu/%zu] %s seed=%llu T=%d%s\n", d, cells.size(),
                     cells[idx].algorithm.c_str(),
                     static_cast<unsigned long long>(cells[idx].seed),
                     cells[idx].horizon,
                     outcomes[idx].failed ? " FAILED" : "");
      }
    }
  };
  int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::filesystem::create_directories(cfg.out_dir);
  ExperimentOutput out;
  std::map<std::pair<std::string, int>, std::vector<RegretRow>> grouped;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (outcomes[i].failed) {
      out.failures.push_back(
          {cells[i].algorithm, cells[i].seed, cells[i].horizon, outcomes[i].error});
      continue;
    }
    auto& rows = grouped[{cells[i].algorithm, cells[i].horizon}];
    rows.insert(rows.end(), outcomes[i].rows.begin(), outcomes[i].rows.end());
  }

  std::vector<SummaryRow> summary;
  for (const std::string& alg : cfg.algorithms) {
    for (int horizon : cfg.horizons) {
      auto it = grouped.find({alg, horizon});
      if (it == grouped.end()) continue;
      std::string path = cfg.out_dir + "/" + cfg.name + "_" + alg + "_T" +
                         std::to_string(horizon) + ".csv";
      write_regret_csv(path, it->second);
      out.csv_paths.push_back(path);
      for (SummaryRow& row : summarize(it->second)) summary.push_back(row);
    }
  }
  out.summary_path = cfg.out_dir + "/" + cfg.name + "_summary.csv";
  write_text_file(out.summary_path, serialize_summary_csv(std::move(summary)));

  if (!out.failures.empty()) {
    std::string text = "algorithm,seed,horizon,error\n";
    for (const CellFailure& f : out.failures) {
      std::string msg = f.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      text += f.algorithm + "," + std::to_string(f.seed) + "," +
              std::to_string(f.horizon) + "," + msg + "\n";
    }
    write_text_file(cfg.out_dir + "/" + cfg.name + "_failures.csv", text);
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RegretRow>& rows) {
  // horizon of a run = its final t
  std::map<std::pair<std::string, std::uint64_t>, int> run_horizon;
  for (const RegretRow& r : rows) {
    auto key = std::make_pair(r.algorithm, r.seed);
    auto it = run_horizon.find(key);
    if (it == run_horizon.end())
      run_horizon[key] = r.t;
    else
      it->second = std::max(it->second, r.t);
  }
  std::map<std::tuple<std::string, int, int>, std::vector<double>> buckets;
  for (const RegretRow& r : rows)
    buckets[{r.algorithm, run_horizon[{r.algorithm, r.seed}], r.t}].push_back(
        r.cum_expected_regret);
  std::vector<SummaryRow> out;
  for (const auto& [key, vals] : buckets) {
    SummaryRow s;
    s.algorithm = std::get<0>(key);
    s.horizon = std::get<1>(key);
    s.t = std::get<2>(key);
    s.seeds = vals.size();
    double sum = 0.0;
    for (double v : vals) sum += v;
    s.mean = sum / static_cast<double>(vals.size());
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - s.mean) * (v - s.mean);
      s.stderr_ = std::sqrt(ss / static_cast<double>(vals.size() - 1) /
                            static_cast<double>(vals.size()));
    }
    out.push_back(std::move(s));
  }
  return out;
}

double mean_final_regret(const std::vector<RegretRow>& rows,
                         const std::string& algorithm, int horizon) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const RegretRow& r : rows) {
    if (r.algorithm == algorithm && r.t == horizon) {
      sum += r.cum_expected_regret;
      ++count;
    }
  }
  if (count == 0)
    throw ConfigError("no rows for algorithm '" + algorithm + "' at t = " +
                      std::to_string(horizon));
  return sum / static_cast<double>(count);
}

}  // namespace mb
