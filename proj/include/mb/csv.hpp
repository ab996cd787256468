#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mb {

inline constexpr const char* kRegretHeader =
    "algorithm,seed,t,cum_expected_regret,cum_realized_regret,wall_time_ms";

struct RegretRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  int t = 0;
  double cum_expected_regret = 0.0;
  double cum_realized_regret = 0.0;
  double wall_time_ms = 0.0;

  bool operator==(const RegretRow&) const = default;
};

// 12 significant digits, shortest form ("%.12g").
std::string format_g12(double v);

// Serializes rows sorted by (algorithm, seed, t); trailing newline.
std::string serialize_regret_csv(std::vector<RegretRow> rows);
void write_regret_csv(const std::string& path, std::vector<RegretRow> rows);

// Parses and validates the exact header; throws ConfigError on mismatch.
std::vector<RegretRow> parse_regret_csv(const std::string& text,
                                        const std::string& origin = "<string>");
std::vector<RegretRow> read_regret_csv(const std::string& path);

inline constexpr const char* kSummaryHeader =
    "algorithm,horizon,t,mean_cum_expected_regret,stderr_cum_expected_regret,"
    "seeds";

struct SummaryRow {
  std::string algorithm;
  int horizon = 0;
  int t = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t seeds = 0;
};

std::string serialize_summary_csv(std::vector<SummaryRow> rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mb
