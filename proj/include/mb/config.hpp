#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mb/problems.hpp"
#include "mb/sampletest.hpp"

namespace mb {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// One experiment: a problem instance with ground truth, run by each listed
// algorithm for each horizon and seed.
struct ExperimentConfig {
  std::string name;
  InstanceSpec instance;
  std::vector<int> horizons;           // ascending
  std::vector<std::uint64_t> seeds;    // at least one
  std::vector<std::string> algorithms; // online | etc | clairvoyant
  double delta = 0.0;   // 0: per-horizon default schedule
  double alpha = 1.0;
  std::size_t state_budget = 0;  // 0: env / built-in default
  std::size_t mc_samples = 20000;
  int etc_explore = 0;  // per-item exploration rounds; 0: ceil(T^(2/3))
  bool timing = false;  // off by default so repeated runs are byte-identical
  std::string out_dir = "out";
  std::optional<SampleTestConfig> sampletest;
};

const std::vector<std::string>& problem_kinds();

// Flat structured text: [section] headers, key = value lines, values are
// numbers, booleans, "strings", or [comma, lists]; # starts a comment.
// Item sections [item1] .. [itemN] declare supports and truths.  Errors
// name the offending section/key.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

}  // namespace mb
