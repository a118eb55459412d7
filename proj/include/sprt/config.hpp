#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sprt/ensemble.hpp"
#include "sprt/model.hpp"

namespace sprt {

// One experiment: test parameters, ensemble size, oracle settings, output
// destination. Round-trips losslessly through the key=value config format;
// command-line flags override file values.
struct ExperimentConfig {
  double rho = 0.04;
  double alpha = 0.1;
  std::string noise = "gaussian";  // gaussian | zero
  int max_steps = 0;               // 0: default horizon
  std::int64_t trials = 100000;    // per hypothesis
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0: hardware concurrency
  bool antithetic = false;
  bool oracle_enabled = true;
  int grid_points = 4096;
  std::vector<std::pair<double, double>> sweep;  // (rho, alpha) pairs
  std::string out;  // output path stem; empty keeps results in memory
  std::string format = "csv";
  int precision = 17;

  TestConfig test_config() const;
  EnsembleOptions ensemble_options() const;
};

ExperimentConfig read_config_file(const std::string& path);
void write_config_file(const ExperimentConfig& c, const std::string& path);

// Applies one "key = value" assignment; shared by the file reader and
// tests. Throws std::invalid_argument on unknown keys or bad values.
void apply_config_entry(ExperimentConfig& c, const std::string& key,
                        const std::string& value);

}  // namespace sprt
