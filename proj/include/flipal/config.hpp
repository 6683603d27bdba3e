#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flipal/cycles.hpp"
#include "flipal/dataset.hpp"
#include "flipal/pool.hpp"
#include "flipal/synthetic_detector.hpp"

namespace flipal {

using KeyValues = std::map<std::string, std::string>;

/// Every problem found in a configuration, reported together.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// `key = value` lines; `#` starts a comment. Later keys win.
KeyValues parse_key_values(std::string_view text, const std::string& source = "config");

struct ExperimentConfig {
  /// Dataset JSON with the training pool; when empty a synthetic one is made.
  std::filesystem::path dataset;
  /// Held-out evaluation images; synthetic when empty.
  std::filesystem::path test_dataset;
  SyntheticDatasetConfig synth_train;
  SyntheticDatasetConfig synth_test;

  std::size_t initial_budget = 2000;
  CycleConfig cycles;
  BatchMode batch_mode = BatchMode::kBalancedHalf;
  std::size_t batch_size = 32;
  std::size_t batches_per_cycle = 100;
  std::uint64_t pool_seed = 0;
  SyntheticDetectorConfig detector;
  std::filesystem::path output_dir = "flipal_out";
  /// Run random, entropy, inconsistency, unified and unified+PL side by side.
  bool sweep = false;

  /// Keys understood by from_key_values, with their defaults.
  static std::vector<std::pair<std::string, std::string>> defaults();
  static ExperimentConfig from_key_values(const KeyValues& kv);
};

/// Reads `path` (if given), then applies `overrides` on top.
KeyValues merge_config(const std::optional<std::filesystem::path>& path, const KeyValues& overrides);

/// Effective configuration as sorted `key=value` lines.
std::string render_key_values(const KeyValues& kv);

}  // namespace flipal
