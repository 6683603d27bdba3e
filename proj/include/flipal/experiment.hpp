#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flipal/config.hpp"
#include "flipal/cycles.hpp"
#include "flipal/dataset.hpp"

namespace flipal {

struct ExperimentData {
  Dataset train;
  Dataset test;
};

/// Loads the configured datasets or generates the synthetic ones.
ExperimentData load_experiment_data(const ExperimentConfig& cfg);

struct NamedRun {
  std::string name;
  CycleConfig cycles;
  CycleRun run;
};

/// One run for the configured strategy, or the five-way strategy sweep.
std::vector<NamedRun> run_experiment(const ExperimentConfig& cfg, const ExperimentData& data);

/// Writes reports, selections, scores, pseudo-labels, evals and the final pool
/// for one run into `dir`.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& cfg,
               const ExperimentData& data, const NamedRun& run);

/// Runs the experiment and writes everything under cfg.output_dir.
/// `resolved` is the effective key-value configuration, stored alongside.
void simulate_to_directory(const ExperimentConfig& cfg, const KeyValues& resolved);

}  // namespace flipal
