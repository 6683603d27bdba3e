#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flipal/acquisition.hpp"
#include "flipal/dataset.hpp"
#include "flipal/detector.hpp"
#include "flipal/eval.hpp"
#include "flipal/pool.hpp"

namespace flipal {

struct CycleConfig {
  std::size_t cycles = 5;
  std::size_t total_budget = 5000;
  /// Overrides total_budget / cycles when set.
  std::optional<std::size_t> per_cycle_budget;
  Strategy strategy = Strategy::kUnified;
  bool pl_enabled = false;
  double tau = 0.99;
  /// Per-class top-k pseudo-labeling instead of the confidence threshold.
  std::optional<double> topk_fraction;
  AcquisitionOptions acquisition;
  Interpolation interpolation = Interpolation::kElevenPoint;
  std::uint64_t selection_seed = 0;

  /// Throws when the total budget does not split evenly over the cycles.
  std::size_t budget_per_cycle() const;
};

struct CycleReport {
  int cycle = 0;
  /// Ids moved to L in this cycle (for cycle 0, the initial random draw).
  std::vector<ImageId> selected;
  /// Scores of every image that was unlabeled when the cycle started.
  std::vector<AcquisitionScore> scores;
  std::size_t n_labeled = 0;
  std::size_t n_labeled_objects = 0;
  std::size_t n_pl = 0;
  /// Pseudo-labels over all labels (pseudo + human-annotated objects).
  double pl_ratio = 0.0;
  PlAudit pl_audit;
  EvalResult eval;
  /// mAP of the detector trained on L alone, before this cycle's
  /// pseudo-labels are added. Equals eval.map50 without pseudo-labeling.
  double map50_before_pl = 0.0;
  /// Unlabeled images with no detection after NMS (they score 0).
  std::size_t n_zero_score = 0;
};

struct CycleRun {
  std::vector<CycleReport> reports;
  Pool final_pool;
};

/// Original and flipped predictions for each id, computed in parallel.
std::vector<PredictionPair> predict_pairs(const Detector& detector, std::span<const ImageId> ids);

/// mAP@0.5 of `detector` on the unflipped test images after NMS.
EvalResult evaluate_detector(const Detector& detector, const Dataset& test,
                             const NmsOptions& nms_opts, Interpolation interpolation);

/// Cycle 0 trains `detector` on the initial labeled set and evaluates it.
/// Each later cycle scores U with the previous cycle's detector, labels the
/// top images, regenerates pseudo-labels over the rest of U (when enabled),
/// retrains and evaluates. Deterministic in its inputs.
CycleRun run_cycles(const Dataset& train, const Dataset& test, const Pool& initial,
                    const Detector& detector, const CycleConfig& cfg);

}  // namespace flipal
