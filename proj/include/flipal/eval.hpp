#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "flipal/detection.hpp"
#include "flipal/pseudo_label.hpp"

namespace flipal {

enum class Interpolation { kElevenPoint, kAllPoint };

std::string_view to_string(Interpolation i);
Interpolation parse_interpolation(std::string_view name);

/// A detection tagged with the image it was made on. Evaluation uses the
/// detection's (label, score) view.
struct ImageDetection {
  ImageId image_id;
  Detection det;
};

struct ApOptions {
  double iou_threshold = 0.5;
  Interpolation interpolation = Interpolation::kElevenPoint;
};

/// VOC-style AP for one class. Detections are ranked by score (stable for
/// ties); each one is a true positive when its best-overlapping ground truth
/// of the same image and class has IoU above the threshold and has not been
/// claimed by a higher-ranked detection. Returns 0 when the class has no
/// ground truth.
double average_precision(std::span<const ImageDetection> dets,
                         std::span<const GroundTruthObject> gt, std::size_t class_id,
                         std::size_t num_classes, const ApOptions& opts = {});

struct EvalResult {
  std::map<std::size_t, double> per_class_ap;  // classes with ground truth only
  std::map<std::size_t, std::size_t> n_gt;     // every class 1..K
  std::vector<std::size_t> excluded_classes;   // classes without ground truth
  double map50 = 0.0;
  Interpolation interpolation = Interpolation::kElevenPoint;
};

/// Per-class AP at IoU 0.5 and their mean over classes that have ground truth.
EvalResult map50(std::span<const ImageDetection> dets, std::span<const GroundTruthObject> gt,
                 std::size_t num_classes, Interpolation interpolation = Interpolation::kElevenPoint);

/// Fraction of classes where the run-averaged AP of A is strictly greater
/// than that of B. All results must cover the same classes.
double winrate_table(std::span<const EvalResult> results_a, std::span<const EvalResult> results_b);

}  // namespace flipal
