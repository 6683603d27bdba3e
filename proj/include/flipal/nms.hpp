#pragma once

#include <vector>

#include "flipal/detection.hpp"

namespace flipal {

struct NmsOptions {
  double iou_threshold = 0.45;
  double score_floor = 0.01;
};

/// Class-wise greedy non-maximum suppression on the (label, score) view of
/// each detection. Detections scoring below the floor are dropped; a kept box
/// suppresses same-label boxes overlapping it by more than the threshold.
/// Output is sorted by descending score, ties by input position.
std::vector<Detection> nms(const std::vector<Detection>& dets, const NmsOptions& opts = {});

ImagePrediction nms(const ImagePrediction& pred, const NmsOptions& opts = {});

}  // namespace flipal
