#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flipal/box.hpp"
#include "flipal/detection.hpp"

namespace flipal {

struct PseudoLabel {
  ImageId image_id;
  BoxCorner box_corner;
  std::size_t class_id = 0;  // 1..K
  double confidence = 0.0;
};

struct GroundTruthObject {
  ImageId image_id;
  BoxCorner box_corner;
  std::size_t class_id = 0;  // 1..K
};

/// One pseudo-label per detection whose overall argmax is a foreground class
/// with probability >= tau. Expects post-NMS detections.
std::vector<PseudoLabel> extract_pseudo_labels(const ImagePrediction& pred, double tau);

/// Per foreground class c, the ceil(k_fraction * n_c) most confident
/// detections whose argmax is c. Ties keep input order.
std::vector<PseudoLabel> extract_topk_per_class(std::span<const ImagePrediction> preds,
                                                double k_fraction);

struct PlAudit {
  double correctness = 1.0;
  std::size_t n_pseudo = 0;
  std::size_t n_correct = 0;
  /// Set when there were no pseudo-labels; correctness is then 1 by convention.
  bool empty = true;
};

/// A pseudo-label is correct when an unconsumed ground-truth object of the
/// same image and class overlaps it with IoU > 0.5. Ground-truth objects are
/// consumed once, assigned greedily by descending IoU.
PlAudit audit_pl_correctness(std::span<const PseudoLabel> pls,
                             std::span<const GroundTruthObject> gt);

}  // namespace flipal
