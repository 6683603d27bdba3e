#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "flipal/detection.hpp"

namespace flipal {

/// A detection from the original image paired with its counterpart from the
/// flipped image. `flipped` is expressed in the original frame (un-flipped).
struct MatchedPair {
  std::size_t orig_index = 0;
  std::size_t flipped_index = 0;
  Detection original;
  Detection flipped;
  double iou = 0.0;

  /// Encoded box of the flipped member in the frame it was predicted in.
  BoxEncoded flipped_frame_encoded() const {
    auto e = flipped.box_encoded;
    e.dx = -e.dx;
    return e;
  }
};

enum class MatchMode {
  /// One-to-one: accept cross pairs in order of descending IoU.
  kGreedy,
  /// Per flipped detection, take the best-overlapping original detection.
  /// An original detection may be used more than once.
  kLiteralArgmax,
};

struct MatchOptions {
  double min_iou = 0.5;
  MatchMode mode = MatchMode::kGreedy;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_original;
  std::vector<std::size_t> unmatched_flipped;
};

class FrameMismatch : public std::invalid_argument {
 public:
  FrameMismatch() : std::invalid_argument("frame mismatch") {}
};

/// `flipped` must already be mapped back to the original frame (hflip).
/// Greedy ties are broken by (orig index, flipped index).
MatchResult match_predictions(const ImagePrediction& orig, const ImagePrediction& flipped,
                              const MatchOptions& opts = {});

}  // namespace flipal
