#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flipal/box.hpp"
#include "flipal/class_dist.hpp"

namespace flipal {

using ImageId = std::string;

/// One predicted object: box in both forms plus the full class distribution.
/// The encoded form is relative to the image anchor (see image_anchor()).
struct Detection {
  BoxCorner box_corner;
  BoxEncoded box_encoded;
  ClassDist dist;

  /// Foreground class the detection votes for, and its probability. NMS,
  /// evaluation and ranking all use this (label, score) view.
  std::size_t label() const { return dist.foreground_argmax(); }
  double score() const { return dist.foreground_max(); }

  /// Builds a detection whose encoded form is derived from the corner box.
  static Detection from_corner(const BoxCorner& box, ClassDist dist, double image_width,
                               double image_height);
};

/// Detector output for one image in one orientation.
struct ImagePrediction {
  ImageId image_id;
  int width = 0;
  int height = 0;
  std::vector<Detection> detections;
};

/// Horizontal flip: corner boxes mirrored, encoded dx negated, dists untouched.
/// Applying it twice restores the input.
ImagePrediction hflip(const ImagePrediction& pred);
Detection hflip(const Detection& det, double image_width);

/// Largest corner/encoded disagreement over all detections, measured in
/// pixels after decoding against the image anchor.
double box_form_discrepancy(const ImagePrediction& pred);

}  // namespace flipal
