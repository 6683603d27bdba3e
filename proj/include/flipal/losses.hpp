#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flipal/box.hpp"
#include "flipal/class_dist.hpp"
#include "flipal/matching.hpp"

namespace flipal {

/// Assignment of predictions to training targets. Index sets must be
/// pairwise disjoint; every class is a foreground class (>= 1).
struct GroundTruthAssignment {
  struct Positive {
    std::size_t pred = 0;
    std::size_t gt = 0;
    std::size_t cls = 0;
  };
  struct PseudoPositive {
    std::size_t pred = 0;
    std::size_t cls = 0;
  };

  std::vector<Positive> positives;
  std::vector<std::size_t> negatives;
  std::vector<PseudoPositive> pl_positives;
};

/// MultiBox confidence loss on labeled data:
///   -sum_{Pos} log c_i^{p(i)} - sum_{Neg} log c_i^0
/// Requires an assignment without pseudo-positives.
double multibox_conf_loss(std::span<const ClassDist> dists, const GroundTruthAssignment& asg);

/// MultiBox loss with an extra -log c_i^p term for each pseudo-labeled
/// prediction. Predictions in none of the three sets contribute nothing.
double pl_multibox_conf_loss(std::span<const ClassDist> dists,
                             const GroundTruthAssignment& asg);

/// Smooth-L1 summed over the listed indices and the four encoded coordinates.
double smooth_l1_loc_loss(std::span<const BoxEncoded> pred, std::span<const BoxEncoded> target,
                          std::span<const std::size_t> positives);

/// Mean symmetric KL over matched pairs; 0 when empty.
double consistency_class_loss(std::span<const MatchedPair> pairs,
                              bool include_background = true);

/// Mean over matched pairs of
///   1/4 [(dx' + dx^)^2 + (dy' - dy^)^2 + (w' - w^)^2 + (h' - h^)^2]
/// where ^ is the flipped member in its own (flipped) frame, so its center
/// displacement is negated before comparison. 0 when empty.
double consistency_loc_loss(std::span<const MatchedPair> pairs);

/// conf + (class consistency + localization consistency) + smooth-L1.
inline double total_loss(double conf, double cons_class, double cons_loc, double loc_l1) {
  return conf + (cons_class + cons_loc) + loc_l1;
}

}  // namespace flipal
