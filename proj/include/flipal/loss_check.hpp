#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flipal/losses.hpp"

namespace flipal {

/// Inputs for recomputing every loss term from plain arrays. Pair members
/// carry encoded boxes in their own frame (the flipped one un-negated).
struct LossFixture {
  std::vector<ClassDist> dists;
  std::vector<BoxEncoded> pred_encoded;
  std::vector<BoxEncoded> target_encoded;
  GroundTruthAssignment assignment;
  /// Smooth-L1 indices; defaults to positives and pseudo-positives.
  std::vector<std::size_t> loc_positives;
  std::vector<MatchedPair> pairs;
};

struct LossBreakdown {
  double conf = 0.0;
  double consistency_class = 0.0;
  double consistency_loc = 0.0;
  double consistency = 0.0;
  double loc_l1 = 0.0;
  double total = 0.0;
};

/// JSON fixture:
///   {probs:[[...]], pred_encoded:[[dx,dy,w,h]], target_encoded:[[...]],
///    positives:[[pred,gt,class]], negatives:[pred], pl_positives:[[pred,class]],
///    loc_positives:[pred]?,
///    pairs:[{original_probs, flipped_probs, original_encoded, flipped_encoded}]}
LossFixture parse_loss_fixture(std::string_view json_text);

/// Builds a pair from per-frame encodings; the flipped member is mapped to
/// the original frame by negating its displacement.
MatchedPair make_pair_from_frames(ClassDist original_dist, const BoxEncoded& original_encoded,
                                  ClassDist flipped_dist, const BoxEncoded& flipped_encoded);

LossBreakdown compute_losses(const LossFixture& fx);

/// `term,value` lines with six decimals.
std::string format_losses(const LossBreakdown& b);

}  // namespace flipal
