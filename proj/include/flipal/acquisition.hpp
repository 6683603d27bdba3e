#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flipal/class_dist.hpp"
#include "flipal/detection.hpp"
#include "flipal/matching.hpp"
#include "flipal/nms.hpp"

namespace flipal {

/// Floor applied to probabilities before taking logarithms.
inline constexpr double kLogEpsilon = 1e-12;

/// Symmetric Kullback-Leibler divergence, 0.5 * (KL(p||q) + KL(q||p)), natural log.
double sym_kl(const ClassDist& p, const ClassDist& q);

/// Shannon entropy in nats.
double entropy(const ClassDist& p);

struct AcquisitionOptions {
  NmsOptions nms;
  MatchOptions match;
  /// When false, entropy and divergence use the foreground classes only,
  /// renormalized.
  bool include_background = true;
  /// When set, every unmatched post-NMS detection counts as this much
  /// inconsistency. Disabled by default.
  std::optional<double> unmatched_penalty;
};

struct AcquisitionScore {
  ImageId image_id;
  double entropy = 0.0;
  double inconsistency = 0.0;
  double unified = 0.0;
};

/// Max over pairs of the symmetric KL between the two members; 0 when empty.
double image_inconsistency(std::span<const MatchedPair> pairs, bool include_background = true);

/// Max over detections of the class-distribution entropy; 0 when empty.
double image_entropy(std::span<const Detection> dets, bool include_background = true);

/// Full per-image pipeline: NMS on both orientations (the flipped one mapped
/// back to the original frame first), match, then aggregate by max. `flipped`
/// is the raw prediction on the mirrored image.
AcquisitionScore unified_score(const ImagePrediction& orig, const ImagePrediction& flipped,
                               const AcquisitionOptions& opts = {});

struct PredictionPair {
  ImagePrediction original;
  ImagePrediction flipped;
};

/// Scores every image. Parallel over images; output order follows input order.
std::vector<AcquisitionScore> score_images(std::span<const PredictionPair> images,
                                           const AcquisitionOptions& opts = {});

/// Single-threaded reference for score_images.
std::vector<AcquisitionScore> score_images_serial(std::span<const PredictionPair> images,
                                                  const AcquisitionOptions& opts = {});

enum class Strategy { kRandom, kEntropy, kInconsistency, kUnified };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Picks `budget` image ids: the highest by the strategy's score field
/// (ties by ascending id) or, for kRandom, a seeded draw without replacement.
/// The result does not depend on the order of `scores`.
std::vector<ImageId> select_for_labeling(std::span<const AcquisitionScore> scores,
                                         std::size_t budget, Strategy strategy,
                                         std::uint64_t seed = 0);

}  // namespace flipal
