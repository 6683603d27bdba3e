#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "flipal/dataset.hpp"
#include "flipal/detector.hpp"

namespace flipal {

struct SyntheticClassParams {
  /// Probability that an object of this class is predicted as its own class.
  double accuracy = 0.8;
  /// Probability that the prediction on the mirrored image reuses the
  /// original class distribution instead of drawing a fresh one.
  double flip_robustness = 0.9;
  /// Softmax temperature; small values give peaked (confident) outputs.
  double temperature = 0.5;
  /// Wrong predictions keep full confidence instead of being softened.
  /// Unset means: on when accuracy < 0.5.
  std::optional<bool> confidently_wrong;
};

struct SyntheticDetectorConfig {
  /// One entry per foreground class, in class-id order.
  std::vector<SyntheticClassParams> classes;
  /// Accuracy gained per labeled image containing the class.
  double skill_gain_per_labeled = 0.0;
  /// Accuracy gained per correct pseudo-label of the class.
  double pl_gain = 0.0;
  /// Accuracy lost per incorrect pseudo-label claiming the class.
  double pl_noise_penalty = 0.0;
  double accuracy_ceiling = 0.95;
  /// Robustness gained per unit of accuracy gained.
  double robustness_coupling = 1.0;
  /// Box corner jitter, as a fraction of the box side (Gaussian sigma).
  double box_noise = 0.03;
  /// Mean number of false positives per image (Poisson).
  double fp_rate = 0.2;
  double fp_temperature = 1.0;
  double fp_robustness = 0.5;
  /// Logit margin of the peaked class is drawn from [margin_min, margin_max].
  double margin_min = 0.5;
  double margin_max = 4.0;
  /// Other logits are drawn from [0, logit_spread * margin].
  double logit_spread = 0.5;
  /// Margin multiplier for wrong predictions of classes that are not
  /// confidently wrong.
  double wrong_margin_scale = 0.4;
  std::uint64_t seed = 0;

  /// Every violation, one message each; empty when valid.
  std::vector<std::string> violations() const;
};

/// Generative stand-in for a trained detector. It sees ground truth for the
/// images it was built with; nothing else in the library does.
class SyntheticDetector final : public Detector {
 public:
  SyntheticDetector(SyntheticDetectorConfig cfg, std::span<const ImageRecord> images,
                    std::size_t num_classes);

  ImagePrediction predict(const ImageId& id, bool flipped) const override;
  std::unique_ptr<Detector> update(const Pool& pool) const override;

  /// Recomputes per-class accuracy and robustness from the base parameters
  /// and what `pool` provides: labeled images and current pseudo-labels.
  SyntheticDetector updated(const Pool& pool) const;

  const std::vector<double>& accuracy() const { return accuracy_; }
  const std::vector<double>& robustness() const { return robustness_; }
  const SyntheticDetectorConfig& config() const { return cfg_; }
  std::size_t num_classes() const { return num_classes_; }

 private:
  using Index = std::unordered_map<ImageId, ImageRecord>;

  ClassDist draw_dist(std::uint64_t key, std::size_t true_class, double accuracy,
                      double temperature, bool confident_wrong) const;
  BoxCorner jitter(const BoxCorner& box, std::uint64_t key, int width, int height) const;

  SyntheticDetectorConfig cfg_;
  std::shared_ptr<const Index> gt_;
  std::size_t num_classes_ = 0;
  std::vector<double> accuracy_;    // index 1..K, [0] unused
  std::vector<double> robustness_;  // index 1..K, [0] unused
};

/// Config with `num_classes` copies of `params`.
SyntheticDetectorConfig uniform_detector_config(std::size_t num_classes,
                                                const SyntheticClassParams& params = {});

}  // namespace flipal
