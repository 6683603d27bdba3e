#pragma once

#include <map>
#include <memory>
#include <utility>

#include "flipal/detection.hpp"
#include "flipal/pool.hpp"

namespace flipal {

/// Anything that can predict on an image and its mirror, and be retrained
/// on a pool. predict() must be deterministic for a given state and safe to
/// call concurrently; with flipped=true the detections are in the flipped frame.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual ImagePrediction predict(const ImageId& id, bool flipped) const = 0;
  /// State after training on `pool` (labeled set plus its pseudo-labels).
  virtual std::unique_ptr<Detector> update(const Pool& pool) const = 0;
};

/// Fixed predictions loaded from elsewhere, e.g. a real detector's JSONL dump.
/// update() is a no-op.
class PredictionTable final : public Detector {
 public:
  void add(ImagePrediction pred, bool flipped);
  bool contains(const ImageId& id, bool flipped) const;
  ImagePrediction predict(const ImageId& id, bool flipped) const override;
  std::unique_ptr<Detector> update(const Pool&) const override {
    return std::make_unique<PredictionTable>(*this);
  }
  const std::map<std::pair<ImageId, bool>, ImagePrediction>& records() const { return table_; }

 private:
  std::map<std::pair<ImageId, bool>, ImagePrediction> table_;
};

}  // namespace flipal
