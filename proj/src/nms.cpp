#include "flipal/nms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace flipal {

std::vector<Detection> nms(const std::vector<Detection>& dets, const NmsOptions& opts) {
  if (!(opts.iou_threshold > 0.0 && opts.iou_threshold <= 1.0)) {
    throw std::invalid_argument("nms iou_threshold must be in (0,1]");
  }
  if (!(opts.score_floor >= 0.0 && opts.score_floor < 1.0)) {
    throw std::invalid_argument("nms score_floor must be in [0,1)");
  }

  std::vector<std::size_t> order;
  order.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].score() >= opts.score_floor) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score() > dets[b].score();
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const auto& cand = dets[idx];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return dets[k].label() == cand.label() &&
             iou(dets[k].box_corner, cand.box_corner) > opts.iou_threshold;
    });
    if (!suppressed) kept.push_back(idx);
  }

  std::vector<Detection> out;
  out.reserve(kept.size());
  for (std::size_t k : kept) out.push_back(dets[k]);
  return out;
}

ImagePrediction nms(const ImagePrediction& pred, const NmsOptions& opts) {
  return {pred.image_id, pred.width, pred.height, nms(pred.detections, opts)};
}

}  // namespace flipal
