#include "flipal/pseudo_label.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace flipal {

std::vector<PseudoLabel> extract_pseudo_labels(const ImagePrediction& pred, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must be in (0,1)");
  std::vector<PseudoLabel> out;
  for (const auto& d : pred.detections) {
    const std::size_t cls = d.dist.argmax();
    if (cls == 0) continue;
    const double conf = d.dist[cls];
    if (conf >= tau) out.push_back({pred.image_id, d.box_corner, cls, conf});
  }
  return out;
}

std::vector<PseudoLabel> extract_topk_per_class(std::span<const ImagePrediction> preds,
                                                double k_fraction) {
  if (!(k_fraction > 0.0 && k_fraction <= 1.0)) {
    throw std::invalid_argument("k_fraction must be in (0,1]");
  }
  std::map<std::size_t, std::vector<PseudoLabel>> by_class;
  for (const auto& p : preds) {
    for (const auto& d : p.detections) {
      const std::size_t cls = d.dist.argmax();
      if (cls == 0) continue;
      by_class[cls].push_back({p.image_id, d.box_corner, cls, d.dist[cls]});
    }
  }
  std::vector<PseudoLabel> out;
  for (auto& [cls, cands] : by_class) {
    std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      return a.confidence > b.confidence;
    });
    // 1e-9 absorbs products like 0.3 * 10 landing just above an integer.
    const double want = std::ceil(k_fraction * static_cast<double>(cands.size()) - 1e-9);
    const auto take = std::min(cands.size(), static_cast<std::size_t>(want));
    out.insert(out.end(), cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

PlAudit audit_pl_correctness(std::span<const PseudoLabel> pls,
                             std::span<const GroundTruthObject> gt) {
  PlAudit audit;
  audit.n_pseudo = pls.size();
  if (pls.empty()) return audit;
  audit.empty = false;

  struct Edge {
    double iou;
    std::size_t pl;
    std::size_t gt;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < pls.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (pls[i].image_id != gt[j].image_id || pls[i].class_id != gt[j].class_id) continue;
      const double v = iou(pls[i].box_corner, gt[j].box_corner);
      if (v > 0.5) edges.push_back({v, i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.pl, a.gt) < std::tie(b.pl, b.gt);
  });
  std::vector<bool> pl_done(pls.size(), false);
  std::vector<bool> gt_used(gt.size(), false);
  for (const auto& e : edges) {
    if (pl_done[e.pl] || gt_used[e.gt]) continue;
    pl_done[e.pl] = gt_used[e.gt] = true;
    ++audit.n_correct;
  }
  audit.correctness = static_cast<double>(audit.n_correct) / static_cast<double>(pls.size());
  return audit;
}

}  // namespace flipal
