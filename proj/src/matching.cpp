#include "flipal/matching.hpp"

#include <algorithm>
#include <tuple>

namespace flipal {

namespace {

struct Candidate {
  double iou;
  std::size_t i;
  std::size_t j;
};

MatchResult greedy(const ImagePrediction& orig, const ImagePrediction& flipped, double min_iou) {
  const auto& a = orig.detections;
  const auto& b = flipped.detections;
  std::vector<Candidate> cands;
  cands.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double v = iou(a[i].box_corner, b[j].box_corner);
      if (v >= min_iou) cands.push_back({v, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.iou != y.iou) return x.iou > y.iou;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });

  std::vector<bool> used_a(a.size(), false);
  std::vector<bool> used_b(b.size(), false);
  MatchResult out;
  for (const auto& c : cands) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = used_b[c.j] = true;
    out.pairs.push_back({c.i, c.j, a[c.i], b[c.j], c.iou});
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!used_a[i]) out.unmatched_original.push_back(i);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!used_b[j]) out.unmatched_flipped.push_back(j);
  }
  return out;
}

MatchResult literal(const ImagePrediction& orig, const ImagePrediction& flipped,
                    double min_iou) {
  const auto& a = orig.detections;
  const auto& b = flipped.detections;
  std::vector<bool> used_a(a.size(), false);
  MatchResult out;
  for (std::size_t j = 0; j < b.size(); ++j) {
    std::size_t best = a.size();
    double best_iou = -1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = iou(a[i].box_corner, b[j].box_corner);
      if (v > best_iou) {
        best_iou = v;
        best = i;
      }
    }
    if (best < a.size() && best_iou >= min_iou) {
      used_a[best] = true;
      out.pairs.push_back({best, j, a[best], b[j], best_iou});
    } else {
      out.unmatched_flipped.push_back(j);
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!used_a[i]) out.unmatched_original.push_back(i);
  }
  return out;
}

}  // namespace

MatchResult match_predictions(const ImagePrediction& orig, const ImagePrediction& flipped,
                              const MatchOptions& opts) {
  if (orig.image_id != flipped.image_id) throw FrameMismatch();
  if (opts.min_iou < 0.0 || opts.min_iou > 1.0) {
    throw std::invalid_argument("min_match_iou must be in [0,1]");
  }
  return opts.mode == MatchMode::kGreedy ? greedy(orig, flipped, opts.min_iou)
                                         : literal(orig, flipped, opts.min_iou);
}

}  // namespace flipal
