#pragma once

// Exhaustive reference implementations for matching and AP.

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "flipal/eval.hpp"
#include "flipal/matching.hpp"

namespace flipal::testing {

using IndexPairs = std::set<std::pair<std::size_t, std::size_t>>;

inline IndexPairs as_set(const MatchResult& r) {
  IndexPairs s;
  for (const auto& p : r.pairs) s.insert({p.orig_index, p.flipped_index});
  return s;
}

/// Enumerates every injective partial matching whose edges clear the floor
/// and keeps the one with the lexicographically largest descending IoU list,
/// which is what accepting pairs best-first produces.
inline IndexPairs brute_force_best_first(const ImagePrediction& a, const ImagePrediction& b,
                                  double min_iou) {
  const std::size_t n = a.detections.size();
  const std::size_t m = b.detections.size();
  std::vector<std::vector<double>> w(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) w[i][j] = iou(a.detections[i].box_corner, b.detections[j].box_corner);
  }
  std::vector<double> best_key;
  IndexPairs best;
  std::vector<bool> used(m, false);
  IndexPairs cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      std::vector<double> key;
      for (const auto& [x, y] : cur) key.push_back(w[x][y]);
      std::sort(key.rbegin(), key.rend());
      if (best_key.empty() && best.empty() ? true
                                           : std::lexicographical_compare(best_key.begin(), best_key.end(),
                                                                          key.begin(), key.end())) {
        best_key = key;
        best = cur;
      }
      return;
    }
    rec(i + 1);  // leave i unmatched
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j] || w[i][j] < min_iou) continue;
      used[j] = true;
      cur.insert({i, j});
      rec(i + 1);
      cur.erase({i, j});
      used[j] = false;
    }
  };
  rec(0);
  return best;
}

inline ImagePrediction jittered_copy(std::mt19937_64& g, const ImagePrediction& p, double amount) {
  ImagePrediction out = p;
  std::normal_distribution<double> n(0.0, amount);
  for (auto& d : out.detections) {
    d.box_corner.xmin += n(g);
    d.box_corner.xmax = std::max(d.box_corner.xmin + 1.0, d.box_corner.xmax + n(g));
    d.box_corner.ymin += n(g);
    d.box_corner.ymax = std::max(d.box_corner.ymin + 1.0, d.box_corner.ymax + n(g));
  }
  std::shuffle(out.detections.begin(), out.detections.end(), g);
  return out;
}

/// Precision/recall after each cutoff, recomputed from scratch per cutoff.
inline void pr_oracle(const std::vector<ImageDetection>& dets, const std::vector<GroundTruthObject>& gt,
               std::size_t cls, std::vector<double>& rec, std::vector<double>& prec) {
  std::vector<ImageDetection> ranked;
  for (const auto& d : dets) {
    if (d.det.label() == cls) ranked.push_back(d);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.det.score() > b.det.score(); });
  std::size_t npos = 0;
  for (const auto& g : gt) npos += g.class_id == cls;
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    std::vector<bool> used(gt.size(), false);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double best = -1.0;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < gt.size(); ++j) {
        if (gt[j].class_id != cls || gt[j].image_id != ranked[i].image_id) continue;
        const double v = iou(gt[j].box_corner, ranked[i].det.box_corner);
        if (v > best) {
          best = v;
          arg = j;
        }
      }
      if (best > 0.5 && !used[arg]) {
        used[arg] = true;
        ++tp;
      }
    }
    rec.push_back(static_cast<double>(tp) / static_cast<double>(npos));
    prec.push_back(static_cast<double>(tp) / static_cast<double>(k));
  }
}

inline double oracle_eleven(const std::vector<double>& rec, const std::vector<double>& prec) {
  double sum = 0.0;
  for (int k = 0; k <= 10; ++k) {
    double p = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] >= k / 10.0 && prec[i] > p) p = prec[i];
    }
    sum += p;
  }
  return sum / 11.0;
}

inline double oracle_all_point(const std::vector<double>& rec, const std::vector<double>& prec) {
  double area = 0.0, prev = 0.0;
  std::vector<double> levels(rec.begin(), rec.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (double r : levels) {
    if (r == 0.0) continue;
    double p = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] >= r) p = std::max(p, prec[i]);
    }
    area += (r - prev) * p;
    prev = r;
  }
  return area;
}

}  // namespace flipal::testing
