#include "flipal/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace flipal {

std::string_view to_string(Interpolation i) {
  return i == Interpolation::kElevenPoint ? "eleven_point" : "all_point";
}

Interpolation parse_interpolation(std::string_view name) {
  if (name == "eleven_point") return Interpolation::kElevenPoint;
  if (name == "all_point") return Interpolation::kAllPoint;
  throw std::invalid_argument("unknown interpolation '" + std::string(name) + "'");
}

namespace {

double eleven_point(const std::vector<double>& rec, const std::vector<double>& prec) {
  double sum = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    double best = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] >= t) best = std::max(best, prec[i]);
    }
    sum += best;
  }
  return sum / 11.0;
}

double all_point(const std::vector<double>& rec, const std::vector<double>& prec) {
  std::vector<double> mrec{0.0};
  std::vector<double> mpre{0.0};
  mrec.insert(mrec.end(), rec.begin(), rec.end());
  mpre.insert(mpre.end(), prec.begin(), prec.end());
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  double ap = 0.0;
  for (std::size_t i = 1; i < mrec.size(); ++i) {
    if (mrec[i] != mrec[i - 1]) ap += (mrec[i] - mrec[i - 1]) * mpre[i];
  }
  return ap;
}

}  // namespace

double average_precision(std::span<const ImageDetection> dets,
                         std::span<const GroundTruthObject> gt, std::size_t class_id,
                         std::size_t num_classes, const ApOptions& opts) {
  if (class_id == 0 || class_id > num_classes) {
    throw std::invalid_argument("unknown class " + std::to_string(class_id));
  }

  std::vector<std::size_t> gt_idx;
  for (std::size_t j = 0; j < gt.size(); ++j) {
    if (gt[j].class_id == class_id) gt_idx.push_back(j);
  }
  if (gt_idx.empty()) return 0.0;

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].det.label() == class_id) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].det.score() > dets[b].det.score();
  });

  std::vector<bool> claimed(gt.size(), false);
  std::vector<double> rec, prec;
  rec.reserve(order.size());
  prec.reserve(order.size());
  std::size_t tp = 0, fp = 0;
  for (std::size_t i : order) {
    double best = -1.0;
    std::size_t best_j = gt.size();
    for (std::size_t j : gt_idx) {
      if (gt[j].image_id != dets[i].image_id) continue;
      const double v = iou(gt[j].box_corner, dets[i].det.box_corner);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best > opts.iou_threshold && !claimed[best_j]) {
      claimed[best_j] = true;
      ++tp;
    } else {
      ++fp;
    }
    rec.push_back(static_cast<double>(tp) / static_cast<double>(gt_idx.size()));
    prec.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  return opts.interpolation == Interpolation::kElevenPoint ? eleven_point(rec, prec)
                                                           : all_point(rec, prec);
}

EvalResult map50(std::span<const ImageDetection> dets, std::span<const GroundTruthObject> gt,
                 std::size_t num_classes, Interpolation interpolation) {
  EvalResult r;
  r.interpolation = interpolation;
  std::vector<std::size_t> counts(num_classes + 1, 0);
  for (const auto& g : gt) {
    if (g.class_id == 0 || g.class_id > num_classes) {
      throw std::invalid_argument("ground truth class " + std::to_string(g.class_id) +
                                  " outside 1.." + std::to_string(num_classes));
    }
    ++counts[g.class_id];
  }

  std::vector<double> ap(num_classes + 1, 0.0);
  const ApOptions opts{0.5, interpolation};
  const auto n = static_cast<std::ptrdiff_t>(num_classes);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 1; c <= n; ++c) {
    if (counts[c] > 0) ap[c] = average_precision(dets, gt, c, num_classes, opts);
  }

  double sum = 0.0;
  for (std::size_t c = 1; c <= num_classes; ++c) {
    r.n_gt[c] = counts[c];
    if (counts[c] == 0) {
      r.excluded_classes.push_back(c);
      continue;
    }
    r.per_class_ap[c] = ap[c];
    sum += ap[c];
  }
  r.map50 = r.per_class_ap.empty() ? 0.0 : sum / static_cast<double>(r.per_class_ap.size());
  return r;
}

double winrate_table(std::span<const EvalResult> results_a, std::span<const EvalResult> results_b) {
  if (results_a.empty() || results_b.empty()) {
    throw std::invalid_argument("winrate needs at least one result per method");
  }
  std::vector<std::size_t> classes;
  for (const auto& [c, ap] : results_a.front().per_class_ap) classes.push_back(c);

  auto mean_ap = [&](std::span<const EvalResult> rs, std::size_t c) {
    double s = 0.0;
    for (const auto& r : rs) {
      if (r.per_class_ap.size() != classes.size()) {
        throw std::invalid_argument("winrate: results cover different class sets");
      }
      const auto it = r.per_class_ap.find(c);
      if (it == r.per_class_ap.end()) {
        throw std::invalid_argument("winrate: class " + std::to_string(c) + " missing");
      }
      s += it->second;
    }
    return s / static_cast<double>(rs.size());
  };

  if (classes.empty()) return 0.0;
  std::size_t wins = 0;
  for (std::size_t c : classes) {
    if (mean_ap(results_a, c) > mean_ap(results_b, c)) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(classes.size());
}

}  // namespace flipal
