#include "flipal/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "flipal/acquisition.hpp"

namespace flipal {

namespace {

double neg_log(double p) { return -std::log(std::clamp(p, kLogEpsilon, 1.0)); }

void check_assignment(std::span<const ClassDist> dists, const GroundTruthAssignment& asg) {
  std::vector<bool> used(dists.size(), false);
  auto claim = [&](std::size_t i) {
    if (i >= dists.size()) {
      throw std::out_of_range("assignment index " + std::to_string(i) + " out of range");
    }
    if (used[i]) throw std::invalid_argument("assignment conflict");
    used[i] = true;
  };
  auto check_class = [&](std::size_t i, std::size_t cls) {
    if (cls == 0 || cls >= dists[i].size()) {
      throw std::out_of_range("assignment class " + std::to_string(cls) + " out of range");
    }
  };
  for (const auto& p : asg.positives) {
    claim(p.pred);
    check_class(p.pred, p.cls);
  }
  for (std::size_t n : asg.negatives) claim(n);
  for (const auto& p : asg.pl_positives) {
    claim(p.pred);
    check_class(p.pred, p.cls);
  }
}

double labeled_terms(std::span<const ClassDist> dists, const GroundTruthAssignment& asg) {
  double acc = 0.0;
  for (const auto& p : asg.positives) acc += neg_log(dists[p.pred][p.cls]);
  for (std::size_t n : asg.negatives) acc += neg_log(dists[n][0]);
  return acc;
}

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

}  // namespace

double multibox_conf_loss(std::span<const ClassDist> dists, const GroundTruthAssignment& asg) {
  if (!asg.pl_positives.empty()) {
    throw std::invalid_argument("multibox_conf_loss takes no pseudo-positives");
  }
  check_assignment(dists, asg);
  return labeled_terms(dists, asg);
}

double pl_multibox_conf_loss(std::span<const ClassDist> dists,
                             const GroundTruthAssignment& asg) {
  check_assignment(dists, asg);
  double acc = labeled_terms(dists, asg);
  for (const auto& p : asg.pl_positives) acc += neg_log(dists[p.pred][p.cls]);
  return acc;
}

double smooth_l1_loc_loss(std::span<const BoxEncoded> pred, std::span<const BoxEncoded> target,
                          std::span<const std::size_t> positives) {
  if (pred.size() != target.size()) {
    throw std::invalid_argument("smooth_l1_loc_loss: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i : positives) {
    if (i >= pred.size()) throw std::out_of_range("smooth_l1_loc_loss: index out of range");
    acc += smooth_l1(pred[i].dx - target[i].dx) + smooth_l1(pred[i].dy - target[i].dy) +
           smooth_l1(pred[i].w - target[i].w) + smooth_l1(pred[i].h - target[i].h);
  }
  return acc;
}

double consistency_class_loss(std::span<const MatchedPair> pairs, bool include_background) {
  if (pairs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& pr : pairs) {
    acc += include_background
               ? sym_kl(pr.original.dist, pr.flipped.dist)
               : sym_kl(pr.original.dist.foreground_only(), pr.flipped.dist.foreground_only());
  }
  return acc / static_cast<double>(pairs.size());
}

double consistency_loc_loss(std::span<const MatchedPair> pairs) {
  if (pairs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& pr : pairs) {
    const auto& o = pr.original.box_encoded;
    const auto f = pr.flipped_frame_encoded();
    const double rx = o.dx - (-f.dx);
    const double ry = o.dy - f.dy;
    const double rw = o.w - f.w;
    const double rh = o.h - f.h;
    acc += 0.25 * (rx * rx + ry * ry + rw * rw + rh * rh);
  }
  return acc / static_cast<double>(pairs.size());
}

}  // namespace flipal
