#pragma once

// Random fixture generators and direct-formula oracles shared by the test
// binaries. Oracles deliberately avoid the library's code paths.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "flipal/box.hpp"
#include "flipal/class_dist.hpp"
#include "flipal/detection.hpp"
#include "flipal/pseudo_label.hpp"
#include <string>
#include <utility>

namespace flipal::testing {

inline BoxCorner random_box(std::mt19937_64& g, double extent = 100.0, double min_side = 1.0) {
  std::uniform_real_distribution<double> u(0.0, extent);
  double x0 = u(g), x1 = u(g), y0 = u(g), y1 = u(g);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  if (x1 - x0 < min_side) x1 = x0 + min_side;
  if (y1 - y0 < min_side) y1 = y0 + min_side;
  return {x0, y0, x1, y1};
}

/// Random distribution; `peak` sharpens it toward a random category.
inline ClassDist random_dist(std::mt19937_64& g, std::size_t n, double peak = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  for (auto& v : w) v = u(g) + 1e-3;
  if (peak > 0.0) w[std::uniform_int_distribution<std::size_t>(0, n - 1)(g)] += peak;
  return ClassDist::normalized(std::move(w));
}

inline Detection random_detection(std::mt19937_64& g, std::size_t n_categories,
                                  double extent = 100.0) {
  const auto box = random_box(g, extent, 2.0);
  return Detection::from_corner(box, random_dist(g, n_categories, 2.0), extent + 1.0, extent + 1.0);
}

inline ImagePrediction random_prediction(std::mt19937_64& g, const ImageId& id,
                                         std::size_t n_dets, std::size_t n_categories) {
  ImagePrediction p{id, 101, 101, {}};
  for (std::size_t i = 0; i < n_dets; ++i) p.detections.push_back(random_detection(g, n_categories));
  return p;
}

// ---- oracles -------------------------------------------------------------

/// KL by direct summation in long double with the same 1e-12 floor.
inline long double oracle_kl(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    const long double pp = std::max<long double>(p[i], 1e-12L);
    const long double qq = std::max<long double>(q[i], 1e-12L);
    s += static_cast<long double>(p[i]) * std::log(pp / qq);
  }
  return s;
}

inline double oracle_sym_kl(const ClassDist& a, const ClassDist& b) {
  const std::vector<double> p(a.probs().begin(), a.probs().end());
  const std::vector<double> q(b.probs().begin(), b.probs().end());
  return static_cast<double>(0.5L * (oracle_kl(p, q) + oracle_kl(q, p)));
}

inline double oracle_entropy(const ClassDist& a) {
  long double s = 0.0L;
  for (double v : a.probs()) {
    if (v > 0.0) s -= static_cast<long double>(v) * std::log(std::max<long double>(v, 1e-12L));
  }
  return static_cast<double>(s);
}

/// Relative closeness with an absolute floor for values near zero.
inline bool rel_close(double a, double b, double rel) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= rel * scale || std::abs(a - b) <= 1e-15;
}

// ---- fixtures --------------------------------------------------------------

struct AuditFixture {
  std::vector<PseudoLabel> pls;
  std::vector<GroundTruthObject> gt;
  std::size_t expected_correct = 0;
};

/// 25 pseudo-labels, 24 of which satisfy the class + IoU > 0.5 rule:
///  * a00..a19: one object each, PL shifted right by 0.5*i (IoU 1 down to ~0.62)
///  * b: two objects of class 2, one PL on each
///  * c: one class-3 object, a tight PL (IoU 0.9) and a looser duplicate
///    (IoU ~0.78) that finds the object already consumed
///  * d: class-1 and class-4 objects on the same region, PL of class 4
inline AuditFixture make_audit_fixture() {
  AuditFixture f;
  auto add_pl = [&](const std::string& id, BoxCorner b, std::size_t cls) {
    f.pls.push_back({id, b, cls, 0.995});
  };
  const BoxCorner base{10, 10, 50, 50};
  for (int i = 0; i < 20; ++i) {
    const std::string id = "a" + std::to_string(100 + i).substr(1);
    const std::size_t cls = static_cast<std::size_t>(i % 5) + 1;
    const double s = 0.5 * i;
    f.gt.push_back({id, base, cls});
    add_pl(id, {base.xmin + s, base.ymin, base.xmax + s, base.ymax}, cls);
  }
  f.gt.push_back({"b", {0, 0, 20, 20}, 2});
  f.gt.push_back({"b", {60, 60, 90, 90}, 2});
  add_pl("b", {1, 0, 21, 20}, 2);
  add_pl("b", {60, 61, 90, 91}, 2);

  // 40x40 box; a shift of s gives IoU (40 - s) / (40 + s).
  f.gt.push_back({"c", base, 3});
  const double s_tight = 40.0 * (1.0 - 0.9) / (1.0 + 0.9);
  add_pl("c", {base.xmin + 5.0, base.ymin, base.xmax + 5.0, base.ymax}, 3);
  add_pl("c", {base.xmin + s_tight, base.ymin, base.xmax + s_tight, base.ymax}, 3);

  f.gt.push_back({"d", {30, 30, 80, 80}, 1});
  f.gt.push_back({"d", {30, 30, 80, 80}, 4});
  add_pl("d", {31, 30, 80, 80}, 4);
  f.expected_correct = 24;
  return f;
}

}  // namespace flipal::testing
