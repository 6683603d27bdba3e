#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "flipal/box.hpp"
#include "flipal/class_dist.hpp"
#include "flipal/detection.hpp"
#include "flipal/nms.hpp"
#include "test_support.hpp"

using namespace flipal;
using flipal::testing::random_box;
using flipal::testing::random_detection;

namespace {

Detection det(BoxCorner b, std::size_t cls, double score, std::size_t n = 4) {
  std::vector<double> p(n, (1.0 - score) / static_cast<double>(n - 1));
  p[cls] = score;
  return Detection::from_corner(b, ClassDist(p), 200.0, 200.0);
}

}  // namespace

TEST_CASE("iou examples") {
  const BoxCorner a{0, 0, 1, 1};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, {2, 2, 3, 3}) == 0.0);
  CHECK(iou(a, {0.5, 0, 1.5, 1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(iou({1, 1, 1, 1}, {1, 1, 1, 1}) == 0.0);  // two degenerate boxes
  CHECK(iou(a, {1, 0, 2, 1}) == 0.0);              // touching edges
}

TEST_CASE("iou is symmetric and bounded") {
  std::mt19937_64 g(7);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_box(g);
    const auto b = random_box(g);
    const double v = iou(a, b);
    CHECK(v == iou(b, a));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(iou(a, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("encode/decode") {
  const BoxCorner anchor{10, 20, 50, 100};
  const auto e = encode_box(anchor, anchor);
  CHECK(e == BoxEncoded{0.0, 0.0, 1.0, 1.0});

  std::mt19937_64 g(11);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto b = random_box(g, 500.0, 0.5);
    const auto an = random_box(g, 500.0, 0.5);
    const auto back = decode_box(encode_box(b, an), an);
    worst = std::max({worst, std::abs(back.xmin - b.xmin), std::abs(back.ymin - b.ymin),
                      std::abs(back.xmax - b.xmax), std::abs(back.ymax - b.ymax)});
  }
  CHECK(worst < 1e-9);

  CHECK_THROWS_AS(encode_box(anchor, BoxCorner{5, 5, 5, 10}), InvalidAnchor);
  CHECK_THROWS_WITH(decode_box(e, BoxCorner{5, 5, 10, 5}), "invalid anchor");
}

TEST_CASE("class distribution validation") {
  CHECK_NOTHROW(ClassDist({0.25, 0.75}));
  CHECK_THROWS(ClassDist({1.0}));
  CHECK_THROWS(ClassDist({0.5, 0.6}));
  CHECK_THROWS(ClassDist({-0.1, 1.1}));
  const ClassDist d({0.1, 0.6, 0.3});
  CHECK(d.argmax() == 1);
  CHECK(d.foreground_argmax() == 1);
  const ClassDist bg({0.7, 0.1, 0.2});
  CHECK(bg.argmax() == 0);
  CHECK(bg.foreground_argmax() == 2);
  CHECK(bg.foreground_only()[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("hflip") {
  ImagePrediction p{"a", 100, 60, {}};
  p.detections.push_back(Detection::from_corner({10, 20, 30, 40}, ClassDist({0.2, 0.8}), 100, 60));
  const auto f = hflip(p);
  CHECK(f.detections[0].box_corner == BoxCorner{70, 20, 90, 40});
  CHECK(f.detections[0].box_encoded.dx == -p.detections[0].box_encoded.dx);
  CHECK(f.detections[0].dist == p.detections[0].dist);
  CHECK(box_form_discrepancy(f) < 1e-9);

  Detection enc = p.detections[0];
  enc.box_encoded.dx = 0.2;
  CHECK(hflip(enc, 100.0).box_encoded.dx == -0.2);

  std::mt19937_64 g(3);
  for (int i = 0; i < 200; ++i) {
    auto q = flipal::testing::random_prediction(g, "r", 5, 4);
    const auto twice = hflip(hflip(q));
    REQUIRE(twice.detections.size() == q.detections.size());
    for (std::size_t k = 0; k < q.detections.size(); ++k) {
      const auto& a = q.detections[k];
      const auto& b = twice.detections[k];
      CHECK(b.box_corner.xmin == doctest::Approx(a.box_corner.xmin));
      CHECK(b.box_corner.xmax == doctest::Approx(a.box_corner.xmax));
      CHECK(b.box_encoded == a.box_encoded);
      CHECK(b.dist == a.dist);
      CHECK(hflip(q).detections[k].box_corner.area() == doctest::Approx(a.box_corner.area()));
    }
  }
}

TEST_CASE("nms examples") {
  // Same class, IoU 0.8: only the stronger survives.
  const BoxCorner a{0, 0, 10, 10};
  const BoxCorner b{0, 0, 10, 8};
  REQUIRE(iou(a, b) == doctest::Approx(0.8));
  auto kept = nms({det(a, 1, 0.9), det(b, 1, 0.8)}, {0.5, 0.01});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].score() == doctest::Approx(0.9));

  kept = nms({det(a, 1, 0.9), det(b, 2, 0.8)}, {0.5, 0.01});
  CHECK(kept.size() == 2);

  CHECK(nms(std::vector<Detection>{}).empty());

  // Score floor and ordering with ties by input position.
  kept = nms({det({50, 50, 60, 60}, 2, 0.5), det(a, 1, 0.5), det({100, 100, 120, 120}, 0, 0.997)});
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].label() == 2);
  CHECK(kept[1].label() == 1);

  CHECK_THROWS(nms(std::vector<Detection>{}, {0.0, 0.01}));
  CHECK_THROWS(nms(std::vector<Detection>{}, {0.5, 1.0}));
}

TEST_CASE("nms invariants on random instances") {
  std::mt19937_64 g(99);
  const NmsOptions opts{0.45, 0.01};
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<Detection> dets;
    const int n = std::uniform_int_distribution<int>(0, 25)(g);
    for (int i = 0; i < n; ++i) dets.push_back(random_detection(g, 4, 60.0));
    const auto once = nms(dets, opts);
    const auto twice = nms(once, opts);
    REQUIRE(twice.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(twice[i].box_corner == once[i].box_corner);
      CHECK(twice[i].dist == once[i].dist);
    }
    for (std::size_t i = 0; i < once.size(); ++i) {
      const bool in_input = std::any_of(dets.begin(), dets.end(), [&](const Detection& d) {
        return d.box_corner == once[i].box_corner && d.dist == once[i].dist;
      });
      CHECK(in_input);
      if (i > 0) CHECK(once[i - 1].score() >= once[i].score());
      for (std::size_t j = i + 1; j < once.size(); ++j) {
        if (once[i].label() == once[j].label()) {
          CHECK(iou(once[i].box_corner, once[j].box_corner) <= opts.iou_threshold);
        }
      }
    }
  }
}
