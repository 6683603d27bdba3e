#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>

#include "flipal/box.hpp"
#include "flipal/pseudo_label.hpp"
#include "test_support.hpp"

using namespace flipal;

namespace {

Detection peaked(std::size_t n, std::size_t cls, double p, BoxCorner box = {10, 10, 40, 40}) {
  std::vector<double> v(n, (1.0 - p) / static_cast<double>(n - 1));
  v[cls] = p;
  return Detection::from_corner(box, ClassDist(v), 100, 100);
}

ImagePrediction single(Detection d) { return {"x", 100, 100, {std::move(d)}}; }

}  // namespace

TEST_CASE("threshold rule") {
  const auto pls = extract_pseudo_labels(single(peaked(5, 3, 0.995)), 0.99);
  REQUIRE(pls.size() == 1);
  CHECK(pls[0].class_id == 3);
  CHECK(pls[0].confidence == 0.995);
  CHECK(pls[0].image_id == "x");

  CHECK(extract_pseudo_labels(single(peaked(5, 3, 0.98)), 0.99).empty());
  CHECK(extract_pseudo_labels(single(peaked(5, 0, 0.999)), 0.5).empty());
  CHECK(extract_pseudo_labels(single(peaked(5, 2, 0.99)), 0.99).size() == 1);

  CHECK_THROWS(extract_pseudo_labels(single(peaked(5, 3, 0.995)), 0.0));
  CHECK_THROWS(extract_pseudo_labels(single(peaked(5, 3, 0.995)), 1.0));
}

TEST_CASE("monotone in tau and every label satisfies the rule") {
  std::mt19937_64 g(61);
  for (int inst = 0; inst < 500; ++inst) {
    ImagePrediction p{"r", 101, 101, {}};
    for (int k = 0; k < 10; ++k) {
      p.detections.push_back(flipal::testing::random_detection(g, 6));
      // Spread some detections toward near-certainty.
      if (k % 3 == 0) p.detections.back().dist = flipal::testing::random_dist(g, 6, 2000.0);
    }
    std::size_t prev = SIZE_MAX;
    for (double tau : {0.5, 0.9, 0.99}) {
      const auto pls = extract_pseudo_labels(p, tau);
      CHECK(pls.size() <= prev);
      prev = pls.size();
      for (const auto& pl : pls) {
        CHECK(pl.confidence >= tau);
        CHECK(pl.class_id >= 1);
        const auto it = std::find_if(p.detections.begin(), p.detections.end(), [&](const auto& d) {
          return d.box_corner == pl.box_corner;
        });
        REQUIRE(it != p.detections.end());
        CHECK(it->dist.argmax() == pl.class_id);
        CHECK(it->dist.foreground_max() == pl.confidence);
      }
    }
  }
}

TEST_CASE("top-k per class") {
  std::vector<ImagePrediction> preds(1, ImagePrediction{"t", 100, 100, {}});
  for (int i = 0; i < 10; ++i) preds[0].detections.push_back(peaked(4, 2, 0.5 + 0.04 * i));
  preds[0].detections.push_back(peaked(4, 0, 0.9));
  const auto top = extract_topk_per_class(preds, 0.2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].confidence == doctest::Approx(0.86));
  CHECK(top[1].confidence == doctest::Approx(0.82));
  CHECK(extract_topk_per_class(preds, 1.0).size() == 10);
  CHECK_THROWS(extract_topk_per_class(preds, 0.0));
  CHECK_THROWS(extract_topk_per_class(preds, 1.5));

  std::mt19937_64 g(67);
  for (int inst = 0; inst < 200; ++inst) {
    std::vector<ImagePrediction> ps;
    for (int im = 0; im < 3; ++im) {
      ps.push_back(flipal::testing::random_prediction(g, "p" + std::to_string(im), 8, 4));
    }
    const double k = std::uniform_real_distribution<double>(0.05, 1.0)(g);
    std::map<std::size_t, std::vector<double>> by_class;
    for (const auto& p : ps) {
      for (const auto& d : p.detections) {
        if (d.dist.argmax() != 0) by_class[d.dist.argmax()].push_back(d.dist.probs()[d.dist.argmax()]);
      }
    }
    std::multiset<std::pair<std::size_t, double>> want;
    for (auto& [c, v] : by_class) {
      std::sort(v.rbegin(), v.rend());
      const auto take = static_cast<std::size_t>(std::ceil(k * static_cast<double>(v.size()) - 1e-9));
      for (std::size_t i = 0; i < take; ++i) want.insert({c, v[i]});
    }
    std::multiset<std::pair<std::size_t, double>> got;
    for (const auto& pl : extract_topk_per_class(ps, k)) got.insert({pl.class_id, pl.confidence});
    CHECK(got == want);
  }
}

TEST_CASE("audit examples") {
  const GroundTruthObject gt{"a", {0, 0, 40, 40}, 2};
  // Shift s gives IoU (40 - s) / (40 + s).
  const double s06 = 40.0 * 0.4 / 1.6;
  const double s04 = 40.0 * 0.6 / 1.4;
  const std::vector<GroundTruthObject> gts{gt};
  const std::vector<PseudoLabel> ok{{"a", {s06, 0, 40 + s06, 40}, 2, 0.99}};
  const std::vector<PseudoLabel> loose{{"a", {s04, 0, 40 + s04, 40}, 2, 0.99}};
  const std::vector<PseudoLabel> wrong_class{{"a", {0, 0, 40, 40}, 3, 0.99}};
  const std::vector<PseudoLabel> other_image{{"b", {0, 0, 40, 40}, 2, 0.99}};
  CHECK(iou(ok[0].box_corner, gt.box_corner) == doctest::Approx(0.6));
  CHECK(audit_pl_correctness(ok, gts).correctness == 1.0);
  CHECK(audit_pl_correctness(loose, gts).correctness == 0.0);
  CHECK(audit_pl_correctness(wrong_class, gts).correctness == 0.0);
  CHECK(audit_pl_correctness(other_image, gts).correctness == 0.0);

  const auto empty = audit_pl_correctness(std::vector<PseudoLabel>{}, gts);
  CHECK(empty.correctness == 1.0);
  CHECK(empty.empty);
  CHECK_FALSE(audit_pl_correctness(ok, gts).empty);
}

TEST_CASE("audit fixture of 25 labels") {
  const auto fx = flipal::testing::make_audit_fixture();
  REQUIRE(fx.pls.size() == 25);
  const auto a = audit_pl_correctness(fx.pls, fx.gt);
  CHECK(a.n_pseudo == 25);
  CHECK(a.n_correct == fx.expected_correct);
  CHECK(a.correctness == 0.96);

  auto shuffled = fx.pls;
  std::mt19937_64 g(71);
  for (int r = 0; r < 20; ++r) {
    std::shuffle(shuffled.begin(), shuffled.end(), g);
    CHECK(audit_pl_correctness(shuffled, fx.gt).correctness == 0.96);
  }
}
