#include "flipal/loss_check.hpp"

#include <stdexcept>

#include "flipal/io.hpp"
#include "json.hpp"

namespace flipal {

using nlohmann::json;

namespace {

BoxEncoded encoded_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw std::invalid_argument("encoded box must be [dx,dy,w,h]");
  BoxEncoded e{v[0], v[1], v[2], v[3]};
  if (!e.valid()) throw std::invalid_argument("encoded box needs finite values and w,h > 0");
  return e;
}

std::vector<BoxEncoded> encoded_list(const json& j, const char* key) {
  std::vector<BoxEncoded> out;
  for (const auto& e : j.value(key, json::array())) out.push_back(encoded_from_json(e));
  return out;
}

Detection detection_from_encoded(ClassDist dist, const BoxEncoded& enc) {
  return {decode_box(enc, BoxCorner{0.0, 0.0, 1.0, 1.0}), enc, std::move(dist)};
}

}  // namespace

MatchedPair make_pair_from_frames(ClassDist original_dist, const BoxEncoded& original_encoded,
                                  ClassDist flipped_dist, const BoxEncoded& flipped_encoded) {
  MatchedPair p;
  p.original = detection_from_encoded(std::move(original_dist), original_encoded);
  // The unit anchor is symmetric about x = 0.5, so un-flipping is hflip at width 1.
  p.flipped = hflip(detection_from_encoded(std::move(flipped_dist), flipped_encoded), 1.0);
  p.iou = iou(p.original.box_corner, p.flipped.box_corner);
  return p;
}

LossFixture parse_loss_fixture(std::string_view json_text) {
  LossFixture fx;
  try {
    const auto j = json::parse(json_text);
    for (const auto& p : j.at("probs")) fx.dists.emplace_back(p.get<std::vector<double>>());
    fx.pred_encoded = encoded_list(j, "pred_encoded");
    fx.target_encoded = encoded_list(j, "target_encoded");
    for (const auto& p : j.value("positives", json::array())) {
      const auto v = p.get<std::vector<std::size_t>>();
      if (v.size() != 3) throw std::invalid_argument("positive must be [pred,gt,class]");
      fx.assignment.positives.push_back({v[0], v[1], v[2]});
    }
    fx.assignment.negatives = j.value("negatives", std::vector<std::size_t>{});
    for (const auto& p : j.value("pl_positives", json::array())) {
      const auto v = p.get<std::vector<std::size_t>>();
      if (v.size() != 2) throw std::invalid_argument("pl_positive must be [pred,class]");
      fx.assignment.pl_positives.push_back({v[0], v[1]});
    }
    if (j.contains("loc_positives")) {
      fx.loc_positives = j["loc_positives"].get<std::vector<std::size_t>>();
    } else if (!fx.pred_encoded.empty()) {
      for (const auto& p : fx.assignment.positives) fx.loc_positives.push_back(p.pred);
      for (const auto& p : fx.assignment.pl_positives) fx.loc_positives.push_back(p.pred);
    }
    for (const auto& jp : j.value("pairs", json::array())) {
      fx.pairs.push_back(make_pair_from_frames(
          ClassDist(jp.at("original_probs").get<std::vector<double>>()),
          encoded_from_json(jp.at("original_encoded")),
          ClassDist(jp.at("flipped_probs").get<std::vector<double>>()),
          encoded_from_json(jp.at("flipped_encoded"))));
    }
  } catch (const std::exception& e) {
    throw io::FormatError(std::string("loss fixture: ") + e.what());
  }
  return fx;
}

LossBreakdown compute_losses(const LossFixture& fx) {
  LossBreakdown b;
  b.conf = pl_multibox_conf_loss(fx.dists, fx.assignment);
  b.consistency_class = consistency_class_loss(fx.pairs);
  b.consistency_loc = consistency_loc_loss(fx.pairs);
  b.consistency = b.consistency_class + b.consistency_loc;
  b.loc_l1 = smooth_l1_loc_loss(fx.pred_encoded, fx.target_encoded, fx.loc_positives);
  b.total = total_loss(b.conf, b.consistency_class, b.consistency_loc, b.loc_l1);
  return b;
}

std::string format_losses(const LossBreakdown& b) {
  std::string out = "term,value\n";
  auto line = [&](const char* name, double v) { out += std::string(name) + "," + io::fixed6(v) + "\n"; };
  line("conf", b.conf);
  line("consistency_class", b.consistency_class);
  line("consistency_loc", b.consistency_loc);
  line("consistency", b.consistency);
  line("loc_l1", b.loc_l1);
  line("total", b.total);
  return out;
}

}  // namespace flipal
