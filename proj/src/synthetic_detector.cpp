#include "flipal/synthetic_detector.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "flipal/rng.hpp"

namespace flipal {

namespace {

enum Stream : std::uint64_t {
  kOrigDist = 1,
  kReuse = 2,
  kFlipDist = 3,
  kOrigBox = 4,
  kFlipBox = 5,
  kFalsePositives = 6,
};

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

std::string class_prefix(std::size_t c) { return "class " + std::to_string(c) + ": "; }

}  // namespace

std::vector<std::string> SyntheticDetectorConfig::violations() const {
  std::vector<std::string> out;
  if (classes.empty()) out.emplace_back("detector needs at least one class");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    if (!in_unit(c.accuracy)) out.push_back(class_prefix(i + 1) + "accuracy must be in [0,1]");
    if (!in_unit(c.flip_robustness)) {
      out.push_back(class_prefix(i + 1) + "flip_robustness must be in [0,1]");
    }
    if (!(c.temperature > 0.0)) out.push_back(class_prefix(i + 1) + "temperature must be > 0");
  }
  if (!(skill_gain_per_labeled >= 0.0)) out.emplace_back("skill_gain must be >= 0");
  if (!(pl_gain >= 0.0)) out.emplace_back("pl_gain must be >= 0");
  if (!(pl_noise_penalty >= 0.0)) out.emplace_back("pl_noise_penalty must be >= 0");
  if (!in_unit(accuracy_ceiling)) out.emplace_back("accuracy_ceiling must be in [0,1]");
  if (!(robustness_coupling >= 0.0)) out.emplace_back("robustness_coupling must be >= 0");
  if (!(box_noise >= 0.0)) out.emplace_back("box_noise must be >= 0");
  if (!(fp_rate >= 0.0)) out.emplace_back("fp_rate must be >= 0");
  if (!(fp_temperature > 0.0)) out.emplace_back("fp_temperature must be > 0");
  if (!in_unit(fp_robustness)) out.emplace_back("fp_robustness must be in [0,1]");
  if (!(margin_min > 0.0 && margin_min <= margin_max)) {
    out.emplace_back("need 0 < margin_min <= margin_max");
  }
  if (!(logit_spread >= 0.0 && logit_spread < 1.0)) {
    out.emplace_back("logit_spread must be in [0,1)");
  }
  if (!(wrong_margin_scale > 0.0)) out.emplace_back("wrong_margin_scale must be > 0");
  return out;
}

SyntheticDetectorConfig uniform_detector_config(std::size_t num_classes,
                                                const SyntheticClassParams& params) {
  SyntheticDetectorConfig cfg;
  cfg.classes.assign(num_classes, params);
  return cfg;
}

SyntheticDetector::SyntheticDetector(SyntheticDetectorConfig cfg,
                                     std::span<const ImageRecord> images,
                                     std::size_t num_classes)
    : cfg_(std::move(cfg)), num_classes_(num_classes) {
  if (cfg_.classes.size() != num_classes_) {
    throw std::invalid_argument("detector config has " + std::to_string(cfg_.classes.size()) +
                                " classes, dataset has " + std::to_string(num_classes_));
  }
  if (const auto v = cfg_.violations(); !v.empty()) {
    std::string msg = "invalid synthetic detector config:";
    for (const auto& s : v) msg += "\n  " + s;
    throw std::invalid_argument(msg);
  }
  auto index = std::make_shared<Index>();
  for (const auto& im : images) {
    if (!index->emplace(im.id, im).second) {
      throw std::invalid_argument("duplicate image id '" + im.id + "'");
    }
  }
  gt_ = std::move(index);
  accuracy_.assign(num_classes_ + 1, 0.0);
  robustness_.assign(num_classes_ + 1, 0.0);
  for (std::size_t c = 1; c <= num_classes_; ++c) {
    accuracy_[c] = cfg_.classes[c - 1].accuracy;
    robustness_[c] = cfg_.classes[c - 1].flip_robustness;
  }
}

ClassDist SyntheticDetector::draw_dist(std::uint64_t key, std::size_t true_class,
                                       double accuracy, double temperature,
                                       bool confident_wrong) const {
  auto g = detail::stream(key);
  const std::size_t n = num_classes_ + 1;
  const bool correct = detail::uniform01(g) < accuracy;
  std::size_t peak = true_class;
  if (!correct) {
    if (num_classes_ > 1) {
      std::uniform_int_distribution<std::size_t> other(1, num_classes_ - 1);
      peak = other(g);
      if (peak >= true_class) ++peak;
    } else {
      peak = 0;
    }
  } else {
    detail::uniform01(g);  // keep later draws aligned across outcomes
  }
  double margin = cfg_.margin_min + (cfg_.margin_max - cfg_.margin_min) * detail::uniform01(g);
  if (!correct && !confident_wrong) margin *= cfg_.wrong_margin_scale;

  std::vector<double> logits(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rest = cfg_.logit_spread * margin * detail::uniform01(g);
    logits[k] = (k == peak ? margin : rest) / temperature;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = std::exp(logits[k] - top);
  return ClassDist::normalized(std::move(w));
}

BoxCorner SyntheticDetector::jitter(const BoxCorner& box, std::uint64_t key, int width,
                                    int height) const {
  if (cfg_.box_noise == 0.0) return box;
  auto g = detail::stream(key);
  std::normal_distribution<double> noise(0.0, cfg_.box_noise);
  const double bw = box.width();
  const double bh = box.height();
  BoxCorner out{box.xmin + noise(g) * bw, box.ymin + noise(g) * bh, box.xmax + noise(g) * bw,
                box.ymax + noise(g) * bh};
  if (out.xmin > out.xmax) std::swap(out.xmin, out.xmax);
  if (out.ymin > out.ymax) std::swap(out.ymin, out.ymax);
  out = clamp_to(out, width, height);
  if (out.width() < 1.0 || out.height() < 1.0) return box;
  return out;
}

ImagePrediction SyntheticDetector::predict(const ImageId& id, bool flipped) const {
  const auto it = gt_->find(id);
  if (it == gt_->end()) throw std::out_of_range("synthetic detector: unknown image '" + id + "'");
  const auto& im = it->second;
  const double w = im.width;
  const double h = im.height;
  const std::uint64_t image_key = detail::mix(cfg_.seed, detail::hash_string(id));

  ImagePrediction pred{id, im.width, im.height, {}};
  auto emit = [&](const BoxCorner& gt_box, std::uint64_t obj_key, const ClassDist& orig_dist,
                  double robustness, auto&& redraw) {
    const BoxCorner frame_box = flipped ? mirror_x(gt_box, w) : gt_box;
    const auto box =
        jitter(frame_box, detail::mix(obj_key, flipped ? kFlipBox : kOrigBox), im.width, im.height);
    ClassDist dist = orig_dist;
    if (flipped) {
      auto g = detail::stream(obj_key, kReuse);
      if (!(detail::uniform01(g) < robustness)) dist = redraw();
    }
    pred.detections.push_back(Detection::from_corner(box, std::move(dist), w, h));
  };

  for (std::size_t k = 0; k < im.objects.size(); ++k) {
    const auto& obj = im.objects[k];
    const std::size_t c = obj.class_id;
    const auto& params = cfg_.classes[c - 1];
    const bool cw = params.confidently_wrong.value_or(params.accuracy < 0.5);
    const std::uint64_t obj_key = detail::mix(image_key, k);
    const auto orig = draw_dist(detail::mix(obj_key, kOrigDist), c, accuracy_[c],
                                params.temperature, cw);
    emit(obj.box_corner, obj_key, orig, robustness_[c], [&] {
      return draw_dist(detail::mix(obj_key, kFlipDist), c, accuracy_[c], params.temperature, cw);
    });
  }

  auto g = detail::stream(image_key, kFalsePositives);
  const int n_fp = cfg_.fp_rate > 0.0 ? std::poisson_distribution<int>(cfg_.fp_rate)(g) : 0;
  for (int f = 0; f < n_fp; ++f) {
    const double bw = w * (0.1 + 0.3 * detail::uniform01(g));
    const double bh = h * (0.1 + 0.3 * detail::uniform01(g));
    const double x0 = (w - bw) * detail::uniform01(g);
    const double y0 = (h - bh) * detail::uniform01(g);
    std::uniform_int_distribution<std::size_t> cls(1, num_classes_);
    const std::size_t fake_class = cls(g);
    const std::uint64_t fp_key = detail::mix(image_key, kFalsePositives, f);
    // A false positive is an always-wrong prediction with soft confidence.
    const auto orig = draw_dist(detail::mix(fp_key, kOrigDist), fake_class, 1.0,
                                cfg_.fp_temperature, false);
    emit(BoxCorner{x0, y0, x0 + bw, y0 + bh}, fp_key, orig, cfg_.fp_robustness, [&] {
      return draw_dist(detail::mix(fp_key, kFlipDist), fake_class, 1.0, cfg_.fp_temperature,
                       false);
    });
  }
  return pred;
}

SyntheticDetector SyntheticDetector::updated(const Pool& pool) const {
  SyntheticDetector next = *this;
  std::vector<double> gain(num_classes_ + 1, 0.0);

  for (const auto& id : pool.labeled) {
    const auto it = gt_->find(id);
    if (it == gt_->end()) {
      throw std::out_of_range("synthetic detector: labeled image '" + id + "' unknown");
    }
    std::vector<bool> present(num_classes_ + 1, false);
    for (const auto& o : it->second.objects) present[o.class_id] = true;
    for (std::size_t c = 1; c <= num_classes_; ++c) {
      if (present[c]) gain[c] += cfg_.skill_gain_per_labeled;
    }
  }

  for (const auto& [id, pls] : pool.pseudo) {
    const auto it = gt_->find(id);
    if (it == gt_->end()) continue;
    for (std::size_t c = 1; c <= num_classes_; ++c) {
      std::vector<PseudoLabel> of_class;
      for (const auto& pl : pls) {
        if (pl.class_id == c) of_class.push_back(pl);
      }
      if (of_class.empty()) continue;
      const auto audit = audit_pl_correctness(of_class, it->second.objects);
      const auto wrong = audit.n_pseudo - audit.n_correct;
      gain[c] += cfg_.pl_gain * static_cast<double>(audit.n_correct) -
                 cfg_.pl_noise_penalty * static_cast<double>(wrong);
    }
  }

  for (std::size_t c = 1; c <= num_classes_; ++c) {
    const auto& base = cfg_.classes[c - 1];
    const double cap = std::max(cfg_.accuracy_ceiling, base.accuracy);
    next.accuracy_[c] = std::clamp(base.accuracy + gain[c], 0.0, cap);
    next.robustness_[c] = std::clamp(
        base.flip_robustness + cfg_.robustness_coupling * (next.accuracy_[c] - base.accuracy),
        0.0, 1.0);
  }
  return next;
}

std::unique_ptr<Detector> SyntheticDetector::update(const Pool& pool) const {
  return std::make_unique<SyntheticDetector>(updated(pool));
}

}  // namespace flipal
