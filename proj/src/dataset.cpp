#include "flipal/dataset.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

#include "flipal/rng.hpp"

namespace flipal {

std::vector<ImageId> Dataset::ids() const {
  std::vector<ImageId> out;
  out.reserve(images.size());
  for (const auto& im : images) out.push_back(im.id);
  return out;
}

std::vector<GroundTruthObject> Dataset::all_objects() const {
  std::vector<GroundTruthObject> out;
  for (const auto& im : images) out.insert(out.end(), im.objects.begin(), im.objects.end());
  return out;
}

void Dataset::validate() const {
  if (classes.empty()) throw std::invalid_argument("dataset has no classes");
  std::set<ImageId> seen;
  for (const auto& im : images) {
    if (!seen.insert(im.id).second) {
      throw std::invalid_argument("duplicate image id '" + im.id + "'");
    }
    if (im.width <= 0 || im.height <= 0) {
      throw std::invalid_argument("image '" + im.id + "' has non-positive size");
    }
    for (const auto& o : im.objects) {
      if (o.class_id == 0 || o.class_id > classes.size()) {
        throw std::invalid_argument("image '" + im.id + "' has object with class id " +
                                    std::to_string(o.class_id) + " outside 1.." +
                                    std::to_string(classes.size()));
      }
      const auto& b = o.box_corner;
      if (!b.valid() || b.xmin < 0 || b.ymin < 0 || b.xmax > im.width || b.ymax > im.height) {
        throw std::invalid_argument("image '" + im.id + "' has a box outside the image");
      }
    }
  }
}

Dataset make_synthetic_dataset(const SyntheticDatasetConfig& cfg) {
  if (cfg.n_classes == 0) throw std::invalid_argument("n_classes must be positive");
  if (cfg.min_objects == 0 || cfg.min_objects > cfg.max_objects) {
    throw std::invalid_argument("need 1 <= min_objects <= max_objects");
  }
  if (!cfg.class_weights.empty() && cfg.class_weights.size() != cfg.n_classes) {
    throw std::invalid_argument("class_weights length must equal n_classes");
  }

  Dataset ds;
  for (std::size_t c = 1; c <= cfg.n_classes; ++c) ds.classes.push_back("class" + std::to_string(c));

  std::vector<double> weights = cfg.class_weights;
  if (weights.empty()) weights.assign(cfg.n_classes, 1.0);

  auto g = detail::stream(cfg.seed, 0x5eedda7aULL);
  std::discrete_distribution<std::size_t> pick_class(weights.begin(), weights.end());
  std::uniform_int_distribution<int> pick_size(cfg.min_size, cfg.max_size);
  std::uniform_int_distribution<std::size_t> pick_count(cfg.min_objects, cfg.max_objects);

  char buf[64];
  for (std::size_t n = 0; n < cfg.n_images; ++n) {
    std::snprintf(buf, sizeof(buf), "%s_%06zu", cfg.id_prefix.c_str(), n);
    ImageRecord im;
    im.id = buf;
    im.width = pick_size(g);
    im.height = pick_size(g);
    const std::size_t want = pick_count(g);
    for (int attempt = 0; attempt < 50 && im.objects.size() < want; ++attempt) {
      const double bw = im.width * (0.15 + 0.35 * detail::uniform01(g));
      const double bh = im.height * (0.15 + 0.35 * detail::uniform01(g));
      const double x0 = (im.width - bw) * detail::uniform01(g);
      const double y0 = (im.height - bh) * detail::uniform01(g);
      const BoxCorner box{x0, y0, x0 + bw, y0 + bh};
      bool clear = true;
      for (const auto& o : im.objects) clear = clear && iou(o.box_corner, box) <= cfg.max_object_iou;
      if (!clear) continue;
      im.objects.push_back({im.id, box, pick_class(g) + 1});
    }
    ds.images.push_back(std::move(im));
  }
  return ds;
}

}  // namespace flipal
