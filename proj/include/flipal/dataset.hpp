#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "flipal/pseudo_label.hpp"

namespace flipal {

struct ImageRecord {
  ImageId id;
  int width = 0;
  int height = 0;
  std::vector<GroundTruthObject> objects;
};

/// Annotated images. `classes` holds the K foreground class names; class ids
/// in annotations are 1-based.
struct Dataset {
  std::vector<std::string> classes;
  std::vector<ImageRecord> images;

  std::size_t num_classes() const { return classes.size(); }
  std::vector<ImageId> ids() const;
  std::vector<GroundTruthObject> all_objects() const;
  /// Throws on duplicate ids, bad class ids or boxes outside the image.
  void validate() const;
};

struct SyntheticDatasetConfig {
  std::size_t n_images = 1000;
  std::size_t n_classes = 5;
  /// Relative class frequencies; empty means uniform.
  std::vector<double> class_weights;
  std::size_t min_objects = 1;
  std::size_t max_objects = 3;
  int min_size = 300;
  int max_size = 500;
  /// Objects within one image overlap each other by at most this IoU.
  double max_object_iou = 0.2;
  std::string id_prefix = "img";
  std::uint64_t seed = 0;
};

/// Seeded annotation-only dataset. Ids are zero-padded so lexicographic and
/// numeric order agree.
Dataset make_synthetic_dataset(const SyntheticDatasetConfig& cfg);

}  // namespace flipal
