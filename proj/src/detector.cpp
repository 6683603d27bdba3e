#include "flipal/detector.hpp"

#include <stdexcept>

namespace flipal {

void PredictionTable::add(ImagePrediction pred, bool flipped) {
  const ImageId id = pred.image_id;
  if (!table_.emplace(std::make_pair(id, flipped), std::move(pred)).second) {
    throw std::invalid_argument("duplicate prediction record for image '" + id +
                                (flipped ? "' (flipped)" : "' (original)"));
  }
}

bool PredictionTable::contains(const ImageId& id, bool flipped) const {
  return table_.contains({id, flipped});
}

ImagePrediction PredictionTable::predict(const ImageId& id, bool flipped) const {
  const auto it = table_.find({id, flipped});
  if (it == table_.end()) {
    throw std::out_of_range("missing " + std::string(flipped ? "flipped" : "original") +
                            " prediction record for image '" + id + "'");
  }
  return it->second;
}

}  // namespace flipal
