#include "flipal/detection.hpp"

#include <algorithm>
#include <cmath>

namespace flipal {

Detection Detection::from_corner(const BoxCorner& box, ClassDist dist, double image_width,
                                 double image_height) {
  return {box, encode_box(box, image_anchor(image_width, image_height)), std::move(dist)};
}

Detection hflip(const Detection& det, double image_width) {
  Detection out = det;
  out.box_corner = mirror_x(det.box_corner, image_width);
  out.box_encoded.dx = -det.box_encoded.dx;
  return out;
}

ImagePrediction hflip(const ImagePrediction& pred) {
  ImagePrediction out;
  out.image_id = pred.image_id;
  out.width = pred.width;
  out.height = pred.height;
  out.detections.reserve(pred.detections.size());
  for (const auto& d : pred.detections) {
    out.detections.push_back(hflip(d, static_cast<double>(pred.width)));
  }
  return out;
}

double box_form_discrepancy(const ImagePrediction& pred) {
  const auto anchor = image_anchor(pred.width, pred.height);
  double worst = 0.0;
  for (const auto& d : pred.detections) {
    const auto back = decode_box(d.box_encoded, anchor);
    worst = std::max({worst, std::abs(back.xmin - d.box_corner.xmin),
                      std::abs(back.ymin - d.box_corner.ymin),
                      std::abs(back.xmax - d.box_corner.xmax),
                      std::abs(back.ymax - d.box_corner.ymax)});
  }
  return worst;
}

}  // namespace flipal
