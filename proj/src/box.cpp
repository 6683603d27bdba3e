#include "flipal/box.hpp"

#include <algorithm>

namespace flipal {

double iou(const BoxCorner& a, const BoxCorner& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BoxEncoded encode_box(const BoxCorner& box, const BoxCorner& anchor) {
  const double aw = anchor.width();
  const double ah = anchor.height();
  if (!(aw > 0.0) || !(ah > 0.0) || !anchor.valid()) throw InvalidAnchor();
  if (!(box.width() > 0.0) || !(box.height() > 0.0) || !box.valid()) {
    throw std::invalid_argument("cannot encode a degenerate box");
  }
  return {(box.center_x() - anchor.center_x()) / aw,
          (box.center_y() - anchor.center_y()) / ah, box.width() / aw,
          box.height() / ah};
}

BoxCorner decode_box(const BoxEncoded& enc, const BoxCorner& anchor) {
  const double aw = anchor.width();
  const double ah = anchor.height();
  if (!(aw > 0.0) || !(ah > 0.0) || !anchor.valid()) throw InvalidAnchor();
  const double cx = anchor.center_x() + enc.dx * aw;
  const double cy = anchor.center_y() + enc.dy * ah;
  const double half_w = 0.5 * enc.w * aw;
  const double half_h = 0.5 * enc.h * ah;
  return {cx - half_w, cy - half_h, cx + half_w, cy + half_h};
}

}  // namespace flipal
