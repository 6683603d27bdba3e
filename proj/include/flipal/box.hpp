#pragma once

#include <cmath>
#include <stdexcept>

namespace flipal {

/// Axis-aligned box in absolute corner coordinates. Boxes are half-open real
/// rectangles, so area is (xmax - xmin) * (ymax - ymin) with no +1 pixel term.
struct BoxCorner {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (xmin + xmax); }
  double center_y() const { return 0.5 * (ymin + ymax); }

  bool valid() const {
    return std::isfinite(xmin) && std::isfinite(ymin) && std::isfinite(xmax) &&
           std::isfinite(ymax) && xmin <= xmax && ymin <= ymax;
  }

  friend bool operator==(const BoxCorner&, const BoxCorner&) = default;
};

/// Offset encoding of a box relative to an anchor: center displacement in
/// anchor-size units (dx, dy) and scale ratios (w, h). The neutral element
/// (box equals anchor) is (0, 0, 1, 1).
struct BoxEncoded {
  double dx = 0.0;
  double dy = 0.0;
  double w = 1.0;
  double h = 1.0;

  bool valid() const {
    return std::isfinite(dx) && std::isfinite(dy) && std::isfinite(w) &&
           std::isfinite(h) && w > 0.0 && h > 0.0;
  }

  friend bool operator==(const BoxEncoded&, const BoxEncoded&) = default;
};

/// Thrown for anchors with non-positive width or height.
class InvalidAnchor : public std::invalid_argument {
 public:
  InvalidAnchor() : std::invalid_argument("invalid anchor") {}
};

/// Intersection over union; 0 when the union is empty.
double iou(const BoxCorner& a, const BoxCorner& b);

BoxEncoded encode_box(const BoxCorner& box, const BoxCorner& anchor);
BoxCorner decode_box(const BoxEncoded& enc, const BoxCorner& anchor);

/// Mirror about the vertical axis of an image of the given width.
inline BoxCorner mirror_x(const BoxCorner& b, double image_width) {
  return {image_width - b.xmax, b.ymin, image_width - b.xmin, b.ymax};
}

inline BoxCorner clamp_to(const BoxCorner& b, double width, double height) {
  auto clamp = [](double v, double hi) { return v < 0.0 ? 0.0 : (v > hi ? hi : v); };
  return {clamp(b.xmin, width), clamp(b.ymin, height), clamp(b.xmax, width),
          clamp(b.ymax, height)};
}

/// Anchor covering the whole image. Detections carry their encoded form
/// relative to this anchor, which is symmetric under horizontal flip.
inline BoxCorner image_anchor(double width, double height) {
  return {0.0, 0.0, width, height};
}

}  // namespace flipal
