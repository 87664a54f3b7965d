#pragma once

#include <algorithm>
#include <cmath>

namespace tkg {

// Axis-aligned box in normalized image coordinates.
struct BoundingBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  constexpr bool valid() const noexcept {
    return 0.0 <= x1 && x1 < x2 && x2 <= 1.0 && 0.0 <= y1 && y1 < y2 && y2 <= 1.0;
  }
  constexpr double width() const noexcept { return x2 - x1; }
  constexpr double height() const noexcept { return y2 - y1; }
  constexpr double area() const noexcept { return width() * height(); }
  constexpr double cx() const noexcept { return 0.5 * (x1 + x2); }
  constexpr double cy() const noexcept { return 0.5 * (y1 + y2); }

  friend constexpr bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

inline double center_distance(const BoundingBox& a, const BoundingBox& b) noexcept {
  return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

}  // namespace tkg
