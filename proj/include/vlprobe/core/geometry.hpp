#pragma once

#include <algorithm>
#include <cstdint>

namespace vlprobe {

/// Normalized canvas coordinates: origin top-left, y downward, both in [0,1].
struct NormPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const NormPoint&, const NormPoint&) = default;
};

/// Half-open integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return std::max(0, x1 - x0); }
  int height() const { return std::max(0, y1 - y0); }
  std::int64_t area() const { return static_cast<std::int64_t>(width()) * height(); }
  bool empty() const { return width() == 0 || height() == 0; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool contains(const PixelBox& o) const {
    return o.x0 >= x0 && o.y0 >= y0 && o.x1 <= x1 && o.y1 <= y1;
  }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }

  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

inline PixelBox intersect(const PixelBox& a, const PixelBox& b) {
  PixelBox r{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
  if (r.x1 < r.x0) r.x1 = r.x0;
  if (r.y1 < r.y0) r.y1 = r.y0;
  return r;
}

inline double iou(const PixelBox& a, const PixelBox& b) {
  const auto inter = intersect(a, b).area();
  const auto uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline PixelBox translate(const PixelBox& b, int dx, int dy) {
  return {b.x0 + dx, b.y0 + dy, b.x1 + dx, b.y1 + dy};
}

/// Scales a box about its center; the result always contains the input.
PixelBox expand_about_center(const PixelBox& b, double factor);

}  // namespace vlprobe
