#include "vlprobe/core/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

namespace {

void check_dims(int w, int h) {
  if (w <= 0 || h <= 0) {
    throw PreconditionError("image dimensions must be positive, got " + std::to_string(w) + "x" +
                            std::to_string(h));
  }
}

}  // namespace

PixelBox expand_about_center(const PixelBox& b, double factor) {
  const double cx = b.center_x();
  const double cy = b.center_y();
  const double hw = 0.5 * b.width() * factor;
  const double hh = 0.5 * b.height() * factor;
  PixelBox r{static_cast<int>(std::floor(cx - hw)), static_cast<int>(std::floor(cy - hh)),
             static_cast<int>(std::ceil(cx + hw)), static_cast<int>(std::ceil(cy + hh))};
  r.x0 = std::min(r.x0, b.x0);
  r.y0 = std::min(r.y0, b.y0);
  r.x1 = std::max(r.x1, b.x1);
  r.y1 = std::max(r.y1, b.y1);
  return r;
}

RasterImage::RasterImage(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 4, 0);
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgba)
    : width_(width), height_(height), data_(std::move(rgba)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 4) {
    throw PreconditionError("RGBA buffer length does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
}

RasterImage RasterImage::crop(const PixelBox& box) const {
  if (box.empty() || !bounds().contains(box)) {
    throw PreconditionError("crop box outside image");
  }
  RasterImage out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    const auto* src = &data_[index(box.x0, box.y0 + y)];
    std::copy(src, src + static_cast<std::size_t>(box.width()) * 4,
              out.data_.begin() + static_cast<std::ptrdiff_t>(out.index(0, y)));
  }
  return out;
}

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height);
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw PreconditionError("mask buffer length does not match dimensions");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

void BinaryMask::fill(const PixelBox& box, bool v) {
  const auto b = intersect(box, PixelBox{0, 0, width_, height_});
  for (int y = b.y0; y < b.y1; ++y) {
    std::fill_n(bits_.begin() + static_cast<std::ptrdiff_t>(index(b.x0, y)), b.width(), v ? 1 : 0);
  }
}

std::int64_t BinaryMask::count() const {
  return std::accumulate(bits_.begin(), bits_.end(), std::int64_t{0});
}

std::optional<PixelBox> BinaryMask::bounds() const {
  PixelBox b{width_, height_, 0, 0};
  bool any = false;
  for (int y = 0; y < height_; ++y) {
    const auto* row = &bits_[index(0, y)];
    for (int x = 0; x < width_; ++x) {
      if (row[x]) {
        any = true;
        b.x0 = std::min(b.x0, x);
        b.x1 = std::max(b.x1, x + 1);
        b.y0 = std::min(b.y0, y);
        b.y1 = std::max(b.y1, y + 1);
      }
    }
  }
  if (!any) return std::nullopt;
  return b;
}

BinaryMask& BinaryMask::operator|=(const BinaryMask& o) {
  if (!same_shape(o)) throw PreconditionError("mask dimensions differ");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
  return *this;
}

BinaryMask& BinaryMask::subtract(const BinaryMask& o) {
  if (!same_shape(o)) throw PreconditionError("mask dimensions differ");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= static_cast<std::uint8_t>(o.bits_[i] ^ 1);
  return *this;
}

BinaryMask BinaryMask::inverted() const {
  BinaryMask out = *this;
  for (auto& b : out.bits_) b ^= 1;
  return out;
}

BinaryMask BinaryMask::crop(const PixelBox& box) const {
  if (box.empty() || !PixelBox{0, 0, width_, height_}.contains(box)) {
    throw PreconditionError("crop box outside mask");
  }
  BinaryMask out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) out.bits_[out.index(x, y)] = bits_[index(box.x0 + x, box.y0 + y)];
  }
  return out;
}

BinaryMask alpha_mask(const RasterImage& img) {
  BinaryMask m(img.width(), img.height());
  const auto px = img.bytes();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width()) + static_cast<std::size_t>(x)) * 4;
      if (px[i + 3] != 0) m.set(x, y);
    }
  }
  return m;
}

void alpha_over(RasterImage& dst, const RasterImage& src, int x, int y) {
  const auto clip = intersect(dst.bounds(), PixelBox{x, y, x + src.width(), y + src.height()});
  for (int dy = clip.y0; dy < clip.y1; ++dy) {
    for (int dx = clip.x0; dx < clip.x1; ++dx) {
      const Rgba s = src.at(dx - x, dy - y);
      if (s.a == 0) continue;
      if (s.a == 255) {
        dst.set(dx, dy, s);
        continue;
      }
      const Rgba d = dst.at(dx, dy);
      const int sa = s.a;
      const int da = d.a * (255 - sa) / 255;
      const int oa = sa + da;
      auto blend = [&](int sc, int dc) { return static_cast<std::uint8_t>((sc * sa + dc * da + oa / 2) / oa); };
      dst.set(dx, dy, {blend(s.r, d.r), blend(s.g, d.g), blend(s.b, d.b), static_cast<std::uint8_t>(oa)});
    }
  }
}

void copy_masked(RasterImage& dst, const RasterImage& src, const BinaryMask& region, int x, int y) {
  if (region.width() != src.width() || region.height() != src.height()) {
    throw PreconditionError("copy region does not match source dimensions");
  }
  const auto clip = intersect(dst.bounds(), PixelBox{x, y, x + src.width(), y + src.height()});
  for (int dy = clip.y0; dy < clip.y1; ++dy) {
    for (int dx = clip.x0; dx < clip.x1; ++dx) {
      if (region.test(dx - x, dy - y)) dst.set(dx, dy, src.at(dx - x, dy - y));
    }
  }
}

RasterImage resize_nearest(const RasterImage& src, int width, int height) {
  RasterImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(src.height() - 1, static_cast<int>((static_cast<std::int64_t>(y) * 2 + 1) * src.height() / (2 * static_cast<std::int64_t>(height))));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(src.width() - 1, static_cast<int>((static_cast<std::int64_t>(x) * 2 + 1) * src.width() / (2 * static_cast<std::int64_t>(width))));
      out.set(x, y, src.at(sx, sy));
    }
  }
  return out;
}

}  // namespace vlprobe
