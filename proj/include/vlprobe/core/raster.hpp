#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlprobe/core/geometry.hpp"

namespace vlprobe {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 0;
  friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// 8-bit RGBA image, row-major, 4 bytes per pixel.
class RasterImage {
 public:
  /// Empty 0x0 image, only useful as a placeholder.
  RasterImage() : width_(0), height_(0) {}
  /// Fully transparent image.
  RasterImage(int width, int height);
  RasterImage(int width, int height, std::vector<std::uint8_t> rgba);

  int width() const { return width_; }
  int height() const { return height_; }
  PixelBox bounds() const { return {0, 0, width_, height_}; }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  Rgba at(int x, int y) const {
    const auto* p = &data_[index(x, y)];
    return {p[0], p[1], p[2], p[3]};
  }
  void set(int x, int y, Rgba c) {
    auto* p = &data_[index(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
    p[3] = c.a;
  }

  RasterImage crop(const PixelBox& box) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 4;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Boolean pixel grid, one byte per pixel (0 or 1).
class BinaryMask {
 public:
  BinaryMask() : width_(0), height_(0) {}
  BinaryMask(int width, int height);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }

  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
  void fill(const PixelBox& box, bool v = true);

  std::int64_t count() const;
  /// Tight bounding box of set pixels; nullopt when empty.
  std::optional<PixelBox> bounds() const;

  std::span<const std::uint8_t> bits() const { return bits_; }

  bool same_shape(const BinaryMask& o) const { return width_ == o.width_ && height_ == o.height_; }

  BinaryMask& operator|=(const BinaryMask& o);
  /// Clears every pixel set in `o`.
  BinaryMask& subtract(const BinaryMask& o);
  BinaryMask inverted() const;
  BinaryMask crop(const PixelBox& box) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

/// Mask of pixels with nonzero alpha.
BinaryMask alpha_mask(const RasterImage& img);

/// Straight-alpha "over" of `src` onto `dst` with `src` top-left at (x, y). Clips to `dst`.
void alpha_over(RasterImage& dst, const RasterImage& src, int x, int y);

/// Copies pixels of `src` where `region` is set (region in `src` coordinates) to `dst` at (x, y).
void copy_masked(RasterImage& dst, const RasterImage& src, const BinaryMask& region, int x, int y);

/// Nearest-neighbour resample to an exact target size.
RasterImage resize_nearest(const RasterImage& src, int width, int height);

}  // namespace vlprobe
