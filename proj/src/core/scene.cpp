#include "vlprobe/core/scene.hpp"

#include <algorithm>
#include <cmath>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

SpriteAsset make_sprite(std::string id, std::string category, const RasterImage& image,
                        const BinaryMask& mask, std::uint64_t source_seed) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw PreconditionError("sprite mask does not match image dimensions");
  }
  const auto box = mask.bounds();
  if (!box) throw PreconditionError("sprite mask is empty");
  RasterImage raster = image.crop(*box);
  BinaryMask alpha = mask.crop(*box);
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      if (!alpha.test(x, y)) {
        raster.set(x, y, Rgba{});
      } else {
        auto c = raster.at(x, y);
        c.a = 255;
        raster.set(x, y, c);
      }
    }
  }
  const PixelBox bbox{0, 0, raster.width(), raster.height()};
  return SpriteAsset{std::move(id), std::move(category), std::move(raster), std::move(alpha), bbox, source_seed};
}

std::vector<std::string> validate_sprite(const SpriteAsset& s) {
  std::vector<std::string> issues;
  if (s.alpha.width() != s.raster.width() || s.alpha.height() != s.raster.height()) {
    issues.push_back(s.id + ": alpha dimensions differ from raster");
    return issues;
  }
  const auto tight = s.alpha.bounds();
  if (!tight) {
    issues.push_back(s.id + ": alpha is empty");
    return issues;
  }
  if (*tight != s.bbox) issues.push_back(s.id + ": bbox is not the tight box of alpha");
  for (int y = 0; y < s.raster.height(); ++y) {
    for (int x = 0; x < s.raster.width(); ++x) {
      if (!s.alpha.test(x, y) && s.raster.at(x, y).a != 0) {
        issues.push_back(s.id + ": opaque pixel outside alpha");
        return issues;
      }
    }
  }
  return issues;
}

void SpriteLibrary::add(SpriteAsset sprite) {
  auto id = sprite.id;
  sprites_.insert_or_assign(std::move(id), std::move(sprite));
}

const SpriteAsset& SpriteLibrary::at(const std::string& id) const {
  const auto it = sprites_.find(id);
  if (it == sprites_.end()) throw PreconditionError("unresolved sprite reference '" + id + "'");
  return it->second;
}

std::vector<std::string> SpriteLibrary::ids_for(const std::string& category) const {
  std::vector<std::string> ids;
  for (const auto& [id, s] : sprites_) {
    if (s.category == category) ids.push_back(id);
  }
  return ids;
}

namespace {

int scaled_extent(int native, double scale) {
  return std::max(1, static_cast<int>(std::lround(native * scale)));
}

}  // namespace

PixelBox placement_box(const Placement& p, const SpriteAsset& sprite, int canvas_w, int canvas_h) {
  const int w = scaled_extent(sprite.bbox.width(), p.scale);
  const int h = scaled_extent(sprite.bbox.height(), p.scale);
  const int x0 = static_cast<int>(std::floor(p.center.x * canvas_w - 0.5 * w + 0.5));
  const int y0 = static_cast<int>(std::floor(p.center.y * canvas_h - 0.5 * h + 0.5));
  return {x0, y0, x0 + w, y0 + h};
}

BinaryMask scaled_alpha(const SpriteAsset& sprite, const Placement& p) {
  const int w = scaled_extent(sprite.bbox.width(), p.scale);
  const int h = scaled_extent(sprite.bbox.height(), p.scale);
  const auto src = sprite.alpha.crop(sprite.bbox);
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(src.height() - 1, static_cast<int>((static_cast<std::int64_t>(y) * 2 + 1) * src.height() / (2 * static_cast<std::int64_t>(h))));
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(src.width() - 1, static_cast<int>((static_cast<std::int64_t>(x) * 2 + 1) * src.width() / (2 * static_cast<std::int64_t>(w))));
      if (src.test(sx, sy)) out.set(x, y);
    }
  }
  return out;
}

std::vector<std::string> validate_layout(const CanvasLayout& layout, const SpriteLibrary& sprites,
                                         bool occlusion_free) {
  std::vector<std::string> issues;
  if (layout.width <= 0 || layout.height <= 0) {
    issues.push_back("canvas dimensions must be positive");
    return issues;
  }
  const PixelBox canvas{0, 0, layout.width, layout.height};
  std::vector<PixelBox> boxes;
  for (std::size_t i = 0; i < layout.placements.size(); ++i) {
    const auto& p = layout.placements[i];
    const auto tag = "placement " + std::to_string(i);
    if (!sprites.contains(p.sprite_id)) {
      issues.push_back(tag + ": unresolved sprite '" + p.sprite_id + "'");
      continue;
    }
    if (!(p.scale > 0.0)) issues.push_back(tag + ": scale must be positive");
    if (p.center.x < 0.0 || p.center.x > 1.0 || p.center.y < 0.0 || p.center.y > 1.0) {
      issues.push_back(tag + ": center outside [0,1]^2");
    }
    const auto box = placement_box(p, sprites.at(p.sprite_id), layout.width, layout.height);
    if (!canvas.contains(box)) issues.push_back(tag + ": scaled bbox is clipped by the canvas");
    boxes.push_back(box);
  }
  if (occlusion_free) {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        if (iou(boxes[i], boxes[j]) > 0.0) {
          issues.push_back("placements " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
      }
    }
  }
  return issues;
}

}  // namespace vlprobe
