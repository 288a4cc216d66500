#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vlprobe/core/geometry.hpp"
#include "vlprobe/core/raster.hpp"

namespace vlprobe {

/// Background-free object cutout.
struct SpriteAsset {
  std::string id;
  std::string category;
  RasterImage raster;
  BinaryMask alpha;
  PixelBox bbox;  // tight box of `alpha`, in raster coordinates
  std::uint64_t source_seed = 0;

  friend bool operator==(const SpriteAsset&, const SpriteAsset&) = default;
};

/// Builds a sprite from a raster and mask: crops both to the mask's tight box
/// and clears every pixel outside the mask.
SpriteAsset make_sprite(std::string id, std::string category, const RasterImage& image,
                        const BinaryMask& mask, std::uint64_t source_seed);

/// Empty when the sprite satisfies its invariants, else one message per violation.
std::vector<std::string> validate_sprite(const SpriteAsset& s);

struct Placement {
  std::string sprite_id;
  NormPoint center;
  double scale = 1.0;  // relative to the sprite's native bbox size
  int z = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct CanvasLayout {
  int width = 1024;
  int height = 1024;
  std::vector<Placement> placements;
  std::string background_prompt;
  std::uint64_t layout_seed = 0;

  friend bool operator==(const CanvasLayout&, const CanvasLayout&) = default;
};

/// Sprites addressable by id.
class SpriteLibrary {
 public:
  void add(SpriteAsset sprite);
  const SpriteAsset& at(const std::string& id) const;
  bool contains(const std::string& id) const { return sprites_.count(id) != 0; }
  /// Ids of every sprite of `category`, in id order.
  std::vector<std::string> ids_for(const std::string& category) const;
  std::size_t size() const { return sprites_.size(); }

 private:
  std::map<std::string, SpriteAsset> sprites_;
};

/// Pixel-space rectangle a placement occupies on the canvas.
PixelBox placement_box(const Placement& p, const SpriteAsset& sprite, int canvas_w, int canvas_h);

/// Sprite alpha resampled to a placement's pixel size.
BinaryMask scaled_alpha(const SpriteAsset& sprite, const Placement& p);

/// Checks the layout invariants without modifying anything. `occlusion_free`
/// additionally requires pairwise bbox IoU of zero.
std::vector<std::string> validate_layout(const CanvasLayout& layout, const SpriteLibrary& sprites,
                                         bool occlusion_free);

}  // namespace vlprobe
