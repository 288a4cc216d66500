#include "vlprobe/synthesis/composite.hpp"

#include <algorithm>
#include <numeric>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

Composite composite(const CanvasLayout& layout, const SpriteLibrary& sprites) {
  if (layout.width <= 0 || layout.height <= 0) throw PreconditionError("canvas dimensions must be positive");
  Composite out{RasterImage(layout.width, layout.height), BinaryMask(layout.width, layout.height), {}};
  std::vector<std::size_t> order(layout.placements.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return layout.placements[a].z < layout.placements[b].z;
  });
  out.object_masks.assign(layout.placements.size(), BinaryMask(layout.width, layout.height));
  for (const auto i : order) {
    const auto& p = layout.placements[i];
    const auto& s = sprites.at(p.sprite_id);
    const auto box = placement_box(p, s, layout.width, layout.height);
    const auto raster = resize_nearest(s.raster.crop(s.bbox), box.width(), box.height());
    const auto alpha = scaled_alpha(s, p);
    alpha_over(out.image, raster, box.x0, box.y0);
    auto& m = out.object_masks[i];
    for (int y = 0; y < alpha.height(); ++y) {
      const int cy = box.y0 + y;
      if (cy < 0 || cy >= layout.height) continue;
      for (int x = 0; x < alpha.width(); ++x) {
        const int cx = box.x0 + x;
        if (cx < 0 || cx >= layout.width || !alpha.test(x, y)) continue;
        m.set(cx, cy);
      }
    }
    out.mask |= m;
  }
  return out;
}

}  // namespace vlprobe
