#pragma once

#include <vector>

#include "vlprobe/core/scene.hpp"

namespace vlprobe {

struct Composite {
  RasterImage image;                     // transparent where no object
  BinaryMask mask;                       // union of object alphas
  std::vector<BinaryMask> object_masks;  // one canvas-sized mask per placement, in placement order
};

/// Alpha-over of every placement in z order (ties keep placement order).
/// Throws PreconditionError on unresolved sprite references.
Composite composite(const CanvasLayout& layout, const SpriteLibrary& sprites);

}  // namespace vlprobe
