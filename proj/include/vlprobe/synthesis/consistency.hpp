#pragma once

#include <string>
#include <vector>

#include "vlprobe/core/scene.hpp"
#include "vlprobe/synthesis/inpaint_plan.hpp"
#include "vlprobe/synthesis/probe.hpp"

namespace vlprobe {

/// Tile-local region that must be bit-identical across candidates: the tile
/// minus every candidate's object pixels and minus the parts of the tile
/// that fall outside some candidate's canvas.
BinaryMask shared_tile_region(const std::vector<PixelBox>& tile_boxes,
                              const std::vector<std::vector<BinaryMask>>& object_masks, int canvas_w, int canvas_h);

/// Empty when every shared-tile pixel agrees across the candidate images.
std::vector<std::string> check_tile_consistency(const std::vector<RasterImage>& images,
                                                const std::vector<PixelBox>& tile_boxes,
                                                const std::vector<std::vector<BinaryMask>>& object_masks);

/// Empty when all parameters other than the probed attribute are identical.
std::vector<std::string> check_fixed_placements(SubsetKind subset, const std::vector<CanvasLayout>& layouts);

/// Empty when the layouts' measured labels enumerate the label set in canonical order.
std::vector<std::string> check_label_enumeration(SubsetKind subset, const std::vector<CanvasLayout>& layouts,
                                                 const SpriteLibrary& sprites);

}  // namespace vlprobe
