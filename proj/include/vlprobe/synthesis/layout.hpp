#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vlprobe/core/scene.hpp"
#include "vlprobe/semantics/labels.hpp"
#include "vlprobe/synthesis/probe.hpp"

namespace vlprobe {

/// Band-center targets for the size subsets, in canonical label order.
inline constexpr double kAbsoluteSizeTargets[3] = {0.1, 0.5, 0.85};
inline constexpr double kRelativeSizeTargets[3] = {0.4, 1.0, 2.5};

/// K layouts, one per label in canonical order, differing only in the probed
/// attribute. Placement 0 is object A, placement 1 object B for the relative
/// subsets. Throws InfeasibleError when the probe cannot be realized.
std::vector<CanvasLayout> plan_candidate_layouts(const AttributeProbe& probe, const SpriteLibrary& sprites);

struct PackingRequest {
  int count = 1;
  std::string sprite_id;
  double scale = 1.0;
  int extent_w = 0;  // scaled bbox size in pixels at `scale`
  int extent_h = 0;
  int canvas_w = 1024;
  int canvas_h = 1024;
  double min_sep = 0.0;  // minimum center distance, pixels
  int gap_px = 0;        // minimum empty margin between boxes
  std::uint64_t seed = 0;
};

/// Occlusion-free placement of `count` copies: pairwise box IoU is zero and
/// center distances are at least `min_sep`. On failure the extent is shrunk by
/// 10% up to three times; the returned placements carry the final scale.
/// Throws PreconditionError for count outside [1, 9] and InfeasibleError
/// (naming the final scale) when packing still fails.
std::vector<Placement> place_non_overlapping(const PackingRequest& request);

/// Recomputes the probed label from a layout's placements.
/// Throws ValidationError when the measurement falls in an unclassified band.
SubsetLabel measure_layout(const CanvasLayout& layout, SubsetKind subset, const SpriteLibrary& sprites);

/// Area fraction of one placement (scaled alpha pixels over canvas pixels).
double placement_area_fraction(const CanvasLayout& layout, std::size_t index, const SpriteLibrary& sprites);

}  // namespace vlprobe
