#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlprobe/backends/backend.hpp"
#include "vlprobe/core/scene.hpp"
#include "vlprobe/synthesis/composite.hpp"
#include "vlprobe/synthesis/probe.hpp"

namespace vlprobe {

/// Margin applied to the anchor object's box to size the shared background tile.
inline constexpr double kTileMargin = 1.5;

struct InpaintStep {
  std::optional<int> candidate;  // nullopt for the shared tile step
  int width = 0;                 // target canvas size
  int height = 0;
  BinaryMask mask;               // pixels the backend fills
  RasterImage conditioning;      // sprites on a transparent canvas
  std::string prompt;
  std::uint64_t seed = 0;
};

/// The background tile generated once and copied into every candidate.
struct SharedTile {
  int reference_candidate = 0;
  std::vector<PixelBox> boxes;  // tile position on each candidate canvas
  BinaryMask hole;              // tile-local anchor alpha; never copied
};

struct InpaintPlan {
  std::vector<InpaintStep> steps;  // steps[0] is the shared tile step
  SharedTile tile;
  std::vector<std::vector<BinaryMask>> object_masks;  // [candidate][placement]
};

struct CandidateImages {
  std::vector<RasterImage> images;
  std::vector<std::vector<BinaryMask>> object_masks;  // [candidate][placement]
  std::vector<PixelBox> tile_boxes;
};

/// Index of the placement the tile is built around, per candidate
/// (nullopt for a candidate without objects).
std::optional<std::size_t> anchor_placement(const AttributeProbe& probe, const CanvasLayout& layout);

/// Two-phase consistent-background plan: one shared tile around the anchor,
/// then one fill step per candidate that keeps tile and sprite pixels.
/// Throws InfeasibleError if a relocated tile would leave the canvas.
InpaintPlan build_inpaint_plan(const std::vector<CanvasLayout>& layouts, const std::vector<Composite>& composites,
                               const AttributeProbe& probe, const SpriteLibrary& sprites);

/// Runs the steps in order. A failing step surfaces as BackendError carrying
/// the 1-based step number; nothing partial is returned.
CandidateImages execute_inpaint_plan(const InpaintPlan& plan, Backend& backend);

/// Step list with seeds and mask boxes, for reproducibility audits.
nlohmann::json plan_trace(const InpaintPlan& plan);

}  // namespace vlprobe
