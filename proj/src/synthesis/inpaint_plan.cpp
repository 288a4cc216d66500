#include "vlprobe/synthesis/inpaint_plan.hpp"

#include <cmath>

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/serialize.hpp"

namespace vlprobe {

namespace {

bool uses_smallest_anchor(SubsetKind s) {
  return s == SubsetKind::AbsoluteSize || s == SubsetKind::RelativeSize;
}

BinaryMask paste_region(const BinaryMask& local, const PixelBox& at, int w, int h) {
  BinaryMask m(w, h);
  for (int y = 0; y < local.height(); ++y) {
    for (int x = 0; x < local.width(); ++x) {
      if (local.test(x, y)) m.set(at.x0 + x, at.y0 + y);
    }
  }
  return m;
}

}  // namespace

std::optional<std::size_t> anchor_placement(const AttributeProbe&, const CanvasLayout& layout) {
  if (layout.placements.empty()) return std::nullopt;
  return 0;
}

InpaintPlan build_inpaint_plan(const std::vector<CanvasLayout>& layouts, const std::vector<Composite>& composites,
                               const AttributeProbe& probe, const SpriteLibrary& sprites) {
  if (layouts.empty() || layouts.size() != composites.size()) {
    throw PreconditionError("inpaint plan needs one composite per layout");
  }
  const int W = layouts.front().width;
  const int H = layouts.front().height;
  for (const auto& l : layouts) {
    if (l.width != W || l.height != H) throw PreconditionError("candidate canvases differ in size");
  }

  std::optional<std::size_t> ref;
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    if (!anchor_placement(probe, layouts[k])) continue;
    if (!ref) {
      ref = k;
      if (!uses_smallest_anchor(probe.subset)) break;
      continue;
    }
    if (composites[k].object_masks[0].count() < composites[*ref].object_masks[0].count()) ref = k;
  }
  if (!ref) throw PreconditionError("no candidate has an object to anchor the background tile");

  const PixelBox canvas{0, 0, W, H};
  const auto& ref_layout = layouts[*ref];
  const auto& ref_sprite = sprites.at(ref_layout.placements[0].sprite_id);
  const auto ref_anchor = placement_box(ref_layout.placements[0], ref_sprite, W, H);
  const auto ref_tile = intersect(expand_about_center(ref_anchor, kTileMargin), canvas);

  InpaintPlan plan;
  plan.tile.reference_candidate = static_cast<int>(*ref);
  plan.tile.hole = composites[*ref].object_masks[0].crop(ref_tile);
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    int dx = 0, dy = 0;
    if (anchor_placement(probe, layouts[k])) {
      const auto& p = layouts[k].placements[0];
      const auto box = placement_box(p, sprites.at(p.sprite_id), W, H);
      if (box.width() == ref_anchor.width() && box.height() == ref_anchor.height()) {
        dx = box.x0 - ref_anchor.x0;
        dy = box.y0 - ref_anchor.y0;
      } else {
        const auto& rp = ref_layout.placements[0];
        dx = static_cast<int>(std::lround((p.center.x - rp.center.x) * W));
        dy = static_cast<int>(std::lround((p.center.y - rp.center.y) * H));
      }
    }
    const auto box = translate(ref_tile, dx, dy);
    if (!canvas.contains(box)) {
      throw InfeasibleError("background tile leaves the canvas in candidate " + std::to_string(k));
    }
    plan.tile.boxes.push_back(box);
  }

  // Shared tile step: only the anchor conditions the tile.
  InpaintStep tile_step;
  tile_step.width = ref_tile.width();
  tile_step.height = ref_tile.height();
  tile_step.conditioning = RasterImage(ref_tile.width(), ref_tile.height());
  const auto ref_crop = composites[*ref].image.crop(ref_tile);
  copy_masked(tile_step.conditioning, ref_crop, plan.tile.hole, 0, 0);
  tile_step.mask = plan.tile.hole.inverted();
  tile_step.prompt = probe.background_prompt;
  tile_step.seed = probe.seed("tile");
  plan.steps.push_back(std::move(tile_step));

  const auto keep_local = plan.tile.hole.inverted();
  const auto background_seed = probe.seed("background");
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    InpaintStep step;
    step.candidate = static_cast<int>(k);
    step.width = W;
    step.height = H;
    step.conditioning = composites[k].image;
    auto keep = paste_region(keep_local, plan.tile.boxes[k], W, H);
    keep |= composites[k].mask;
    step.mask = keep.inverted();
    step.prompt = probe.background_prompt;
    step.seed = background_seed;
    plan.steps.push_back(std::move(step));
    plan.object_masks.push_back(composites[k].object_masks);
  }
  return plan;
}

CandidateImages execute_inpaint_plan(const InpaintPlan& plan, Backend& backend) {
  if (plan.steps.empty()) throw PreconditionError("empty inpaint plan");
  const auto keep_local = plan.tile.hole.inverted();

  const auto run = [&](std::size_t i, const RasterImage& input) {
    const auto& step = plan.steps[i];
    const int number = static_cast<int>(i) + 1;
    RasterImage out;
    try {
      out = inpaint(backend, input, step.mask, step.prompt, step.seed);
    } catch (const BackendError& e) {
      throw BackendError(std::string("inpaint failed: ") + e.what(), number, e.code());
    }
    for (int y = 0; y < input.height(); ++y) {
      for (int x = 0; x < input.width(); ++x) {
        if (!step.mask.test(x, y) && out.at(x, y) != input.at(x, y)) {
          throw BackendError("inpaint changed pixels outside the mask", number, "mask_violation");
        }
      }
    }
    return out;
  };

  const auto tile = run(0, plan.steps[0].conditioning);
  CandidateImages result;
  for (std::size_t i = 1; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const auto k = static_cast<std::size_t>(*step.candidate);
    const auto& box = plan.tile.boxes.at(k);
    RasterImage input(step.width, step.height);
    copy_masked(input, tile, keep_local, box.x0, box.y0);
    alpha_over(input, step.conditioning, 0, 0);
    result.images.push_back(run(i, input));
    result.object_masks.push_back(plan.object_masks.at(k));
    result.tile_boxes.push_back(box);
  }
  return result;
}

nlohmann::json plan_trace(const InpaintPlan& plan) {
  auto steps = nlohmann::json::array();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    nlohmann::json j;
    j["step"] = i + 1;
    j["candidate"] = s.candidate ? nlohmann::json(*s.candidate) : nlohmann::json(nullptr);
    j["size"] = {s.width, s.height};
    j["prompt"] = s.prompt;
    j["seed"] = s.seed;
    j["mask_pixels"] = s.mask.count();
    if (const auto b = s.mask.bounds()) j["mask_box"] = *b;
    steps.push_back(std::move(j));
  }
  return {{"reference_candidate", plan.tile.reference_candidate},
          {"tile_boxes", plan.tile.boxes},
          {"hole_pixels", plan.tile.hole.count()},
          {"steps", std::move(steps)}};
}

}  // namespace vlprobe
