#include "vlprobe/synthesis/layout.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vlprobe/core/error.hpp"
#include "vlprobe/semantics/classify.hpp"
#include "vlprobe/synthesis/inpaint_plan.hpp"

namespace vlprobe {

namespace {

std::int64_t alpha_pixels(const SpriteAsset& s, double scale) {
  return scaled_alpha(s, Placement{s.id, {0.5, 0.5}, scale, 0}).count();
}

// Scale whose scaled alpha pixel count is closest to `target`. Pixel count
// grows roughly with scale^2, so a few multiplicative corrections converge.
double scale_for_pixels(const SpriteAsset& s, double target) {
  double scale = std::sqrt(target / static_cast<double>(s.alpha.count()));
  double best = scale;
  double best_err = std::abs(static_cast<double>(alpha_pixels(s, scale)) - target);
  for (int i = 0; i < 6 && best_err > 0.0; ++i) {
    const auto got = static_cast<double>(alpha_pixels(s, scale));
    if (got <= 0.0) {
      scale *= 2.0;
      continue;
    }
    scale *= std::sqrt(target / got);
    const double err = std::abs(static_cast<double>(alpha_pixels(s, scale)) - target);
    if (err < best_err) {
      best_err = err;
      best = scale;
    }
  }
  return best;
}

PixelBox box_at(const SpriteAsset& s, double scale, NormPoint center, int w, int h) {
  return placement_box(Placement{s.id, center, scale, 0}, s, w, h);
}

// Scale that makes the larger side of the scaled bbox `fraction` of the shorter canvas side.
double scale_for_extent(const SpriteAsset& s, double fraction, int w, int h) {
  return fraction * std::min(w, h) / std::max(s.bbox.width(), s.bbox.height());
}

CanvasLayout base_layout(const AttributeProbe& probe, std::uint64_t k) {
  CanvasLayout l;
  l.width = probe.canvas_width;
  l.height = probe.canvas_height;
  l.background_prompt = probe.background_prompt;
  l.layout_seed = probe.seed("layout", k);
  return l;
}

std::vector<CanvasLayout> plan_absolute_size(const AttributeProbe& probe, const SpriteLibrary& sprites) {
  const auto& s = sprites.at(probe.sprite_ids.at(0));
  const int W = probe.canvas_width, H = probe.canvas_height;
  const double canvas = static_cast<double>(W) * H;
  double scales[3];
  for (int k = 0; k < 3; ++k) scales[k] = scale_for_pixels(s, kAbsoluteSizeTargets[k] * canvas);
  const auto large = box_at(s, scales[2], {0.5, 0.5}, W, H);
  if (large.width() > W || large.height() > H) {
    throw InfeasibleError("sprite " + s.id + " cannot reach the Large band without clipping");
  }
  SeededRng rng(probe.seed("center"));
  const double slack_x = 0.5 * (W - large.width()) - 1.0;
  const double slack_y = 0.5 * (H - large.height()) - 1.0;
  const NormPoint center{0.5 + rng.uniform(-0.8, 0.8) * std::max(0.0, slack_x) / W,
                         0.5 + rng.uniform(-0.8, 0.8) * std::max(0.0, slack_y) / H};
  std::vector<CanvasLayout> out;
  for (int k = 0; k < 3; ++k) {
    auto l = base_layout(probe, static_cast<std::uint64_t>(k));
    l.placements.push_back({s.id, center, scales[k], 0});
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<CanvasLayout> plan_relative_size(const AttributeProbe& probe, const SpriteLibrary& sprites) {
  const auto& a = sprites.at(probe.sprite_ids.at(0));
  const auto& b = sprites.at(probe.sprite_ids.at(1));
  const int W = probe.canvas_width, H = probe.canvas_height;
  SeededRng rng(probe.seed("center"));

  const double b_scale = scale_for_pixels(b, rng.uniform(0.03, 0.04) * W * H);
  const auto b_area = static_cast<double>(alpha_pixels(b, b_scale));
  double a_scales[3];
  for (int k = 0; k < 3; ++k) a_scales[k] = scale_for_pixels(a, kRelativeSizeTargets[k] * b_area);

  const auto a_max = box_at(a, a_scales[2], {0.5, 0.5}, W, H);
  const auto b_box = box_at(b, b_scale, {0.5, 0.5}, W, H);
  const double gap = 0.04 * W;
  const double free = W - (a_max.width() + b_box.width() + gap) - 4.0;
  const double tallest = std::max(a_max.height(), b_box.height());
  if (free < 0.0 || tallest + 4.0 > H) throw InfeasibleError("objects A and B do not fit side by side");

  const double offset = 2.0 + rng.uniform() * free;
  double xa = offset + 0.5 * a_max.width();
  double xb = offset + a_max.width() + gap + 0.5 * b_box.width();
  if (rng.below(2) == 1) {
    xa = W - xa;
    xb = W - xb;
  }
  const double y = 0.5 * tallest + 2.0 + rng.uniform() * (H - tallest - 4.0);
  const NormPoint ca{xa / W, y / H};
  const NormPoint cb{xb / W, y / H};

  std::vector<CanvasLayout> out;
  for (int k = 0; k < 3; ++k) {
    auto l = base_layout(probe, static_cast<std::uint64_t>(k));
    l.placements.push_back({a.id, ca, a_scales[k], 0});
    l.placements.push_back({b.id, cb, b_scale, 1});
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<CanvasLayout> plan_absolute_position(const AttributeProbe& probe, const SpriteLibrary& sprites) {
  const auto& s = sprites.at(probe.sprite_ids.at(0));
  const int W = probe.canvas_width, H = probe.canvas_height;
  SeededRng rng(probe.seed("center"));
  // Largest extent whose tile (margin 1.5) still fits a cell, with half a
  // pixel for rounding. Only binds on small canvases.
  const double e_fit = (std::min(W, H) / 6.0 - 2.5) / (0.5 * kTileMargin * std::min(W, H));
  const double scale = scale_for_extent(s, rng.uniform(0.13, std::max(0.13, std::min(0.2, e_fit))), W, H);
  const auto box = box_at(s, scale, {0.5, 0.5}, W, H);
  // The tile must stay inside the canvas in every cell.
  const double jx_max = W / 6.0 - 0.5 * kTileMargin * box.width() - 2.0;
  const double jy_max = H / 6.0 - 0.5 * kTileMargin * box.height() - 2.0;
  if (jx_max < 0.0 || jy_max < 0.0) throw InfeasibleError("object too large for a grid cell");
  const double jx = rng.uniform(-0.9, 0.9) * jx_max;
  const double jy = rng.uniform(-0.9, 0.9) * jy_max;
  std::vector<CanvasLayout> out;
  for (int k = 0; k < 9; ++k) {
    const auto cell = static_cast<GridCell>(k);
    auto l = base_layout(probe, static_cast<std::uint64_t>(k));
    const NormPoint c{((grid_col(cell) + 0.5) * W / 3.0 + jx) / W, ((grid_row(cell) + 0.5) * H / 3.0 + jy) / H};
    l.placements.push_back({s.id, c, scale, 0});
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<CanvasLayout> plan_relative_position(const AttributeProbe& probe, const SpriteLibrary& sprites) {
  const auto& a = sprites.at(probe.sprite_ids.at(0));
  const auto& b = sprites.at(probe.sprite_ids.at(1));
  const int W = probe.canvas_width, H = probe.canvas_height;
  SeededRng rng(probe.seed("center"));
  const double a_scale = scale_for_extent(a, rng.uniform(0.12, 0.18), W, H);
  const double b_scale = scale_for_extent(b, rng.uniform(0.12, 0.18), W, H);
  const auto a_box = box_at(a, a_scale, {0.5, 0.5}, W, H);
  const auto b_box = box_at(b, b_scale, {0.5, 0.5}, W, H);
  // B sits outside A's background tile in every direction.
  const double half_tile = 0.5 * kTileMargin;
  const double dist = std::max(half_tile * a_box.width() + 0.5 * b_box.width(),
                               half_tile * a_box.height() + 0.5 * b_box.height()) +
                      0.03 * std::min(W, H);
  const double jx_max = 0.5 * W - dist - 0.5 * b_box.width() - 2.0;
  const double jy_max = 0.5 * H - dist - 0.5 * b_box.height() - 2.0;
  if (jx_max < 0.0 || jy_max < 0.0) throw InfeasibleError("objects A and B too large for four-way offsets");
  const double xa = 0.5 * W + rng.uniform(-0.9, 0.9) * jx_max;
  const double ya = 0.5 * H + rng.uniform(-0.9, 0.9) * jy_max;

  // Offsets of B from A, canonical order LeftOf, RightOf, Above, Below (A relative to B).
  const double offsets[4][2] = {{dist, 0.0}, {-dist, 0.0}, {0.0, dist}, {0.0, -dist}};
  std::vector<CanvasLayout> out;
  for (int k = 0; k < 4; ++k) {
    auto l = base_layout(probe, static_cast<std::uint64_t>(k));
    l.placements.push_back({a.id, {xa / W, ya / H}, a_scale, 0});
    l.placements.push_back({b.id, {(xa + offsets[k][0]) / W, (ya + offsets[k][1]) / H}, b_scale, 1});
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<CanvasLayout> plan_existence(const AttributeProbe& probe, const SpriteLibrary& sprites) {
  const auto& s = sprites.at(probe.sprite_ids.at(0));
  const int W = probe.canvas_width, H = probe.canvas_height;
  SeededRng rng(probe.seed("center"));
  const double scale = scale_for_extent(s, rng.uniform(0.2, 0.35), W, H);
  const auto box = box_at(s, scale, {0.5, 0.5}, W, H);
  const double x = 0.5 * box.width() + 2.0 + rng.uniform() * (W - box.width() - 4.0);
  const double y = 0.5 * box.height() + 2.0 + rng.uniform() * (H - box.height() - 4.0);
  std::vector<CanvasLayout> out;
  out.push_back(base_layout(probe, 0));
  auto present = base_layout(probe, 1);
  present.placements.push_back({s.id, {x / W, y / H}, scale, 0});
  out.push_back(std::move(present));
  return out;
}

std::vector<CanvasLayout> plan_count(const AttributeProbe& probe, const SpriteLibrary& sprites) {
  const auto& s = sprites.at(probe.sprite_ids.at(0));
  const int W = probe.canvas_width, H = probe.canvas_height;
  SeededRng rng(probe.seed("center"));
  const double scale = scale_for_extent(s, rng.uniform(0.12, 0.16), W, H);
  const auto box = box_at(s, scale, {0.5, 0.5}, W, H);
  PackingRequest req;
  req.count = CountLabel::kMax;
  req.sprite_id = s.id;
  req.scale = scale;
  req.extent_w = box.width();
  req.extent_h = box.height();
  req.canvas_w = W;
  req.canvas_h = H;
  req.min_sep = 0.02 * std::min(W, H);
  req.gap_px = std::max(2, std::min(W, H) / 256);
  req.seed = probe.seed("packing");
  const auto placed = place_non_overlapping(req);
  std::vector<CanvasLayout> out;
  for (int k = 0; k < CountLabel::kMax; ++k) {
    auto l = base_layout(probe, static_cast<std::uint64_t>(k));
    l.placements.assign(placed.begin(), placed.begin() + k + 1);
    out.push_back(std::move(l));
  }
  return out;
}

std::string fmt3(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::vector<CanvasLayout> plan_candidate_layouts(const AttributeProbe& probe, const SpriteLibrary& sprites) {
  if (probe.sprite_ids.size() != static_cast<std::size_t>(subset_category_count(probe.subset))) {
    throw PreconditionError("probe has the wrong number of sprites for its subset");
  }
  std::vector<CanvasLayout> layouts;
  switch (probe.subset) {
    case SubsetKind::AbsoluteSize: layouts = plan_absolute_size(probe, sprites); break;
    case SubsetKind::RelativeSize: layouts = plan_relative_size(probe, sprites); break;
    case SubsetKind::AbsolutePosition: layouts = plan_absolute_position(probe, sprites); break;
    case SubsetKind::RelativePosition: layouts = plan_relative_position(probe, sprites); break;
    case SubsetKind::Existence: layouts = plan_existence(probe, sprites); break;
    case SubsetKind::Count: layouts = plan_count(probe, sprites); break;
  }
  const bool occlusion_free = true;
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    const auto issues = validate_layout(layouts[k], sprites, occlusion_free);
    if (!issues.empty()) throw InfeasibleError("candidate " + std::to_string(k) + ": " + issues.front());
    SubsetLabel measured = label_at(probe.subset, 0);
    try {
      measured = measure_layout(layouts[k], probe.subset, sprites);
    } catch (const ValidationError& e) {
      throw InfeasibleError("candidate " + std::to_string(k) + ": " + e.what());
    }
    if (label_index(measured) != static_cast<int>(k)) {
      throw InfeasibleError("candidate " + std::to_string(k) + " measures as " + to_string(measured));
    }
  }
  return layouts;
}

std::vector<Placement> place_non_overlapping(const PackingRequest& r) {
  if (r.count < 1 || r.count > CountLabel::kMax) {
    throw PreconditionError("can place between 1 and 9 objects, asked for " + std::to_string(r.count));
  }
  if (r.extent_w <= 0 || r.extent_h <= 0 || r.canvas_w <= 0 || r.canvas_h <= 0) {
    throw PreconditionError("extent and canvas must be positive");
  }
  constexpr int kBackoffs = 3;
  constexpr int kRestarts = 64;
  constexpr int kTries = 400;
  double factor = 1.0;
  for (int backoff = 0; backoff <= kBackoffs; ++backoff, factor *= 0.9) {
    const int w = std::max(1, static_cast<int>(std::lround(r.extent_w * factor)));
    const int h = std::max(1, static_cast<int>(std::lround(r.extent_h * factor)));
    if (w > r.canvas_w || h > r.canvas_h) continue;
    SeededRng rng(derive_seed(r.seed, {{"backoff", static_cast<std::uint64_t>(backoff)}}));
    // One extra pixel absorbs rounding between this extent and the sprite's own box.
    const int margin = r.gap_px + 1;
    for (int restart = 0; restart < kRestarts; ++restart) {
      std::vector<PixelBox> boxes;
      std::vector<NormPoint> centers;
      for (int i = 0; i < r.count; ++i) {
        bool placed = false;
        for (int t = 0; t < kTries && !placed; ++t) {
          const double cx = rng.uniform(0.5 * w + 1.0, r.canvas_w - 0.5 * w - 1.0);
          const double cy = rng.uniform(0.5 * h + 1.0, r.canvas_h - 0.5 * h - 1.0);
          const int x0 = static_cast<int>(std::floor(cx - 0.5 * w + 0.5));
          const int y0 = static_cast<int>(std::floor(cy - 0.5 * h + 0.5));
          const PixelBox box{x0, y0, x0 + w, y0 + h};
          const PixelBox padded{x0 - margin, y0 - margin, x0 + w + margin, y0 + h + margin};
          const bool clear = std::all_of(boxes.begin(), boxes.end(), [&](const PixelBox& o) {
            return intersect(padded, o).area() == 0 && std::hypot(o.center_x() - box.center_x(), o.center_y() - box.center_y()) >= r.min_sep;
          });
          if (!clear) continue;
          boxes.push_back(box);
          centers.push_back({cx / r.canvas_w, cy / r.canvas_h});
          placed = true;
        }
        if (!placed) break;
      }
      if (static_cast<int>(boxes.size()) == r.count) {
        std::vector<Placement> out;
        for (int i = 0; i < r.count; ++i) out.push_back({r.sprite_id, centers[static_cast<std::size_t>(i)], r.scale * factor, i});
        return out;
      }
    }
  }
  throw InfeasibleError("could not place " + std::to_string(r.count) + " objects without overlap; final scale " +
                        fmt3(r.scale * factor / 0.9));
}

double placement_area_fraction(const CanvasLayout& layout, std::size_t index, const SpriteLibrary& sprites) {
  const auto& p = layout.placements.at(index);
  const auto& s = sprites.at(p.sprite_id);
  // Count only the part of the alpha that lands on the canvas.
  const auto box = placement_box(p, s, layout.width, layout.height);
  const auto alpha = scaled_alpha(s, p);
  const auto vis = intersect(box, PixelBox{0, 0, layout.width, layout.height});
  std::int64_t n = 0;
  for (int y = vis.y0; y < vis.y1; ++y) {
    for (int x = vis.x0; x < vis.x1; ++x) n += alpha.test(x - box.x0, y - box.y0) ? 1 : 0;
  }
  return static_cast<double>(n) / (static_cast<double>(layout.width) * layout.height);
}

SubsetLabel measure_layout(const CanvasLayout& layout, SubsetKind subset, const SpriteLibrary& sprites) {
  const auto n = layout.placements.size();
  const auto need = [&](std::size_t k) {
    if (n < k) throw ValidationError(std::string(to_string(subset)) + " layout needs " + std::to_string(k) + " placements");
  };
  switch (subset) {
    case SubsetKind::AbsoluteSize: {
      need(1);
      const double p = placement_area_fraction(layout, 0, sprites);
      if (auto level = classify_absolute_size(p)) return *level;
      throw ValidationError("area fraction P=" + fmt3(p) + " falls in an unclassified band");
    }
    case SubsetKind::RelativeSize: {
      need(2);
      const double a = placement_area_fraction(layout, 0, sprites);
      const double b = placement_area_fraction(layout, 1, sprites);
      if (a <= 0.0 || b <= 0.0) throw ValidationError("relative size needs two visible objects");
      if (auto rel = classify_relative_size(a, b)) return *rel;
      throw ValidationError("area ratio R=" + fmt3(a / b) + " falls in an unclassified band");
    }
    case SubsetKind::AbsolutePosition:
      need(1);
      return classify_absolute_position(layout.placements[0].center);
    case SubsetKind::RelativePosition:
      need(2);
      if (layout.placements[0].center == layout.placements[1].center) throw ValidationError("coincident object centers");
      return classify_relative_position(layout.placements[0].center, layout.placements[1].center);
    case SubsetKind::Existence:
      return classify_existence(static_cast<std::int64_t>(n));
    case SubsetKind::Count:
      if (n < 1 || n > static_cast<std::size_t>(CountLabel::kMax)) {
        throw ValidationError("object count " + std::to_string(n) + " outside [1, 9]");
      }
      return CountLabel(static_cast<int>(n));
  }
  throw PreconditionError("invalid subset");
}

}  // namespace vlprobe
