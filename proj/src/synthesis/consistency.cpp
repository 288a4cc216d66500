#include "vlprobe/synthesis/consistency.hpp"

#include "vlprobe/core/error.hpp"
#include "vlprobe/synthesis/layout.hpp"

namespace vlprobe {

BinaryMask shared_tile_region(const std::vector<PixelBox>& tile_boxes,
                              const std::vector<std::vector<BinaryMask>>& object_masks, int canvas_w, int canvas_h) {
  if (tile_boxes.empty()) throw PreconditionError("no tile boxes");
  if (object_masks.size() != tile_boxes.size()) throw PreconditionError("one object mask list per candidate is required");
  const int tw = tile_boxes.front().width();
  const int th = tile_boxes.front().height();
  BinaryMask region(tw, th);
  region.fill({0, 0, tw, th});
  for (std::size_t k = 0; k < tile_boxes.size(); ++k) {
    const auto& box = tile_boxes[k];
    if (box.width() != tw || box.height() != th) throw PreconditionError("tile boxes differ in size");
    for (int y = 0; y < th; ++y) {
      for (int x = 0; x < tw; ++x) {
        const int cx = box.x0 + x, cy = box.y0 + y;
        if (cx < 0 || cy < 0 || cx >= canvas_w || cy >= canvas_h) {
          region.set(x, y, false);
          continue;
        }
        for (const auto& m : object_masks[k]) {
          if (m.test(cx, cy)) {
            region.set(x, y, false);
            break;
          }
        }
      }
    }
  }
  return region;
}

std::vector<std::string> check_tile_consistency(const std::vector<RasterImage>& images,
                                                const std::vector<PixelBox>& tile_boxes,
                                                const std::vector<std::vector<BinaryMask>>& object_masks) {
  std::vector<std::string> issues;
  if (images.size() != tile_boxes.size()) {
    issues.push_back("image count differs from tile box count");
    return issues;
  }
  if (images.size() < 2) return issues;
  const auto region = shared_tile_region(tile_boxes, object_masks, images[0].width(), images[0].height());
  const auto& b0 = tile_boxes[0];
  for (std::size_t k = 1; k < images.size(); ++k) {
    const auto& bk = tile_boxes[k];
    std::int64_t differing = 0;
    for (int y = 0; y < region.height(); ++y) {
      for (int x = 0; x < region.width(); ++x) {
        if (region.test(x, y) && images[0].at(b0.x0 + x, b0.y0 + y) != images[k].at(bk.x0 + x, bk.y0 + y)) ++differing;
      }
    }
    if (differing > 0) {
      issues.push_back("candidate " + std::to_string(k) + ": " + std::to_string(differing) +
                       " shared background pixels differ from candidate 0");
    }
  }
  return issues;
}

namespace {

void expect_count(std::vector<std::string>& issues, const std::vector<CanvasLayout>& layouts, std::size_t n) {
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    if (layouts[k].placements.size() != n) {
      issues.push_back("candidate " + std::to_string(k) + " has " + std::to_string(layouts[k].placements.size()) +
                       " placements, expected " + std::to_string(n));
    }
  }
}

}  // namespace

std::vector<std::string> check_fixed_placements(SubsetKind subset, const std::vector<CanvasLayout>& layouts) {
  std::vector<std::string> issues;
  if (layouts.size() != static_cast<std::size_t>(subset_cardinality(subset))) {
    issues.push_back("expected " + std::to_string(subset_cardinality(subset)) + " candidates, got " +
                     std::to_string(layouts.size()));
    return issues;
  }
  const auto& first = layouts.front();
  for (std::size_t k = 1; k < layouts.size(); ++k) {
    const auto& l = layouts[k];
    if (l.width != first.width || l.height != first.height) issues.push_back("candidate " + std::to_string(k) + ": canvas size differs");
    if (l.background_prompt != first.background_prompt) issues.push_back("candidate " + std::to_string(k) + ": background prompt differs");
  }
  const auto differ = [&](std::size_t k, const std::string& what) {
    issues.push_back("candidate " + std::to_string(k) + ": " + what + " differs");
  };
  switch (subset) {
    case SubsetKind::AbsoluteSize:
    case SubsetKind::AbsolutePosition:
    case SubsetKind::RelativeSize:
    case SubsetKind::RelativePosition: {
      const bool two = subset_category_count(subset) == 2;
      expect_count(issues, layouts, two ? 2 : 1);
      if (!issues.empty()) return issues;
      for (std::size_t k = 1; k < layouts.size(); ++k) {
        const auto& a0 = first.placements[0];
        const auto& a = layouts[k].placements[0];
        if (a.sprite_id != a0.sprite_id) differ(k, "object A sprite");
        if (subset == SubsetKind::AbsoluteSize && a.center != a0.center) differ(k, "object center");
        if (subset == SubsetKind::AbsolutePosition && a.scale != a0.scale) differ(k, "object scale");
        if (subset == SubsetKind::RelativeSize) {
          if (a.center != a0.center) differ(k, "object A center");
          if (layouts[k].placements[1] != first.placements[1]) differ(k, "object B placement");
        }
        if (subset == SubsetKind::RelativePosition) {
          if (a != a0) differ(k, "object A placement");
          const auto& b0 = first.placements[1];
          const auto& b = layouts[k].placements[1];
          if (b.sprite_id != b0.sprite_id || b.scale != b0.scale) differ(k, "object B sprite or scale");
        }
      }
      break;
    }
    case SubsetKind::Existence:
      if (!first.placements.empty()) issues.push_back("the None candidate contains objects");
      if (layouts[1].placements.size() != 1) issues.push_back("the AtLeastOne candidate must contain one object");
      break;
    case SubsetKind::Count:
      for (std::size_t k = 0; k < layouts.size(); ++k) {
        const auto& p = layouts[k].placements;
        if (p.size() != k + 1) {
          issues.push_back("candidate " + std::to_string(k) + " has " + std::to_string(p.size()) + " objects");
          continue;
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (p[i].sprite_id != first.placements[0].sprite_id || p[i].scale != first.placements[0].scale) {
            differ(k, "object " + std::to_string(i) + " sprite or scale");
          }
          if (k > 0 && i < k && p[i] != layouts[k - 1].placements[i]) differ(k, "object " + std::to_string(i) + " placement");
        }
      }
      break;
  }
  return issues;
}

std::vector<std::string> check_label_enumeration(SubsetKind subset, const std::vector<CanvasLayout>& layouts,
                                                 const SpriteLibrary& sprites) {
  std::vector<std::string> issues;
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    try {
      const auto label = measure_layout(layouts[k], subset, sprites);
      if (label_index(label) != static_cast<int>(k)) {
        issues.push_back("candidate " + std::to_string(k) + " measures as " + to_string(label));
      }
    } catch (const ValidationError& e) {
      issues.push_back("candidate " + std::to_string(k) + ": " + e.what());
    }
  }
  if (layouts.size() != static_cast<std::size_t>(subset_cardinality(subset))) {
    issues.push_back("label set is not fully enumerated");
  }
  return issues;
}

}  // namespace vlprobe
