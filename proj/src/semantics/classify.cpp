#include "vlprobe/semantics/classify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

std::optional<SizeLevel> classify_absolute_size(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("area fraction must lie in [0, 1]");
  if (p <= 0.2) return SizeLevel::Small;
  if (p >= 0.4 && p <= 0.6) return SizeLevel::Medium;
  if (p >= 0.8) return SizeLevel::Large;
  return std::nullopt;
}

std::optional<RelSizeRelation> classify_relative_size(double area_a, double area_b) {
  if (!(area_a > 0.0) || !(area_b > 0.0)) throw PreconditionError("object areas must be positive");
  const double r = area_a / area_b;
  if (r <= 0.5) return RelSizeRelation::SmallerThan;
  if (r >= 0.9 && r <= 1.1) return RelSizeRelation::EqualTo;
  if (r >= 2.0) return RelSizeRelation::LargerThan;
  return std::nullopt;
}

GridCell classify_absolute_position(NormPoint c) {
  if (!(c.x >= 0.0 && c.x <= 1.0 && c.y >= 0.0 && c.y <= 1.0)) {
    throw PreconditionError("center must lie in [0, 1]^2");
  }
  const int col = std::min(2, static_cast<int>(std::floor(3.0 * c.x)));
  const int row = std::min(2, static_cast<int>(std::floor(3.0 * c.y)));
  return grid_cell(row, col);
}

SpatialRelation classify_relative_position(NormPoint a, NormPoint b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (dx == 0.0 && dy == 0.0) throw PreconditionError("relative position of coincident centers");
  if (std::abs(dx) >= std::abs(dy)) return dx < 0.0 ? SpatialRelation::LeftOf : SpatialRelation::RightOf;
  return dy < 0.0 ? SpatialRelation::Above : SpatialRelation::Below;
}

ExistenceLabel classify_existence(std::int64_t object_count) {
  if (object_count < 0) throw PreconditionError("object count must be non-negative");
  return object_count == 0 ? ExistenceLabel::None : ExistenceLabel::AtLeastOne;
}

}  // namespace vlprobe
