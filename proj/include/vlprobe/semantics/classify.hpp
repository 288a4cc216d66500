#pragma once

#include <cstdint>
#include <optional>

#include "vlprobe/core/geometry.hpp"
#include "vlprobe/semantics/labels.hpp"

namespace vlprobe {

// Attribute classifiers. Size bands are separated by deliberate gaps; inputs
// that fall in a gap are unclassified (nullopt).

/// `area_fraction` is object alpha pixels over canvas pixels, in [0, 1].
std::optional<SizeLevel> classify_absolute_size(double area_fraction);

/// Ratio area_a / area_b decides the relation; both areas must be positive.
std::optional<RelSizeRelation> classify_relative_size(double area_a, double area_b);

GridCell classify_absolute_position(NormPoint center);

/// Dominant-axis rule. Horizontal wins ties |dx| == |dy|.
SpatialRelation classify_relative_position(NormPoint center_a, NormPoint center_b);

ExistenceLabel classify_existence(std::int64_t object_count);

}  // namespace vlprobe
