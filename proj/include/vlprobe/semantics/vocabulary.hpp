#pragma once

#include <span>
#include <string>
#include <string_view>

namespace vlprobe {

/// The 80 COCO object categories, in the standard order.
std::span<const std::string> coco_categories();
bool is_known_category(std::string_view name);
/// Position in coco_categories(); throws PreconditionError for unknown names.
int category_index(std::string_view name);
std::string plural_of(std::string_view category);

}  // namespace vlprobe
