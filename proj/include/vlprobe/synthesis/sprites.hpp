#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "vlprobe/backends/backend.hpp"
#include "vlprobe/core/scene.hpp"

namespace vlprobe {

struct SpriteLibraryConfig {
  int variants_per_category = 3;
  int image_size = 256;
  std::uint64_t root_seed = 0;
};

/// Generates and segments `variants_per_category` objects per category.
/// Sprite ids are "<category>#<variant>".
SpriteLibrary build_sprite_library(Backend& backend, std::span<const std::string> categories,
                                   const SpriteLibraryConfig& config);

}  // namespace vlprobe
