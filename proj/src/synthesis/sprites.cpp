#include "vlprobe/synthesis/sprites.hpp"

#include "vlprobe/core/seed.hpp"
#include "vlprobe/semantics/vocabulary.hpp"

namespace vlprobe {

SpriteLibrary build_sprite_library(Backend& backend, std::span<const std::string> categories,
                                   const SpriteLibraryConfig& config) {
  SpriteLibrary lib;
  for (const auto& category : categories) {
    const auto cat = static_cast<std::uint64_t>(category_index(category));
    for (int v = 0; v < config.variants_per_category; ++v) {
      const auto seed = derive_seed(config.root_seed, {{"sprite", cat}, {"variant", static_cast<std::uint64_t>(v)}});
      const auto image = generate_object_image(backend, category, seed, config.image_size);
      const auto seg = segment_object(backend, image, category);
      lib.add(make_sprite(category + "#" + std::to_string(v), category, image, seg.mask, seed));
    }
  }
  return lib;
}

}  // namespace vlprobe
