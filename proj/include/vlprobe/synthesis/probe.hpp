#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlprobe/core/scene.hpp"
#include "vlprobe/core/seed.hpp"
#include "vlprobe/semantics/labels.hpp"

namespace vlprobe {

/// Everything that stays fixed across one candidate set: the subset being
/// probed, the object categories and sprite choices, the canvas and the
/// background prompt. The varied attribute is filled in by the layout planner.
struct AttributeProbe {
  SubsetKind subset = SubsetKind::Count;
  std::vector<std::string> categories;  // A (and B for the relative subsets)
  std::vector<std::string> sprite_ids;  // one per category
  int canvas_width = 1024;
  int canvas_height = 1024;
  std::string background_prompt;
  std::uint64_t root_seed = 0;
  std::uint64_t case_index = 0;
  std::uint64_t attempt = 0;

  /// Seed path prefix shared by every random decision made for this probe.
  SeedPath seed_path(std::string_view leaf, std::uint64_t index = 0) const;
  std::uint64_t seed(std::string_view leaf, std::uint64_t index = 0) const;

  friend bool operator==(const AttributeProbe&, const AttributeProbe&) = default;
};

struct ProbeOptions {
  int canvas_width = 1024;
  int canvas_height = 1024;
};

/// Picks categories, sprites and background for one test case. AbsoluteSize
/// probes only select sprites able to reach the Large band inside the canvas.
/// Throws InfeasibleError when the library has no suitable sprite.
AttributeProbe make_probe(SubsetKind subset, std::uint64_t case_index, std::uint64_t root_seed,
                          std::uint64_t attempt, const SpriteLibrary& sprites, const ProbeOptions& opts);

nlohmann::json probe_to_json(const AttributeProbe& p);
AttributeProbe probe_from_json(const nlohmann::json& j);

}  // namespace vlprobe
