#include "vlprobe/synthesis/probe.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vlprobe/core/error.hpp"
#include "vlprobe/semantics/vocabulary.hpp"

namespace vlprobe {

namespace {

constexpr std::array<std::string_view, 12> kScenes = {
    "a grassy meadow",    "a sandy beach",       "a quiet city street", "a wooden kitchen table",
    "a snowy field",      "a living room floor", "a forest clearing",   "a stone courtyard",
    "a riverbank",        "an office desk",      "a savanna at noon",   "a garden path"};

// Largest area fraction the sprite reaches while its scaled box stays inside the canvas.
double max_area_fraction(const SpriteAsset& s, int w, int h) {
  const double scale = std::min(static_cast<double>(w) / s.bbox.width(), static_cast<double>(h) / s.bbox.height());
  return static_cast<double>(s.alpha.count()) * scale * scale / (static_cast<double>(w) * h);
}

// Only AbsoluteSize needs headroom above the Large target of 0.85.
constexpr double kLargeHeadroom = 0.87;

}  // namespace

SeedPath AttributeProbe::seed_path(std::string_view leaf, std::uint64_t index) const {
  return {{"subset", static_cast<std::uint64_t>(subset)},
          {"case", case_index},
          {"attempt", attempt},
          {std::string(leaf), index}};
}

std::uint64_t AttributeProbe::seed(std::string_view leaf, std::uint64_t index) const {
  return derive_seed(root_seed, seed_path(leaf, index));
}

AttributeProbe make_probe(SubsetKind subset, std::uint64_t case_index, std::uint64_t root_seed,
                          std::uint64_t attempt, const SpriteLibrary& sprites, const ProbeOptions& opts) {
  AttributeProbe probe;
  probe.subset = subset;
  probe.canvas_width = opts.canvas_width;
  probe.canvas_height = opts.canvas_height;
  probe.root_seed = root_seed;
  probe.case_index = case_index;
  probe.attempt = attempt;
  SeededRng rng(probe.seed("probe"));

  std::vector<std::string> available;
  for (const auto& c : coco_categories()) {
    if (!sprites.ids_for(c).empty()) available.push_back(c);
  }
  const auto needed = static_cast<std::size_t>(subset_category_count(subset));
  if (available.size() < needed) throw InfeasibleError("sprite library covers too few categories");

  if (subset == SubsetKind::AbsoluteSize) {
    std::vector<std::string> ids;
    for (const auto& c : available) {
      for (auto& id : sprites.ids_for(c)) ids.push_back(std::move(id));
    }
    // Deterministic Fisher-Yates so every sprite is eventually considered.
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    const auto it = std::find_if(ids.begin(), ids.end(), [&](const std::string& id) {
      return max_area_fraction(sprites.at(id), opts.canvas_width, opts.canvas_height) >= kLargeHeadroom;
    });
    if (it == ids.end()) throw InfeasibleError("no sprite can reach the Large band without clipping");
    probe.sprite_ids.push_back(*it);
    probe.categories.push_back(sprites.at(*it).category);
  } else {
    while (probe.categories.size() < needed) {
      const auto& c = available[rng.below(available.size())];
      if (std::find(probe.categories.begin(), probe.categories.end(), c) != probe.categories.end()) continue;
      const auto ids = sprites.ids_for(c);
      probe.categories.push_back(c);
      probe.sprite_ids.push_back(ids[rng.below(ids.size())]);
    }
  }
  probe.background_prompt = "a photo of " + std::string(kScenes[rng.below(kScenes.size())]);
  return probe;
}

nlohmann::json probe_to_json(const AttributeProbe& p) {
  return nlohmann::json{{"subset", to_string(p.subset)},
                        {"categories", p.categories},
                        {"sprites", p.sprite_ids},
                        {"canvas", {p.canvas_width, p.canvas_height}},
                        {"background_prompt", p.background_prompt},
                        {"root_seed", p.root_seed},
                        {"case_index", p.case_index},
                        {"attempt", p.attempt}};
}

AttributeProbe probe_from_json(const nlohmann::json& j) {
  AttributeProbe p;
  const auto subset = parse_subset(j.at("subset").get<std::string>());
  if (!subset) throw ValidationError("unknown subset in probe record");
  p.subset = *subset;
  p.categories = j.at("categories").get<std::vector<std::string>>();
  p.sprite_ids = j.at("sprites").get<std::vector<std::string>>();
  p.canvas_width = j.at("canvas").at(0).get<int>();
  p.canvas_height = j.at("canvas").at(1).get<int>();
  p.background_prompt = j.at("background_prompt").get<std::string>();
  p.root_seed = j.at("root_seed").get<std::uint64_t>();
  p.case_index = j.at("case_index").get<std::uint64_t>();
  p.attempt = j.at("attempt").get<std::uint64_t>();
  return p;
}

}  // namespace vlprobe
