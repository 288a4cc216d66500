#pragma once

#include <json.hpp>

#include "vlprobe/core/geometry.hpp"
#include "vlprobe/core/scene.hpp"
#include "vlprobe/core/seed.hpp"

// JSON mappings for the core value types. Rasters and masks travel as
// base64-encoded PNG so the mapping is lossless.

namespace vlprobe {

void to_json(nlohmann::json& j, const NormPoint& p);
void from_json(const nlohmann::json& j, NormPoint& p);
void to_json(nlohmann::json& j, const PixelBox& b);
void from_json(const nlohmann::json& j, PixelBox& b);
void to_json(nlohmann::json& j, const SeedLabel& s);
void from_json(const nlohmann::json& j, SeedLabel& s);
void to_json(nlohmann::json& j, const Placement& p);
void from_json(const nlohmann::json& j, Placement& p);
void to_json(nlohmann::json& j, const CanvasLayout& l);
void from_json(const nlohmann::json& j, CanvasLayout& l);

nlohmann::json raster_to_json(const RasterImage& img);
RasterImage raster_from_json(const nlohmann::json& j);
nlohmann::json mask_to_json(const BinaryMask& m);
BinaryMask mask_from_json(const nlohmann::json& j);
nlohmann::json sprite_to_json(const SpriteAsset& s);
SpriteAsset sprite_from_json(const nlohmann::json& j);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws PreconditionError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace vlprobe
