#include "vlprobe/core/serialize.hpp"

#include <openssl/evp.h>

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/png_io.hpp"

namespace vlprobe {

using nlohmann::json;

void to_json(json& j, const NormPoint& p) { j = json::array({p.x, p.y}); }
void from_json(const json& j, NormPoint& p) {
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
}

void to_json(json& j, const PixelBox& b) { j = json::array({b.x0, b.y0, b.x1, b.y1}); }
void from_json(const json& j, PixelBox& b) {
  b = {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

void to_json(json& j, const SeedLabel& s) { j = json{{"label", s.label}, {"index", s.index}}; }
void from_json(const json& j, SeedLabel& s) {
  s.label = j.at("label").get<std::string>();
  s.index = j.at("index").get<std::uint64_t>();
}

void to_json(json& j, const Placement& p) {
  j = json{{"sprite", p.sprite_id}, {"center", p.center}, {"scale", p.scale}, {"z", p.z}};
}
void from_json(const json& j, Placement& p) {
  p.sprite_id = j.at("sprite").get<std::string>();
  p.center = j.at("center").get<NormPoint>();
  p.scale = j.at("scale").get<double>();
  p.z = j.at("z").get<int>();
}

void to_json(json& j, const CanvasLayout& l) {
  j = json{{"width", l.width},
           {"height", l.height},
           {"placements", l.placements},
           {"background_prompt", l.background_prompt},
           {"layout_seed", l.layout_seed}};
}
void from_json(const json& j, CanvasLayout& l) {
  l.width = j.at("width").get<int>();
  l.height = j.at("height").get<int>();
  l.placements = j.at("placements").get<std::vector<Placement>>();
  l.background_prompt = j.at("background_prompt").get<std::string>();
  l.layout_seed = j.at("layout_seed").get<std::uint64_t>();
}

json raster_to_json(const RasterImage& img) { return base64_encode(encode_png(img)); }
RasterImage raster_from_json(const json& j) { return decode_png(base64_decode(j.get<std::string>())); }
json mask_to_json(const BinaryMask& m) { return base64_encode(encode_mask_png(m)); }
BinaryMask mask_from_json(const json& j) { return decode_mask_png(base64_decode(j.get<std::string>())); }

json sprite_to_json(const SpriteAsset& s) {
  return json{{"id", s.id},
              {"category", s.category},
              {"raster", raster_to_json(s.raster)},
              {"alpha", mask_to_json(s.alpha)},
              {"bbox", s.bbox},
              {"source_seed", s.source_seed}};
}

SpriteAsset sprite_from_json(const json& j) {
  return SpriteAsset{j.at("id").get<std::string>(),     j.at("category").get<std::string>(),
                     raster_from_json(j.at("raster")),   mask_from_json(j.at("alpha")),
                     j.at("bbox").get<PixelBox>(),       j.at("source_seed").get<std::uint64_t>()};
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw PreconditionError("malformed base64: length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw PreconditionError("malformed base64 payload");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

}  // namespace vlprobe
