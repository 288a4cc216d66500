#include "vlprobe/backends/protocol.hpp"

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/serialize.hpp"

namespace vlprobe::protocol {

using nlohmann::json;

namespace {

json envelope(const std::string& request_id) {
  return json{{"format_version", kFormatVersion}, {"request_id", request_id}};
}

}  // namespace

json capabilities_response(const BackendCapabilitySet& caps) {
  return json{{"format_version", kFormatVersion},
              {"generate", caps.generate},
              {"segment", caps.segment},
              {"inpaint", caps.inpaint},
              {"embed", caps.embed}};
}

BackendCapabilitySet parse_capabilities(const json& j) {
  return {j.value("generate", false), j.value("segment", false), j.value("inpaint", false), j.value("embed", false)};
}

json generate_request(const std::string& request_id, const GenerationRequest& r) {
  auto j = envelope(request_id);
  j["prompt"] = r.prompt;
  j["seed"] = r.seed;
  j["width"] = r.width;
  j["height"] = r.height;
  return j;
}

GenerationRequest parse_generate_request(const json& j) {
  return {j.at("prompt").get<std::string>(), j.at("seed").get<std::uint64_t>(), j.at("width").get<int>(),
          j.at("height").get<int>()};
}

json segment_request(const std::string& request_id, const RasterImage& image, const std::string& category) {
  auto j = envelope(request_id);
  j["image"] = raster_to_json(image);
  j["category"] = category;
  return j;
}

json segment_response(const std::string& request_id, const SegmentationResult& r) {
  auto j = envelope(request_id);
  j["mask"] = mask_to_json(r.mask);
  j["bbox"] = r.bbox;
  j["confidence"] = r.confidence;
  return j;
}

SegmentationResult parse_segment_response(const json& j) {
  return {mask_from_json(j.at("mask")), j.at("bbox").get<PixelBox>(), j.at("confidence").get<double>()};
}

json inpaint_request(const std::string& request_id, const RasterImage& image, const BinaryMask& mask,
                     const std::string& prompt, std::uint64_t seed) {
  auto j = envelope(request_id);
  j["image"] = raster_to_json(image);
  j["mask"] = mask_to_json(mask);
  j["prompt"] = prompt;
  j["seed"] = seed;
  return j;
}

json embed_request(const std::string& request_id, std::span<const EmbedItem> items) {
  auto j = envelope(request_id);
  auto arr = json::array();
  for (const auto& item : items) {
    if (const auto* text = std::get_if<std::string>(&item)) {
      arr.push_back(json{{"type", "text"}, {"text", *text}});
    } else {
      arr.push_back(json{{"type", "image"}, {"image", raster_to_json(std::get<RasterImage>(item))}});
    }
  }
  j["items"] = std::move(arr);
  return j;
}

std::vector<EmbedItem> parse_embed_items(const json& j) {
  std::vector<EmbedItem> items;
  for (const auto& item : j.at("items")) {
    const auto type = item.at("type").get<std::string>();
    if (type == "text") {
      items.emplace_back(item.at("text").get<std::string>());
    } else if (type == "image") {
      items.emplace_back(raster_from_json(item.at("image")));
    } else {
      throw PreconditionError("unknown embed item type '" + type + "'");
    }
  }
  return items;
}

json embed_response(const std::string& request_id, const std::vector<Embedding>& vectors) {
  auto j = envelope(request_id);
  j["dim"] = vectors.empty() ? 0 : vectors.front().size();
  j["vectors"] = vectors;
  return j;
}

std::vector<Embedding> parse_embed_response(const json& j) { return j.at("vectors").get<std::vector<Embedding>>(); }

json image_response(const std::string& request_id, const RasterImage& image) {
  auto j = envelope(request_id);
  j["image"] = raster_to_json(image);
  return j;
}

RasterImage parse_image_response(const json& j) { return raster_from_json(j.at("image")); }

json error_envelope(const std::string& code, const std::string& message, std::optional<int> step) {
  return json{{"error", {{"code", code}, {"message", message}, {"step", step ? json(*step) : json(nullptr)}}}};
}

}  // namespace vlprobe::protocol
