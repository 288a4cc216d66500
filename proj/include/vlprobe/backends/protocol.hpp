#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "vlprobe/backends/backend.hpp"

// Wire protocol shared by the HTTP client and any server implementation.
// All bodies are JSON; images are base64 PNG (RGBA), masks base64 PNG (gray
// 0/255). Every request carries a `request_id` that the response echoes.
// Failures use HTTP status >= 400 and the envelope
//   {"error": {"code": str, "message": str, "step": int|null}}.

namespace vlprobe::protocol {

inline constexpr int kFormatVersion = 1;

inline constexpr const char* kCapabilitiesPath = "/v1/capabilities";
inline constexpr const char* kGeneratePath = "/v1/generate";
inline constexpr const char* kSegmentPath = "/v1/segment";
inline constexpr const char* kInpaintPath = "/v1/inpaint";
inline constexpr const char* kEmbedPath = "/v1/embed";
inline constexpr const char* kHealthPath = "/healthz";

nlohmann::json capabilities_response(const BackendCapabilitySet& caps);
BackendCapabilitySet parse_capabilities(const nlohmann::json& j);

nlohmann::json generate_request(const std::string& request_id, const GenerationRequest& r);
GenerationRequest parse_generate_request(const nlohmann::json& j);

nlohmann::json segment_request(const std::string& request_id, const RasterImage& image, const std::string& category);
nlohmann::json segment_response(const std::string& request_id, const SegmentationResult& r);
SegmentationResult parse_segment_response(const nlohmann::json& j);

nlohmann::json inpaint_request(const std::string& request_id, const RasterImage& image, const BinaryMask& mask,
                               const std::string& prompt, std::uint64_t seed);

nlohmann::json embed_request(const std::string& request_id, std::span<const EmbedItem> items);
std::vector<EmbedItem> parse_embed_items(const nlohmann::json& j);
nlohmann::json embed_response(const std::string& request_id, const std::vector<Embedding>& vectors);
std::vector<Embedding> parse_embed_response(const nlohmann::json& j);

/// {"request_id", "image"} response shared by generate and inpaint.
nlohmann::json image_response(const std::string& request_id, const RasterImage& image);
RasterImage parse_image_response(const nlohmann::json& j);

nlohmann::json error_envelope(const std::string& code, const std::string& message,
                              std::optional<int> step = std::nullopt);

}  // namespace vlprobe::protocol
