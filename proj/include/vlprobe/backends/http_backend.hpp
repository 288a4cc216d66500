#pragma once

#include <atomic>
#include <chrono>
#include <string>

#include <json.hpp>

#include "vlprobe/backends/backend.hpp"

namespace vlprobe {

/// Client for a remote backend speaking the JSON/HTTP protocol.
///
/// Transport failures (connection refused, timeouts) are retried with
/// exponential backoff; error responses from the server are never retried so
/// a seeded generation is attempted at most once per server answer.
class HttpBackend final : public Backend {
 public:
  struct Options {
    std::chrono::milliseconds timeout{30000};
    int max_attempts = 3;
    std::chrono::milliseconds backoff{200};
  };

  /// `endpoint` like "http://127.0.0.1:8080".
  explicit HttpBackend(std::string endpoint) : HttpBackend(std::move(endpoint), Options{}) {}
  HttpBackend(std::string endpoint, Options opts);

  std::string name() const override { return "http:" + endpoint_; }
  BackendCapabilitySet capabilities() override;

  RasterImage generate(const GenerationRequest& request) override;
  SegmentationResult segment(const RasterImage& image, const std::string& category) override;
  RasterImage inpaint(const RasterImage& image, const BinaryMask& mask, const std::string& prompt,
                      std::uint64_t seed) override;
  std::vector<Embedding> embed(std::span<const EmbedItem> items) override;

 private:
  std::string next_request_id();
  nlohmann::json get(const char* path);
  nlohmann::json post(const char* path, const nlohmann::json& body);
  nlohmann::json exchange(const char* path, const nlohmann::json* body);

  std::string endpoint_;
  Options opts_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace vlprobe
