#include "vlprobe/backends/http_backend.hpp"

#include <httplib.h>

#include <thread>

#include "vlprobe/backends/protocol.hpp"
#include "vlprobe/core/error.hpp"

namespace vlprobe {

using nlohmann::json;

HttpBackend::HttpBackend(std::string endpoint, Options opts) : endpoint_(std::move(endpoint)), opts_(opts) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (endpoint_.rfind("http://", 0) != 0) {
    throw ConfigError("backend endpoint must start with http://, got '" + endpoint_ + "'");
  }
}

std::string HttpBackend::next_request_id() {
  return "req-" + std::to_string(counter_.fetch_add(1) + 1);
}

json HttpBackend::get(const char* path) { return exchange(path, nullptr); }

json HttpBackend::post(const char* path, const json& body) { return exchange(path, &body); }

json HttpBackend::exchange(const char* path, const json* body) {
  httplib::Client client(endpoint_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
  client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
  client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
  client.set_write_timeout(secs.count(), static_cast<time_t>(usecs.count()));

  const std::string payload = body ? body->dump() : std::string{};
  auto delay = opts_.backoff;
  for (int attempt = 1;; ++attempt) {
    auto res = body ? client.Post(path, payload, "application/json") : client.Get(path);
    if (!res) {
      if (attempt >= opts_.max_attempts) {
        throw TransportError(endpoint_ + path + ": " + httplib::to_string(res.error()) + " after " +
                                 std::to_string(attempt) + " attempts",
                             std::nullopt, "transport");
      }
      std::this_thread::sleep_for(delay);
      delay *= 2;
      continue;
    }
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::parse_error&) {
      throw BackendError(std::string(path) + ": response is not JSON (HTTP " + std::to_string(res->status) + ")",
                         std::nullopt, "bad_response");
    }
    if (res->status >= 400) {
      const auto& err = reply.contains("error") ? reply["error"] : json::object();
      std::optional<int> step;
      if (err.contains("step") && err["step"].is_number_integer()) step = err["step"].get<int>();
      throw BackendError(std::string(path) + ": " + err.value("message", "HTTP " + std::to_string(res->status)), step,
                         err.value("code", "http_" + std::to_string(res->status)));
    }
    if (body) {
      const auto sent = body->at("request_id").get<std::string>();
      if (reply.value("request_id", std::string{}) != sent) {
        throw BackendError(std::string(path) + ": response request_id does not match '" + sent + "'", std::nullopt,
                           "correlation");
      }
    }
    return reply;
  }
}

BackendCapabilitySet HttpBackend::capabilities() {
  return protocol::parse_capabilities(get(protocol::kCapabilitiesPath));
}

RasterImage HttpBackend::generate(const GenerationRequest& request) {
  return protocol::parse_image_response(post(protocol::kGeneratePath, protocol::generate_request(next_request_id(), request)));
}

SegmentationResult HttpBackend::segment(const RasterImage& image, const std::string& category) {
  return protocol::parse_segment_response(
      post(protocol::kSegmentPath, protocol::segment_request(next_request_id(), image, category)));
}

RasterImage HttpBackend::inpaint(const RasterImage& image, const BinaryMask& mask, const std::string& prompt,
                                 std::uint64_t seed) {
  return protocol::parse_image_response(
      post(protocol::kInpaintPath, protocol::inpaint_request(next_request_id(), image, mask, prompt, seed)));
}

std::vector<Embedding> HttpBackend::embed(std::span<const EmbedItem> items) {
  return protocol::parse_embed_response(post(protocol::kEmbedPath, protocol::embed_request(next_request_id(), items)));
}

}  // namespace vlprobe
