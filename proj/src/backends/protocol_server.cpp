#include "vlprobe/backends/protocol_server.hpp"

#include <httplib.h>

#include <memory>
#include <mutex>

#include "vlprobe/backends/protocol.hpp"
#include "vlprobe/core/error.hpp"
#include "vlprobe/core/serialize.hpp"

namespace vlprobe {

using nlohmann::json;

namespace {

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                 std::optional<int> step = std::nullopt) {
  res.status = status;
  res.set_content(protocol::error_envelope(code, message, step).dump(), "application/json");
}

template <typename Handler>
httplib::Server::Handler guarded(std::shared_ptr<std::mutex> mu, Handler handler) {
  return [mu, handler](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return reply_error(res, 400, "bad_request", e.what());
    }
    if (!body.contains("request_id") || !body["request_id"].is_string()) {
      return reply_error(res, 400, "bad_request", "missing request_id");
    }
    try {
      std::lock_guard lock(*mu);
      res.set_content(handler(body, body["request_id"].get<std::string>()).dump(), "application/json");
    } catch (const PreconditionError& e) {
      reply_error(res, 400, "bad_request", e.what());
    } catch (const ValidationError& e) {
      reply_error(res, 400, "bad_request", e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, "bad_request", e.what());
    } catch (const BackendError& e) {
      reply_error(res, e.code() == "not_found" ? 404 : 500, e.code(), e.what(), e.step());
    } catch (const std::exception& e) {
      reply_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

void mount_protocol(httplib::Server& server, Backend& backend) {
  auto mu = std::make_shared<std::mutex>();
  server.Get(protocol::kHealthPath, [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  server.Get(protocol::kCapabilitiesPath, [&backend, mu](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(*mu);
    res.set_content(protocol::capabilities_response(backend.capabilities()).dump(), "application/json");
  });
  server.Post(protocol::kGeneratePath, guarded(mu, [&backend](const json& body, const std::string& id) {
    return protocol::image_response(id, backend.generate(protocol::parse_generate_request(body)));
  }));
  server.Post(protocol::kSegmentPath, guarded(mu, [&backend](const json& body, const std::string& id) {
    const auto image = raster_from_json(body.at("image"));
    return protocol::segment_response(id, backend.segment(image, body.at("category").get<std::string>()));
  }));
  server.Post(protocol::kInpaintPath, guarded(mu, [&backend](const json& body, const std::string& id) {
    const auto image = raster_from_json(body.at("image"));
    const auto mask = mask_from_json(body.at("mask"));
    return protocol::image_response(
        id, inpaint(backend, image, mask, body.at("prompt").get<std::string>(), body.at("seed").get<std::uint64_t>()));
  }));
  server.Post(protocol::kEmbedPath, guarded(mu, [&backend](const json& body, const std::string& id) {
    const auto items = protocol::parse_embed_items(body);
    return protocol::embed_response(id, embed(backend, items));
  }));
}

}  // namespace vlprobe
