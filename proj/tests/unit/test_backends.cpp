#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "vlprobe/backends/http_backend.hpp"
#include "vlprobe/backends/procedural.hpp"
#include "vlprobe/backends/protocol.hpp"
#include "vlprobe/backends/protocol_server.hpp"
#include "vlprobe/core/error.hpp"
#include "vlprobe/core/png_io.hpp"

using namespace vlprobe;

namespace {

/// Procedural backend whose inpaint fails with a coded error.
class FailingBackend final : public Backend {
 public:
  std::string name() const override { return "failing"; }
  BackendCapabilitySet capabilities() override { return {true, true, true, true}; }
  RasterImage generate(const GenerationRequest& r) override { return inner_.generate(r); }
  SegmentationResult segment(const RasterImage& img, const std::string& c) override { return inner_.segment(img, c); }
  RasterImage inpaint(const RasterImage&, const BinaryMask&, const std::string&, std::uint64_t) override {
    throw BackendError("inpainting disabled", 4, "unsupported");
  }
  std::vector<Embedding> embed(std::span<const EmbedItem> items) override { return inner_.embed(items); }

 private:
  ProceduralBackend inner_;
};

struct ServerFixture {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  explicit ServerFixture(Backend& backend) {
    mount_protocol(server, backend);
    start();
  }
  ServerFixture() = default;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
  ~ServerFixture() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

HttpBackend::Options fast() {
  HttpBackend::Options o;
  o.timeout = std::chrono::milliseconds(5000);
  o.max_attempts = 2;
  o.backoff = std::chrono::milliseconds(1);
  return o;
}

}  // namespace

TEST_CASE("procedural generation is deterministic and segmentable") {
  ProceduralBackend b;
  const auto a = generate_object_image(b, "dog", 5, 128);
  CHECK(a == generate_object_image(b, "dog", 5, 128));
  CHECK_FALSE(a == generate_object_image(b, "dog", 6, 128));
  const auto seg = segment_object(b, a, "dog");
  CHECK(seg.mask == ProceduralBackend::painted_alpha({object_prompt("dog"), 5, 128, 128}));
  CHECK(seg.bbox == *seg.mask.bounds());
  CHECK_THROWS_AS(generate_object_image(b, "unicorn", 5, 128), PreconditionError);
}

TEST_CASE("procedural inpaint preserves unmasked pixels") {
  ProceduralBackend b;
  const auto img = generate_object_image(b, "cat", 1, 64);
  BinaryMask m(64, 64);
  m.fill({10, 10, 30, 40});
  const auto out = inpaint(b, img, m, "a photo of a beach", 9);
  int changed = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (!m.test(x, y)) {
        CHECK(out.at(x, y) == img.at(x, y));
      } else if (!(out.at(x, y) == img.at(x, y))) {
        ++changed;
      }
    }
  }
  CHECK(changed > 0);
  CHECK(out == inpaint(b, img, m, "a photo of a beach", 9));
  CHECK_THROWS_AS(inpaint(b, img, BinaryMask(32, 32), "x", 1), PreconditionError);
}

TEST_CASE("embeddings have fixed dimension") {
  ProceduralBackend b;
  const std::vector<EmbedItem> items{std::string("a dog"), RasterImage(8, 8), std::string("a dog")};
  const auto v = embed(b, items);
  REQUIRE(v.size() == 3);
  CHECK(v[0].size() == 64);
  CHECK(v[1].size() == 64);
  CHECK(v[0] == v[2]);
  CHECK(cosine(v[0], v[2]) == doctest::Approx(1.0));
}

TEST_CASE("cosine") {
  const std::vector<double> a{1, 0}, b{0, 2}, c{-3, 0}, z{0, 0};
  CHECK(cosine(a, b) == doctest::Approx(0.0));
  CHECK(cosine(a, c) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine(a, z), PreconditionError);
}

TEST_CASE("protocol messages round trip") {
  const BackendCapabilitySet caps{true, false, true, false};
  CHECK(protocol::parse_capabilities(protocol::capabilities_response(caps)) == caps);
  const GenerationRequest g{"a photo of a cup", 123456789012345ULL, 96, 64};
  const auto pg = protocol::parse_generate_request(protocol::generate_request("r1", g));
  CHECK(pg.prompt == g.prompt);
  CHECK(pg.seed == g.seed);
  CHECK(pg.width == 96);
  const std::vector<Embedding> vecs{{0.5, -1.25}, {3.0, 0.0}};
  CHECK(protocol::parse_embed_response(protocol::embed_response("r2", vecs)) == vecs);
  const auto env = protocol::error_envelope("mask_violation", "changed pixels", 3);
  CHECK(env["error"]["code"] == "mask_violation");
  CHECK(env["error"]["step"] == 3);
  CHECK(protocol::error_envelope("x", "y")["error"]["step"].is_null());
}

TEST_CASE("http client against an in-process server") {
  ProceduralBackend local;
  ServerFixture srv(local);
  HttpBackend remote(srv.endpoint(), fast());

  CHECK(remote.capabilities() == local.capabilities());
  const GenerationRequest req{object_prompt("bus"), 77, 64, 64};
  const auto img = remote.generate(req);
  CHECK(img == local.generate(req));
  const auto seg = remote.segment(img, "bus");
  CHECK(seg.mask == local.segment(img, "bus").mask);
  BinaryMask m(64, 64);
  m.fill({0, 0, 20, 20});
  CHECK(remote.inpaint(img, m, "a photo of a street", 4) == local.inpaint(img, m, "a photo of a street", 4));
  const std::vector<EmbedItem> items{std::string("a bus"), img};
  const auto ev = remote.embed(items);
  const auto lv = local.embed(items);
  REQUIRE(ev.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < lv[i].size(); ++k) CHECK(ev[i][k] == doctest::Approx(lv[i][k]).epsilon(1e-12));
  }
}

TEST_CASE("server errors arrive as coded backend errors") {
  FailingBackend failing;
  ServerFixture srv(failing);
  HttpBackend remote(srv.endpoint(), fast());
  const auto img = remote.generate({object_prompt("cup"), 1, 32, 32});
  try {
    remote.inpaint(img, BinaryMask(32, 32), "x", 1);
    FAIL("expected BackendError");
  } catch (const TransportError&) {
    FAIL("server error must not be a transport error");
  } catch (const BackendError& e) {
    CHECK(e.code() == "unsupported");
    CHECK(e.step() == 4);
  }
}

TEST_CASE("malformed requests get a 400 envelope") {
  ProceduralBackend local;
  ServerFixture srv(local);
  httplib::Client cli(srv.endpoint());
  auto res = cli.Post(protocol::kSegmentPath, R"({"request_id":"r","image":"@@@not base64@@@","category":"cup"})",
                      "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  const auto j = nlohmann::json::parse(res->body);
  CHECK(j["error"]["code"] == "bad_request");

  res = cli.Post(protocol::kGeneratePath, "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = cli.Post(protocol::kGeneratePath, R"({"prompt":"x"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
}

TEST_CASE("mismatched request ids are rejected") {
  ServerFixture srv;
  srv.server.Post(protocol::kGeneratePath, [](const httplib::Request&, httplib::Response& res) {
    res.set_content(protocol::image_response("someone-else", RasterImage(4, 4)).dump(), "application/json");
  });
  srv.start();
  HttpBackend remote(srv.endpoint(), fast());
  try {
    remote.generate({"a photo of a cup", 1, 4, 4});
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.code() == "correlation");
  }
}

TEST_CASE("unreachable endpoint raises a transport error after retries") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpBackend remote("http://127.0.0.1:" + std::to_string(port), fast());
  CHECK_THROWS_AS(remote.capabilities(), TransportError);
  CHECK_THROWS_AS(HttpBackend("ftp://example"), ConfigError);
}
