#pragma once

#include "vlprobe/backends/backend.hpp"

namespace vlprobe {

/// Offline, fully deterministic backend.
///
/// Objects are category-keyed superellipse sprites painted in saturated colors
/// over a neutral-gray noise background, so segmentation can recover the exact
/// painted alpha by rejecting gray pixels. Inpainting fills masked pixels with
/// seeded value noise whose palette is keyed by the prompt; the fill at a
/// pixel depends only on (prompt, seed, x, y). Embeddings are hashed
/// bag-of-words vectors for text and pooled color features for images.
class ProceduralBackend final : public Backend {
 public:
  struct Options {
    int embedding_dim = 64;
  };

  ProceduralBackend() = default;
  explicit ProceduralBackend(Options opts) : opts_(opts) {}

  std::string name() const override { return "procedural"; }
  BackendCapabilitySet capabilities() override { return {true, true, true, true}; }

  RasterImage generate(const GenerationRequest& request) override;
  SegmentationResult segment(const RasterImage& image, const std::string& category) override;
  RasterImage inpaint(const RasterImage& image, const BinaryMask& mask, const std::string& prompt,
                      std::uint64_t seed) override;
  std::vector<Embedding> embed(std::span<const EmbedItem> items) override;

  /// The exact object mask generate() paints for this request.
  static BinaryMask painted_alpha(const GenerationRequest& request);

 private:
  Options opts_;
};

}  // namespace vlprobe
