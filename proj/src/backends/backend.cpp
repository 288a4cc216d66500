#include "vlprobe/backends/backend.hpp"

#include <cmath>

#include "vlprobe/core/error.hpp"
#include "vlprobe/semantics/vocabulary.hpp"

namespace vlprobe {

std::string object_prompt(const std::string& category) {
  return "a photo of a single and fully visible " + category;
}

RasterImage generate_object_image(Backend& backend, const std::string& category, std::uint64_t seed, int size) {
  if (!is_known_category(category)) {
    throw PreconditionError("'" + category + "' is not in the 80-category vocabulary");
  }
  if (!backend.capabilities().generate) throw BackendError(backend.name() + " cannot generate", std::nullopt, "unsupported");
  return backend.generate(GenerationRequest{object_prompt(category), seed, size, size});
}

SegmentationResult segment_object(Backend& backend, const RasterImage& image, const std::string& category) {
  if (!backend.capabilities().segment) throw BackendError(backend.name() + " cannot segment", std::nullopt, "unsupported");
  auto result = backend.segment(image, category);
  if (result.mask.width() != image.width() || result.mask.height() != image.height()) {
    throw BackendError("segmentation mask does not match the image", std::nullopt, "bad_response");
  }
  const auto tight = result.mask.bounds();
  if (!tight || !result.bbox.contains(*tight)) {
    throw BackendError("segmentation bbox does not contain its mask", std::nullopt, "bad_response");
  }
  return result;
}

RasterImage inpaint(Backend& backend, const RasterImage& image, const BinaryMask& mask, const std::string& prompt,
                    std::uint64_t seed) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw PreconditionError("inpaint mask dimensions differ from the image");
  }
  if (!backend.capabilities().inpaint) throw BackendError(backend.name() + " cannot inpaint", std::nullopt, "unsupported");
  auto out = backend.inpaint(image, mask, prompt, seed);
  if (out.width() != image.width() || out.height() != image.height()) {
    throw BackendError("inpaint returned an image of the wrong size", std::nullopt, "bad_response");
  }
  return out;
}

std::vector<Embedding> embed(Backend& backend, std::span<const EmbedItem> items) {
  if (items.empty()) throw PreconditionError("embed batch must not be empty");
  if (!backend.capabilities().embed) throw BackendError(backend.name() + " cannot embed", std::nullopt, "unsupported");
  auto vectors = backend.embed(items);
  if (vectors.size() != items.size()) throw BackendError("embed returned the wrong number of vectors", std::nullopt, "bad_response");
  for (const auto& v : vectors) {
    if (v.empty() || v.size() != vectors.front().size()) {
      throw BackendError("embed returned vectors of unequal dimension", std::nullopt, "bad_response");
    }
  }
  return vectors;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("cosine of vectors with different dimension");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw PreconditionError("cosine of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace vlprobe
