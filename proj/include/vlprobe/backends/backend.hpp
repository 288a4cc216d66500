#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vlprobe/core/raster.hpp"

namespace vlprobe {

struct BackendCapabilitySet {
  bool generate = false;
  bool segment = false;
  bool inpaint = false;
  bool embed = false;
  friend bool operator==(const BackendCapabilitySet&, const BackendCapabilitySet&) = default;
};

struct GenerationRequest {
  std::string prompt;
  std::uint64_t seed = 0;
  int width = 256;
  int height = 256;
};

struct SegmentationResult {
  BinaryMask mask;
  PixelBox bbox;
  double confidence = 0.0;
};

using EmbedItem = std::variant<RasterImage, std::string>;
using Embedding = std::vector<double>;

/// The generative and embedding capabilities the synthesis pipeline relies on.
/// Implementations throw BackendError (or TransportError) on failure.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string name() const = 0;
  virtual BackendCapabilitySet capabilities() = 0;

  virtual RasterImage generate(const GenerationRequest& request) = 0;
  virtual SegmentationResult segment(const RasterImage& image, const std::string& category) = 0;
  /// Pixels where `mask` is unset must come back unchanged.
  virtual RasterImage inpaint(const RasterImage& image, const BinaryMask& mask, const std::string& prompt,
                              std::uint64_t seed) = 0;
  virtual std::vector<Embedding> embed(std::span<const EmbedItem> items) = 0;
};

/// "a photo of a single and fully visible {category}"
std::string object_prompt(const std::string& category);

// Checked entry points. These enforce vocabulary, shape and capability
// preconditions before delegating to the backend.

RasterImage generate_object_image(Backend& backend, const std::string& category, std::uint64_t seed,
                                  int size = 256);
SegmentationResult segment_object(Backend& backend, const RasterImage& image, const std::string& category);
RasterImage inpaint(Backend& backend, const RasterImage& image, const BinaryMask& mask, const std::string& prompt,
                    std::uint64_t seed);
std::vector<Embedding> embed(Backend& backend, std::span<const EmbedItem> items);

/// Cosine of two equal-length vectors. Throws PreconditionError on zero vectors.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace vlprobe
