#include "vlprobe/core/seed.hpp"

#include "vlprobe/core/error.hpp"

namespace vlprobe {

std::uint64_t derive_seed(std::uint64_t root, std::span<const SeedLabel> path) {
  if (path.empty()) throw PreconditionError("seed derivation path must not be empty");
  std::uint64_t h = mix64(root ^ 0x5eed5eed5eed5eedULL);
  for (const auto& step : path) {
    h = mix64(h ^ fnv1a64(step.label));
    // Rotating before the index keeps (label, index) pairs from cancelling.
    h = mix64(((h << 17) | (h >> 47)) ^ step.index);
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<SeedLabel> path) {
  return derive_seed(root, std::span<const SeedLabel>(path.begin(), path.size()));
}

}  // namespace vlprobe
