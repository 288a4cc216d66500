#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vlprobe/core/raster.hpp"

namespace vlprobe {

/// RGBA PNG. Output bytes are deterministic for identical input.
std::vector<std::uint8_t> encode_png(const RasterImage& img);
RasterImage decode_png(std::span<const std::uint8_t> bytes);

/// Single-channel PNG with values 0 / 255.
std::vector<std::uint8_t> encode_mask_png(const BinaryMask& mask);
/// Any nonzero gray level decodes as set.
BinaryMask decode_mask_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline void write_png(const std::filesystem::path& p, const RasterImage& img) { write_file(p, encode_png(img)); }
inline RasterImage read_png(const std::filesystem::path& p) { return decode_png(read_file(p)); }
inline void write_mask_png(const std::filesystem::path& p, const BinaryMask& m) { write_file(p, encode_mask_png(m)); }
inline BinaryMask read_mask_png(const std::filesystem::path& p) { return decode_mask_png(read_file(p)); }

}  // namespace vlprobe
