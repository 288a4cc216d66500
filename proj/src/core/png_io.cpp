#include "vlprobe/core/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "vlprobe/core/error.hpp"

namespace vlprobe {

namespace {

std::vector<std::uint8_t> encode(png_uint_32 w, png_uint_32 h, png_uint_32 format, const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = w;
  image.height = h;
  image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, data, 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

struct Decoded {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  std::vector<std::uint8_t> data;
};

Decoded decode(std::span<const std::uint8_t> bytes, png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw ValidationError(std::string("PNG decode failed: ") + image.message);
  }
  image.format = format;
  Decoded d{image.width, image.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(image))};
  if (!png_image_finish_read(&image, nullptr, d.data.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ValidationError(std::string("PNG decode failed: ") + image.message);
  }
  return d;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  return encode(static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()),
                PNG_FORMAT_RGBA, img.bytes().data());
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  auto d = decode(bytes, PNG_FORMAT_RGBA);
  return RasterImage(static_cast<int>(d.width), static_cast<int>(d.height), std::move(d.data));
}

std::vector<std::uint8_t> encode_mask_png(const BinaryMask& mask) {
  std::vector<std::uint8_t> gray(mask.bits().size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.bits()[i] ? 255 : 0;
  return encode(static_cast<png_uint_32>(mask.width()), static_cast<png_uint_32>(mask.height()),
                PNG_FORMAT_GRAY, gray.data());
}

BinaryMask decode_mask_png(std::span<const std::uint8_t> bytes) {
  auto d = decode(bytes, PNG_FORMAT_GRAY);
  return BinaryMask(static_cast<int>(d.width), static_cast<int>(d.height), std::move(d.data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace vlprobe
