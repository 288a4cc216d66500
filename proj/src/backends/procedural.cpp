#include "vlprobe/backends/procedural.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

#include "vlprobe/core/error.hpp"
#include "vlprobe/core/seed.hpp"

namespace vlprobe {

namespace {

constexpr std::string_view kObjectPrefix = "a photo of a single and fully visible ";

std::string category_key(const std::string& prompt) {
  if (prompt.rfind(kObjectPrefix, 0) == 0) return prompt.substr(kObjectPrefix.size());
  return prompt;
}

struct ShapeParams {
  double cx, cy;    // pixels
  double ax, ay;    // semi-axes, pixels
  double exponent;  // superellipse exponent
  double hue;       // [0, 1)
  int stripe;       // stripe period in pixels, 0 for none
};

ShapeParams shape_for(const GenerationRequest& r) {
  const auto key = fnv1a64(category_key(r.prompt));
  constexpr std::array<double, 4> kExponents = {3.0, 4.0, 5.0, 8.0};
  ShapeParams s{};
  s.exponent = kExponents[key % 4];
  const double base_aspect = 0.65 + 0.85 * static_cast<double>((key >> 8) & 0xff) / 255.0;
  s.hue = static_cast<double>((key >> 16) & 0xffff) / 65536.0;
  constexpr std::array<int, 4> kStripes = {0, 6, 10, 16};
  s.stripe = kStripes[(key >> 32) % 4];

  SeededRng rng(mix64(key ^ mix64(r.seed)));
  const double aspect = base_aspect * rng.uniform(0.9, 1.1);
  const double extent = rng.uniform(0.55, 0.8);
  const double w = r.width, h = r.height;
  if (aspect >= 1.0) {
    s.ax = 0.5 * extent * w;
    s.ay = s.ax / aspect;
  } else {
    s.ay = 0.5 * extent * h;
    s.ax = s.ay * aspect;
  }
  s.cx = 0.5 * w + rng.uniform(-0.05, 0.05) * w;
  s.cy = 0.5 * h + rng.uniform(-0.05, 0.05) * h;
  return s;
}

bool inside(const ShapeParams& s, int x, int y) {
  const double dx = std::abs((x + 0.5 - s.cx) / s.ax);
  const double dy = std::abs((y + 0.5 - s.cy) / s.ay);
  return std::pow(dx, s.exponent) + std::pow(dy, s.exponent) <= 1.0;
}

Rgba hsv(double h, double sat, double val) {
  const double hh = std::fmod(h, 1.0) * 6.0;
  const int sector = static_cast<int>(hh);
  const double f = hh - sector;
  const double p = val * (1 - sat), q = val * (1 - sat * f), t = val * (1 - sat * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (sector % 6) {
    case 0: r = val, g = t, b = p; break;
    case 1: r = q, g = val, b = p; break;
    case 2: r = p, g = val, b = t; break;
    case 3: r = p, g = q, b = val; break;
    case 4: r = t, g = p, b = val; break;
    default: r = val, g = p, b = q; break;
  }
  auto to8 = [](double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); };
  return {to8(r), to8(g), to8(b), 255};
}

double lattice(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
  const auto h = mix64(seed ^ mix64(static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL ^
                                    static_cast<std::uint64_t>(iy)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  auto smooth = [](double t) { return t * t * (3 - 2 * t); };
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double a = lattice(seed, ix, iy), b = lattice(seed, ix + 1, iy);
  const double c = lattice(seed, ix, iy + 1), d = lattice(seed, ix + 1, iy + 1);
  return (a + (b - a) * tx) + ((c + (d - c) * tx) - (a + (b - a) * tx)) * ty;
}

Embedding normalized(Embedding v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

Embedding embed_text(const std::string& text, int dim) {
  Embedding v(static_cast<std::size_t>(dim), 0.0);
  std::istringstream in(text);
  std::string tok;
  bool any = false;
  while (in >> tok) {
    for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    SeededRng rng(fnv1a64(tok));
    for (auto& x : v) x += rng.uniform(-1.0, 1.0);
    any = true;
  }
  if (!any) v[0] = 1.0;
  return normalized(std::move(v));
}

Embedding embed_image(const RasterImage& img, int dim) {
  constexpr int kGrid = 4;
  std::array<double, kGrid * kGrid * 4> pooled{};
  std::array<double, kGrid * kGrid> counts{};
  for (int y = 0; y < img.height(); ++y) {
    const int gy = y * kGrid / img.height();
    for (int x = 0; x < img.width(); ++x) {
      const int gx = x * kGrid / img.width();
      const auto c = img.at(x, y);
      const auto cell = static_cast<std::size_t>(gy * kGrid + gx);
      pooled[cell * 4 + 0] += c.r;
      pooled[cell * 4 + 1] += c.g;
      pooled[cell * 4 + 2] += c.b;
      pooled[cell * 4 + 3] += c.a;
      counts[cell] += 1.0;
    }
  }
  Embedding v(static_cast<std::size_t>(dim), 1e-3);
  SeededRng proj(0x1ea5edULL);
  for (std::size_t f = 0; f < pooled.size(); ++f) {
    const double feat = counts[f / 4] > 0 ? pooled[f] / (255.0 * counts[f / 4]) - 0.5 : 0.0;
    for (auto& x : v) x += feat * proj.uniform(-1.0, 1.0);
  }
  return normalized(std::move(v));
}

}  // namespace

BinaryMask ProceduralBackend::painted_alpha(const GenerationRequest& request) {
  const auto s = shape_for(request);
  BinaryMask m(request.width, request.height);
  for (int y = 0; y < request.height; ++y) {
    for (int x = 0; x < request.width; ++x) {
      if (inside(s, x, y)) m.set(x, y);
    }
  }
  return m;
}

RasterImage ProceduralBackend::generate(const GenerationRequest& request) {
  if (request.prompt.empty()) throw PreconditionError("generation prompt must not be empty");
  const auto s = shape_for(request);
  const auto alpha = painted_alpha(request);
  RasterImage img(request.width, request.height);
  for (int y = 0; y < request.height; ++y) {
    for (int x = 0; x < request.width; ++x) {
      if (alpha.test(x, y)) {
        double shade = 0.85 - 0.25 * std::hypot((x + 0.5 - s.cx) / s.ax, (y + 0.5 - s.cy) / s.ay) / 1.5;
        if (s.stripe > 0 && ((x + y) / s.stripe) % 2 == 1) shade -= 0.15;
        img.set(x, y, hsv(s.hue, 0.8, std::max(0.55, shade)));
      } else {
        const auto g = static_cast<std::uint8_t>(
            70 + static_cast<int>(lattice(request.seed, x / 8, y / 8) * 120.0));
        img.set(x, y, {g, g, g, 255});
      }
    }
  }
  return img;
}

SegmentationResult ProceduralBackend::segment(const RasterImage& image, const std::string& category) {
  BinaryMask m(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const auto c = image.at(x, y);
      if (c.a != 0 && (c.r != c.g || c.g != c.b)) m.set(x, y);
    }
  }
  const auto box = m.bounds();
  if (!box) throw BackendError("no instance of '" + category + "' found", std::nullopt, "not_found");
  return {std::move(m), *box, 1.0};
}

RasterImage ProceduralBackend::inpaint(const RasterImage& image, const BinaryMask& mask, const std::string& prompt,
                                       std::uint64_t seed) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw PreconditionError("inpaint mask dimensions differ from the image");
  }
  const auto key = fnv1a64(prompt);
  const Rgba lo = hsv(static_cast<double>(key & 0xffff) / 65536.0, 0.45, 0.35);
  const Rgba hi = hsv(static_cast<double>((key >> 16) & 0xffff) / 65536.0, 0.35, 0.9);
  const auto noise_seed = mix64(seed ^ key);
  RasterImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!mask.test(x, y)) continue;
      const double t = 0.7 * value_noise(noise_seed, x / 48.0, y / 48.0) +
                       0.3 * value_noise(noise_seed + 1, x / 9.0, y / 9.0);
      auto lerp = [t](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround(a + (b - a) * t));
      };
      out.set(x, y, {lerp(lo.r, hi.r), lerp(lo.g, hi.g), lerp(lo.b, hi.b), 255});
    }
  }
  return out;
}

std::vector<Embedding> ProceduralBackend::embed(std::span<const EmbedItem> items) {
  std::vector<Embedding> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    if (const auto* text = std::get_if<std::string>(&item)) {
      out.push_back(embed_text(*text, opts_.embedding_dim));
    } else {
      out.push_back(embed_image(std::get<RasterImage>(item), opts_.embedding_dim));
    }
  }
  return out;
}

}  // namespace vlprobe
