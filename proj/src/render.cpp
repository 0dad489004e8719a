#include <png.h>

#include <algorithm>
#include <array>
#include <csetjmp>
#include <string>

#include "tribound/boundary.hpp"
#include "tribound/error.hpp"

namespace tribound {

namespace {

constexpr std::array<std::uint32_t, 20> kTab20 = {
    0x1f77b4, 0xaec7e8, 0xff7f0e, 0xffbb78, 0x2ca02c, 0x98df8a, 0xd62728,
    0xff9896, 0x9467bd, 0xc5b0d5, 0x8c564b, 0xc49c94, 0xe377c2, 0xf7b6d2,
    0x7f7f7f, 0xc7c7c7, 0xbcbd22, 0xdbdb8d, 0x17becf, 0x9edae5};

}  // namespace

std::vector<Rgb> default_palette(std::size_t n_classes) {
  std::vector<Rgb> out;
  out.reserve(n_classes);
  for (std::size_t m = 0; m < n_classes; ++m) {
    const std::uint32_t hex = kTab20[m % kTab20.size()];
    const std::size_t wrap = m / kTab20.size();
    const double factor = std::max(0.4, 1.0 - 0.15 * static_cast<double>(wrap));
    auto channel = [&](int shift) {
      const double v = static_cast<double>((hex >> shift) & 0xff) * factor;
      // Never collapse onto the marker colour.
      return static_cast<std::uint8_t>(std::max(1.0, v));
    };
    out.push_back({channel(16), channel(8), channel(0)});
  }
  return out;
}

Image rasterize(const BoundaryMap& map, std::span<const Rgb> palette,
                std::size_t scale) {
  if (palette.size() < map.n_classes) {
    throw PaletteTooSmall("palette has " + std::to_string(palette.size()) +
                          " colours for " + std::to_string(map.n_classes) +
                          " classes");
  }
  scale = std::max<std::size_t>(1, scale);
  Image img;
  img.width = img.height = map.density * scale;
  img.rgb.resize(img.width * img.height * 3);

  auto put = [&](std::size_t x, std::size_t y, Rgb c) {
    const std::size_t i = 3 * (y * img.width + x);
    img.rgb[i] = c.r;
    img.rgb[i + 1] = c.g;
    img.rgb[i + 2] = c.b;
  };

  for (std::size_t row = 0; row < map.density; ++row) {
    for (std::size_t col = 0; col < map.density; ++col) {
      const Rgb c = palette[map.at(row, col)];
      for (std::size_t dy = 0; dy < scale; ++dy) {
        for (std::size_t dx = 0; dx < scale; ++dx) {
          put(col * scale + dx, row * scale + dy, c);
        }
      }
    }
  }

  for (const Point2& anchor : map.anchor_coords) {
    const auto [row, col] = nearest_cell(map, anchor);
    const auto cx = static_cast<std::ptrdiff_t>(col * scale + scale / 2);
    const auto cy = static_cast<std::ptrdiff_t>(row * scale + scale / 2);
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const auto x = cx + dx;
        const auto y = cy + dy;
        if (x < 0 || y < 0 || x >= static_cast<std::ptrdiff_t>(img.width) ||
            y >= static_cast<std::ptrdiff_t>(img.height)) {
          continue;
        }
        put(static_cast<std::size_t>(x), static_cast<std::size_t>(y), kMarkerColor);
      }
    }
  }
  return img;
}

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void ignore_flush(png_structp) {}

void ignore_warning(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, ignore_warning);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encoding failed");
  }
  {
    png_set_write_fn(png, &out, append_bytes, ignore_flush);
    png_set_compression_level(png, 9);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < image.height; ++y) {
      png_write_row(png, const_cast<png_bytep>(image.rgb.data() + 3 * y * image.width));
    }
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

std::vector<std::uint8_t> render_image(const BoundaryMap& map,
                                       std::span<const Rgb> palette,
                                       std::size_t scale) {
  return encode_png(rasterize(map, palette, scale));
}

}  // namespace tribound
