#include "surgq/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

namespace surgq {

namespace fs = std::filesystem;

namespace {

struct PngErrorState {
  char message[256] = {};
};

void png_error_cb(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

struct MemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t length) {
  auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (r->offset + length > r->size) png_error(png, "truncated PNG stream");
  std::memcpy(out, r->data + r->offset, length);
  r->offset += length;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_cb(png_structp) {}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> pixels;  // 16-bit samples are host-endian uint16
};

enum class PngTarget { keep_gray, to_rgb };

DecodedPng decode_png(std::span<const std::uint8_t> bytes, PngTarget target) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(Errc::parse_error, "not a PNG stream");
  }
  PngErrorState err;
  MemoryReader reader{bytes.data(), bytes.size(), 0};
  DecodedPng out;
  std::vector<png_bytep> rows;

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_cb, png_warning_cb);
  if (!png) throw Error(Errc::io_error, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(Errc::io_error, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Errc::parse_error, std::string("PNG decode: ") + err.message);
  }
  png_set_read_fn(png, &reader, png_read_cb);
  png_read_info(png, info);

  const auto color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (target == PngTarget::to_rgb) {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (depth == 16) png_set_strip_16(png);
    if (depth < 8) png_set_packing(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
  } else {
    if (color != PNG_COLOR_TYPE_GRAY) png_error(png, "expected a single-channel gray PNG");
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_swap(png);  // PNG is big-endian; hand back host order
  }
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.pixels.resize(stride * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = out.pixels.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

Bytes encode_png(const std::uint8_t* pixels, int width, int height, int color_type, int bit_depth,
                 std::size_t stride) {
  PngErrorState err;
  Bytes out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_cb, png_warning_cb);
  if (!png) throw Error(Errc::io_error, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(Errc::io_error, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::io_error, std::string("PNG encode: ") + err.message);
  }
  png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(pixels + stride * static_cast<std::size_t>(y));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  data.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i] = fill.r;
    data[i + 1] = fill.g;
    data[i + 2] = fill.b;
  }
}

RgbImage render_class_map(const ClassMap& map) {
  RgbImage img(map.width(), map.height());
  const auto labels = map.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Rgb c = palette_color(static_cast<ClassId>(labels[i]));
    img.data[3 * i] = c.r;
    img.data[3 * i + 1] = c.g;
    img.data[3 * i + 2] = c.b;
  }
  return img;
}

RgbImage resize_to_width(const RgbImage& image, int width) {
  if (width < 1 || image.width < 1) throw Error(Errc::invalid_argument, "resize to empty width");
  const int height = std::max(1, static_cast<int>((static_cast<long long>(image.height) * width + image.width / 2) / image.width));
  RgbImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>(static_cast<long long>(y) * image.height / height);
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>(static_cast<long long>(x) * image.width / width);
      out.set_pixel(x, y, image.pixel(sx, sy));
    }
  }
  return out;
}

Bytes encode_class_map_png(const ClassMap& map) {
  const auto labels = map.labels();
  return encode_png(labels.data(), map.width(), map.height(), PNG_COLOR_TYPE_GRAY, 8,
                    static_cast<std::size_t>(map.width()));
}

ClassMap decode_class_map_png(std::span<const std::uint8_t> png) {
  auto img = decode_png(png, PngTarget::keep_gray);
  if (img.bit_depth != 8) throw Error(Errc::parse_error, "class map PNG must be 8-bit");
  return ClassMap(img.width, img.height, std::move(img.pixels));
}

Bytes encode_section_mask_png(const SectionMask& mask) {
  const auto ids = mask.ids();
  return encode_png(reinterpret_cast<const std::uint8_t*>(ids.data()), mask.width(), mask.height(),
                    PNG_COLOR_TYPE_GRAY, 16, static_cast<std::size_t>(mask.width()) * 2);
}

SectionMask decode_section_mask_png(std::span<const std::uint8_t> png) {
  auto img = decode_png(png, PngTarget::keep_gray);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  std::vector<std::uint16_t> ids(n);
  if (img.bit_depth == 16) {
    std::memcpy(ids.data(), img.pixels.data(), n * 2);
  } else {
    for (std::size_t i = 0; i < n; ++i) ids[i] = img.pixels[i];
  }
  return SectionMask(img.width, img.height, std::move(ids));
}

Bytes encode_rgb_png(const RgbImage& image) {
  return encode_png(image.data.data(), image.width, image.height, PNG_COLOR_TYPE_RGB, 8,
                    static_cast<std::size_t>(image.width) * 3);
}

RgbImage decode_rgb_png(std::span<const std::uint8_t> png) {
  auto img = decode_png(png, PngTarget::to_rgb);
  if (img.channels != 3) throw Error(Errc::parse_error, "could not convert PNG to RGB");
  RgbImage out;
  out.width = img.width;
  out.height = img.height;
  out.data = std::move(img.pixels);
  return out;
}

Bytes encode_mask_png(std::span<const std::uint8_t> mask, int width, int height) {
  std::vector<std::uint8_t> scaled(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) scaled[i] = mask[i] ? 255 : 0;
  return encode_png(scaled.data(), width, height, PNG_COLOR_TYPE_GRAY, 8, static_cast<std::size_t>(width));
}

std::vector<std::uint8_t> decode_mask_png(std::span<const std::uint8_t> png, int& width, int& height) {
  auto img = decode_png(png, PngTarget::to_rgb);
  width = img.width;
  height = img.height;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = (img.pixels[3 * i] | img.pixels[3 * i + 1] | img.pixels[3 * i + 2]) ? 1 : 0;
  }
  return mask;
}

Bytes encode_jpeg(const RgbImage& image, int quality) {
  jpeg_compress_struct cinfo{};
  jpeg_error_mgr jerr{};
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width);
  cinfo.image_height = static_cast<JDIMENSION>(image.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(image.data.data() + stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  Bytes out(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingAsset(path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, bytes);
  fs::rename(tmp, path);
}

ClassMap read_class_map(const fs::path& path) { return decode_class_map_png(read_file(path)); }
void write_class_map(const fs::path& path, const ClassMap& map) { write_file(path, encode_class_map_png(map)); }
SectionMask read_section_mask(const fs::path& path) { return decode_section_mask_png(read_file(path)); }
void write_section_mask(const fs::path& path, const SectionMask& mask) {
  write_file(path, encode_section_mask_png(mask));
}
RgbImage read_rgb(const fs::path& path) { return decode_rgb_png(read_file(path)); }
void write_rgb(const fs::path& path, const RgbImage& image) { write_file(path, encode_rgb_png(image)); }

}  // namespace surgq
