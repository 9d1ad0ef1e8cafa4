#include "png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "scpa/error.hpp"

namespace scpa::detail {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr file(std::fopen(path.string().c_str(), mode));
  if (!file) {
    throw IoError("cannot open " + path.string());
  }
  return file;
}

// libpng reports errors through a callback that must not return; the
// message is stashed and control longjmps back to the setjmp below.
void on_error(png_structp png, png_const_charp msg) {
  auto* out = static_cast<std::string*>(png_get_error_ptr(png));
  if (out) *out = msg;
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

struct ReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  png_infop end = nullptr;

  ~ReadState() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, end ? &end : nullptr);
  }
};

struct WriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;

  ~WriteState() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

void collect_text(png_structp png, png_infop info, PngText& out) {
  png_textp text = nullptr;
  int count = 0;
  png_get_text(png, info, &text, &count);
  for (int i = 0; i < count; ++i) {
    if (text[i].key && text[i].text) {
      out[text[i].key] = text[i].text;
    }
  }
}

void write_common(const std::filesystem::path& path, std::size_t width,
                  std::size_t height, int bit_depth, int color_type,
                  const PngText& text, const std::vector<png_bytep>& rows,
                  bool swap16) {
  if (width == 0 || height == 0) {
    throw DataError("refusing to write empty raster " + path.string());
  }
  auto file = open_file(path, "wb");
  WriteState state;
  std::string errmsg;
  state.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &errmsg, on_error,
                                      on_warning);
  if (!state.png) throw IoError("png_create_write_struct failed");
  state.info = png_create_info_struct(state.png);
  if (!state.info) throw IoError("png_create_info_struct failed");

  std::vector<png_text> chunks(text.size());
  std::size_t i = 0;
  for (const auto& [key, value] : text) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = const_cast<char*>(key.c_str());
    chunks[i].text = const_cast<char*>(value.c_str());
    chunks[i].text_length = value.size();
    ++i;
  }

  if (setjmp(png_jmpbuf(state.png))) {
    throw IoError("failed writing " + path.string() + ": " + errmsg);
  }
  png_init_io(state.png, file.get());
  png_set_IHDR(state.png, state.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (!chunks.empty()) {
    png_set_text(state.png, state.info, chunks.data(), static_cast<int>(chunks.size()));
  }
  png_write_info(state.png, state.info);
  if (swap16) png_set_swap(state.png);
  png_write_image(state.png, const_cast<png_bytepp>(rows.data()));
  png_write_end(state.png, state.info);
}

}  // namespace

PngFile read_png(const std::filesystem::path& path) {
  auto file = open_file(path, "rb");
  ReadState state;
  std::string errmsg;
  state.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &errmsg, on_error,
                                     on_warning);
  if (!state.png) throw IoError("png_create_read_struct failed");
  state.info = png_create_info_struct(state.png);
  state.end = png_create_info_struct(state.png);
  if (!state.info || !state.end) throw IoError("png_create_info_struct failed");

  PngFile result;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(state.png))) {
    throw IoError("failed reading " + path.string() + ": " + errmsg);
  }

  png_init_io(state.png, file.get());
  png_read_info(state.png, state.info);

  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  png_get_IHDR(state.png, state.info, &width, &height, &bit_depth, &color_type,
               nullptr, nullptr, nullptr);

  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(state.png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(state.png);
  }
  if (png_get_valid(state.png, state.info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(state.png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA ||
      png_get_valid(state.png, state.info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(state.png);
  }
  // Color images are used at 8 bits; only grayscale keeps 16-bit precision.
  if (bit_depth == 16 && (color_type & PNG_COLOR_MASK_COLOR ||
                          color_type == PNG_COLOR_TYPE_PALETTE)) {
    png_set_strip_16(state.png);
  }
  if (bit_depth == 16 && color_type == PNG_COLOR_TYPE_GRAY) {
    png_set_swap(state.png);  // network order -> host little endian
  }
  png_read_update_info(state.png, state.info);

  const int out_color = png_get_color_type(state.png, state.info);
  const int out_depth = png_get_bit_depth(state.png, state.info);
  const std::size_t rowbytes = png_get_rowbytes(state.png, state.info);

  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = buffer.data() + y * rowbytes;
  }
  png_read_image(state.png, rows.data());
  png_read_end(state.png, state.end);

  collect_text(state.png, state.info, result.text);
  collect_text(state.png, state.end, result.text);

  const std::size_t w = width, h = height;
  if (out_color == PNG_COLOR_TYPE_GRAY && out_depth == 8) {
    Grid<std::uint8_t> grid(w, h);
    for (std::size_t y = 0; y < h; ++y) {
      std::copy_n(buffer.data() + y * rowbytes, w, &grid.at(0, y));
    }
    result.pixels = std::move(grid);
  } else if (out_color == PNG_COLOR_TYPE_GRAY && out_depth == 16) {
    Grid<std::uint16_t> grid(w, h);
    for (std::size_t y = 0; y < h; ++y) {
      const auto* row = reinterpret_cast<const std::uint16_t*>(buffer.data() + y * rowbytes);
      std::copy_n(row, w, &grid.at(0, y));
    }
    result.pixels = std::move(grid);
  } else if (out_color == PNG_COLOR_TYPE_RGB && out_depth == 8) {
    Grid<Rgb> grid(w, h);
    for (std::size_t y = 0; y < h; ++y) {
      const auto* row = buffer.data() + y * rowbytes;
      for (std::size_t x = 0; x < w; ++x) {
        grid.at(x, y) = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
      }
    }
    result.pixels = std::move(grid);
  } else {
    throw IoError(path.string() + ": unsupported PNG layout (color type " +
                  std::to_string(out_color) + ", depth " + std::to_string(out_depth) +
                  ")");
  }
  return result;
}

void write_png(const std::filesystem::path& path, const Grid<std::uint8_t>& pixels,
               const PngText& text) {
  std::vector<png_bytep> rows(pixels.height());
  auto* base = const_cast<std::uint8_t*>(pixels.cells().data());
  for (std::size_t y = 0; y < pixels.height(); ++y) {
    rows[y] = base + y * pixels.width();
  }
  write_common(path, pixels.width(), pixels.height(), 8, PNG_COLOR_TYPE_GRAY, text,
               rows, false);
}

void write_png(const std::filesystem::path& path, const Grid<std::uint16_t>& pixels,
               const PngText& text) {
  std::vector<png_bytep> rows(pixels.height());
  auto* base = reinterpret_cast<png_bytep>(
      const_cast<std::uint16_t*>(pixels.cells().data()));
  for (std::size_t y = 0; y < pixels.height(); ++y) {
    rows[y] = base + y * pixels.width() * 2;
  }
  write_common(path, pixels.width(), pixels.height(), 16, PNG_COLOR_TYPE_GRAY, text,
               rows, true);
}

void write_png(const std::filesystem::path& path, const Grid<Rgb>& pixels,
               const PngText& text) {
  static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed for row access");
  std::vector<png_bytep> rows(pixels.height());
  auto* base =
      reinterpret_cast<png_bytep>(const_cast<Rgb*>(pixels.cells().data()));
  for (std::size_t y = 0; y < pixels.height(); ++y) {
    rows[y] = base + y * pixels.width() * 3;
  }
  write_common(path, pixels.width(), pixels.height(), 8, PNG_COLOR_TYPE_RGB, text,
               rows, false);
}

}  // namespace scpa::detail
