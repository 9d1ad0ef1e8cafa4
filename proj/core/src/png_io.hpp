#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "scpa/grid.hpp"
#include "scpa/raster.hpp"

namespace scpa::detail {

using PngText = std::map<std::string, std::string>;

/// Decoded PNG, normalized to one of the three raster formats the toolkit
/// uses: 8-bit gray (class IDs), 16-bit gray (change codes), 8-bit RGB.
/// Paletted and alpha images are folded into RGB; sub-byte gray is expanded.
struct PngFile {
  std::variant<Grid<std::uint8_t>, Grid<std::uint16_t>, Grid<Rgb>> pixels;
  PngText text;
};

PngFile read_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Grid<std::uint8_t>& pixels,
               const PngText& text = {});
void write_png(const std::filesystem::path& path, const Grid<std::uint16_t>& pixels,
               const PngText& text = {});
void write_png(const std::filesystem::path& path, const Grid<Rgb>& pixels,
               const PngText& text = {});

}  // namespace scpa::detail
