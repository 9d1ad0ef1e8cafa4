#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scpa/change_codec.hpp"
#include "scpa/palette.hpp"
#include "scpa/raster.hpp"

namespace scpa {

/// Label rasters on disk are 8-bit grayscale PNGs of class IDs, or RGB PNGs
/// decoded through a palette with exact color matching.
LabelRaster load_label_raster(const std::filesystem::path& path,
                              const LandClassSet& classes);
LabelRaster load_label_raster(const std::filesystem::path& path,
                              const Palette& palette);

enum class LabelSaveMode { kIds, kColored };

/// kIds writes 8-bit grayscale (requires L <= 256); kColored writes RGB
/// through the palette.
void save_label_raster(const LabelRaster& raster, const std::filesystem::path& path,
                       LabelSaveMode mode = LabelSaveMode::kIds,
                       const Palette* palette = nullptr);

/// Change rasters are 16-bit grayscale PNGs; the class count and code
/// ordering travel in tEXt chunks and are checked against the codec on load.
void save_change_raster(const ChangeRaster& raster,
                        const std::filesystem::path& path);
ChangeRaster load_change_raster(const std::filesystem::path& path,
                                const ChangeCodec& codec);

/// Source imagery: 24-bit RGB PNG (8-bit grayscale is promoted to RGB).
Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

/// Deterministic distinct color per change type; code 0 is always black.
class ColorScheme {
 public:
  explicit ColorScheme(std::uint32_t n_types);

  Rgb color(ChangeCode code) const;
  std::uint32_t size() const { return static_cast<std::uint32_t>(colors_.size()); }

 private:
  std::vector<Rgb> colors_;
};

struct LegendRow {
  ChangeCode code = 0;
  std::string src_name;  // "-" for no-change
  std::string dst_name;
  Rgb color;
};

struct ChangeRender {
  Image image;
  std::vector<LegendRow> legend;  // one row per code present, ascending
};

ChangeRender render_change_map(const ChangeRaster& raster,
                               const LandClassSet& classes);
ChangeRender render_change_map(const ChangeRaster& raster,
                               const LandClassSet& classes,
                               const ColorScheme& scheme);

std::string legend_csv(const std::vector<LegendRow>& legend);

/// Writes the render image plus a `<stem>.legend.csv` sidecar next to it.
void save_render(const ChangeRender& render, const std::filesystem::path& image_path);

}  // namespace scpa
