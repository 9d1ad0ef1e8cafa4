#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scpa/land_class.hpp"
#include "scpa/raster.hpp"

namespace scpa {

struct PaletteEntry {
  ClassId id = 0;
  Rgb color;
  std::string name;
};

/// Bidirectional class-ID <-> RGB mapping for reading and writing
/// human-readable label images. IDs must be dense 0..L-1 and colors
/// pairwise distinct; matching is exact, never nearest-color.
class Palette {
 public:
  explicit Palette(std::vector<PaletteEntry> entries);

  std::uint32_t size() const { return static_cast<std::uint32_t>(entries_.size()); }
  const Rgb& color(ClassId id) const;
  std::optional<ClassId> id_for(Rgb color) const;
  const std::vector<PaletteEntry>& entries() const { return entries_; }
  LandClassSet classes() const;

 private:
  std::vector<PaletteEntry> entries_;
};

/// The seven SCPA-WC land classes with pure-hue colors. The annotation
/// palette of a given dataset may differ; load one from a file to override.
Palette default_palette();

/// Plain-text palette file: one `id r g b name` line per class, `#` comments
/// and blank lines ignored.
Palette load_palette(const std::filesystem::path& path);
void save_palette(const Palette& palette, const std::filesystem::path& path);

}  // namespace scpa
