#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "scpa/grid.hpp"
#include "scpa/land_class.hpp"

namespace scpa {

/// Change-type code; 0 is always "no change".
using ChangeCode = std::uint16_t;

inline constexpr ChangeCode kNoChange = 0;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

using Image = Grid<Rgb>;

/// Identifies the codec a change raster was produced with: the class count
/// and the code-ordering convention. Stored alongside change rasters so a
/// file can be validated against the codec used to read it.
struct CodecInfo {
  std::uint32_t class_count = 0;
  std::string ordering = "lex-src-dst";

  std::uint32_t n_types() const {
    return class_count * class_count - class_count + 1;
  }

  friend bool operator==(const CodecInfo&, const CodecInfo&) = default;
};

/// Per-pixel land-class IDs plus the class set they index into.
/// Every pixel value is validated to be < classes.count().
class LabelRaster {
 public:
  LabelRaster(Grid<ClassId> pixels, LandClassSet classes);

  const Grid<ClassId>& pixels() const { return pixels_; }
  const LandClassSet& classes() const { return classes_; }
  std::size_t width() const { return pixels_.width(); }
  std::size_t height() const { return pixels_.height(); }

  friend bool operator==(const LabelRaster&, const LabelRaster&) = default;

 private:
  Grid<ClassId> pixels_;
  LandClassSet classes_;
};

/// Per-pixel change-type codes plus the codec metadata that defines them.
/// Every pixel value is validated to be < codec.n_types().
class ChangeRaster {
 public:
  ChangeRaster(Grid<ChangeCode> codes, CodecInfo codec);

  const Grid<ChangeCode>& codes() const { return codes_; }
  const CodecInfo& codec() const { return codec_; }
  std::size_t width() const { return codes_.width(); }
  std::size_t height() const { return codes_.height(); }

  friend bool operator==(const ChangeRaster&, const ChangeRaster&) = default;

 private:
  Grid<ChangeCode> codes_;
  CodecInfo codec_;
};

}  // namespace scpa
