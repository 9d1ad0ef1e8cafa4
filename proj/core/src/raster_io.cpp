#include "scpa/raster_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "png_io.hpp"
#include "scpa/error.hpp"

namespace scpa {

namespace {

constexpr const char* kClassCountKey = "scpa-class-count";
constexpr const char* kOrderingKey = "scpa-ordering";

LabelRaster ids_to_raster(const Grid<std::uint8_t>& ids, const LandClassSet& classes,
                          const std::filesystem::path& path) {
  Grid<ClassId> pixels(ids.width(), ids.height());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    pixels[i] = ids[i];
  }
  try {
    return LabelRaster(std::move(pixels), classes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

LabelRaster rgb_to_raster(const Grid<Rgb>& rgb, const Palette& palette,
                          const std::filesystem::path& path) {
  Grid<ClassId> pixels(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const Rgb c = rgb[i];
    const auto id = palette.id_for(c);
    if (!id) {
      throw DataError(path.string() + ": color (" + std::to_string(c.r) + ", " +
                      std::to_string(c.g) + ", " + std::to_string(c.b) +
                      ") at pixel (" + std::to_string(i % rgb.width()) + ", " +
                      std::to_string(i / rgb.width()) + ") not in palette");
    }
    pixels[i] = *id;
  }
  return LabelRaster(std::move(pixels), palette.classes());
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

Rgb hsv_to_rgb(double hue, double sat, double val) {
  const double c = val * sat;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c, g = x;
  } else if (hp < 2) {
    r = x, g = c;
  } else if (hp < 3) {
    g = c, b = x;
  } else if (hp < 4) {
    g = x, b = c;
  } else if (hp < 5) {
    r = x, b = c;
  } else {
    r = c, b = x;
  }
  const double m = val - c;
  auto byte = [m](double v) {
    return static_cast<std::uint8_t>(std::lround((v + m) * 255.0));
  };
  return {byte(r), byte(g), byte(b)};
}

}  // namespace

LabelRaster load_label_raster(const std::filesystem::path& path,
                              const LandClassSet& classes) {
  auto png = detail::read_png(path);
  if (const auto* ids = std::get_if<Grid<std::uint8_t>>(&png.pixels)) {
    return ids_to_raster(*ids, classes, path);
  }
  if (std::holds_alternative<Grid<Rgb>>(png.pixels)) {
    throw DataError(path.string() + ": RGB label image needs a palette to decode");
  }
  throw DataError(path.string() +
                  ": 16-bit grayscale holds change codes, not class IDs");
}

LabelRaster load_label_raster(const std::filesystem::path& path,
                              const Palette& palette) {
  auto png = detail::read_png(path);
  if (const auto* rgb = std::get_if<Grid<Rgb>>(&png.pixels)) {
    return rgb_to_raster(*rgb, palette, path);
  }
  if (const auto* ids = std::get_if<Grid<std::uint8_t>>(&png.pixels)) {
    return ids_to_raster(*ids, palette.classes(), path);
  }
  throw DataError(path.string() +
                  ": 16-bit grayscale holds change codes, not class IDs");
}

void save_label_raster(const LabelRaster& raster, const std::filesystem::path& path,
                       LabelSaveMode mode, const Palette* palette) {
  if (mode == LabelSaveMode::kIds) {
    if (raster.classes().count() > 256) {
      throw DataError("cannot save " + std::to_string(raster.classes().count()) +
                      " classes as 8-bit IDs");
    }
    Grid<std::uint8_t> ids(raster.width(), raster.height());
    const auto pixels = raster.pixels().cells();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      ids[i] = static_cast<std::uint8_t>(pixels[i]);
    }
    detail::write_png(path, ids);
    return;
  }
  if (!palette) {
    throw DataError("colored label output needs a palette");
  }
  if (palette->size() < raster.classes().count()) {
    throw DataError("palette has " + std::to_string(palette->size()) +
                    " entries but raster uses " +
                    std::to_string(raster.classes().count()) + " classes");
  }
  Grid<Rgb> rgb(raster.width(), raster.height());
  const auto pixels = raster.pixels().cells();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    rgb[i] = palette->color(pixels[i]);
  }
  detail::write_png(path, rgb);
}

void save_change_raster(const ChangeRaster& raster,
                        const std::filesystem::path& path) {
  Grid<std::uint16_t> codes(raster.width(), raster.height());
  const auto cells = raster.codes().cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    codes[i] = cells[i];
  }
  detail::write_png(path, codes,
                    {{kClassCountKey, std::to_string(raster.codec().class_count)},
                     {kOrderingKey, raster.codec().ordering}});
}

ChangeRaster load_change_raster(const std::filesystem::path& path,
                                const ChangeCodec& codec) {
  auto png = detail::read_png(path);
  const auto* codes16 = std::get_if<Grid<std::uint16_t>>(&png.pixels);
  if (!codes16) {
    throw DataError(path.string() + ": change rasters are 16-bit grayscale PNGs");
  }
  if (const auto it = png.text.find(kClassCountKey); it != png.text.end()) {
    if (it->second != std::to_string(codec.classes().count())) {
      throw DataError(path.string() + ": raster was written for " + it->second +
                      " classes, codec has " +
                      std::to_string(codec.classes().count()));
    }
  }
  if (const auto it = png.text.find(kOrderingKey); it != png.text.end()) {
    if (it->second != codec.info().ordering) {
      throw DataError(path.string() + ": unknown code ordering `" + it->second + "`");
    }
  }
  Grid<ChangeCode> codes(codes16->width(), codes16->height());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    codes[i] = (*codes16)[i];
  }
  try {
    return ChangeRaster(std::move(codes), codec.info());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Image load_image(const std::filesystem::path& path) {
  auto png = detail::read_png(path);
  if (auto* rgb = std::get_if<Grid<Rgb>>(&png.pixels)) {
    return std::move(*rgb);
  }
  if (const auto* gray = std::get_if<Grid<std::uint8_t>>(&png.pixels)) {
    Image image(gray->width(), gray->height());
    for (std::size_t i = 0; i < gray->size(); ++i) {
      const auto v = (*gray)[i];
      image[i] = {v, v, v};
    }
    return image;
  }
  throw DataError(path.string() + ": expected an RGB image");
}

void save_image(const Image& image, const std::filesystem::path& path) {
  detail::write_png(path, image);
}

ColorScheme::ColorScheme(std::uint32_t n_types) {
  if (n_types == 0) {
    throw DataError("color scheme needs at least one change type");
  }
  colors_.reserve(n_types);
  colors_.push_back({0, 0, 0});
  std::unordered_set<std::uint32_t> used{0};
  auto pack = [](Rgb c) {
    return (static_cast<std::uint32_t>(c.r) << 16) |
           (static_cast<std::uint32_t>(c.g) << 8) | c.b;
  };
  std::uint64_t i = 0;
  while (colors_.size() < n_types) {
    Rgb candidate;
    if (i < 100000) {
      // Golden-angle hue walk with saturation/value rings keeps nearby
      // codes visually far apart.
      const double hue = std::fmod(static_cast<double>(i) * 137.50776405003785, 360.0);
      const double sat = 0.95 - 0.25 * static_cast<double>((i / 24) % 3);
      const double val = 1.00 - 0.22 * static_cast<double>((i / 72) % 3);
      candidate = hsv_to_rgb(hue, sat, val);
    } else {
      // Odd-multiplier walk visits every 24-bit color, so termination is
      // guaranteed for any representable type count.
      const std::uint32_t packed =
          static_cast<std::uint32_t>(i * 2654435761ULL) & 0xFFFFFFu;
      candidate = {static_cast<std::uint8_t>(packed >> 16),
                   static_cast<std::uint8_t>(packed >> 8),
                   static_cast<std::uint8_t>(packed)};
    }
    ++i;
    if (used.insert(pack(candidate)).second) {
      colors_.push_back(candidate);
    }
  }
}

Rgb ColorScheme::color(ChangeCode code) const {
  if (code >= colors_.size()) {
    throw DataError("change code " + std::to_string(code) +
                    " outside color scheme of " + std::to_string(colors_.size()) +
                    " types");
  }
  return colors_[code];
}

ChangeRender render_change_map(const ChangeRaster& raster,
                               const LandClassSet& classes) {
  return render_change_map(raster, classes,
                           ColorScheme(raster.codec().n_types()));
}

ChangeRender render_change_map(const ChangeRaster& raster,
                               const LandClassSet& classes,
                               const ColorScheme& scheme) {
  if (classes.count() != raster.codec().class_count) {
    throw DataError("class set has " + std::to_string(classes.count()) +
                    " classes, raster codec " +
                    std::to_string(raster.codec().class_count));
  }
  ChangeCodec codec(classes);
  ChangeRender render;
  render.image = Image(raster.width(), raster.height());
  std::set<ChangeCode> present;
  const auto codes = raster.codes().cells();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    render.image[i] = scheme.color(codes[i]);
    present.insert(codes[i]);
  }
  for (const auto code : present) {
    const auto pair = codec.decode(code);
    render.legend.push_back({code, pair ? classes.name(pair->src) : "-",
                             pair ? classes.name(pair->dst) : "-",
                             scheme.color(code)});
  }
  return render;
}

std::string legend_csv(const std::vector<LegendRow>& legend) {
  std::ostringstream out;
  out << "code,src_name,dst_name,r,g,b\n";
  for (const auto& row : legend) {
    out << row.code << ',' << csv_field(row.src_name) << ','
        << csv_field(row.dst_name) << ',' << static_cast<int>(row.color.r) << ','
        << static_cast<int>(row.color.g) << ',' << static_cast<int>(row.color.b)
        << '\n';
  }
  return out.str();
}

void save_render(const ChangeRender& render, const std::filesystem::path& image_path) {
  save_image(render.image, image_path);
  auto legend_path = image_path;
  legend_path.replace_extension();
  legend_path += ".legend.csv";
  std::ofstream out(legend_path);
  if (!out) {
    throw IoError("cannot write legend " + legend_path.string());
  }
  out << legend_csv(render.legend);
  if (!out.flush()) {
    throw IoError("failed writing legend " + legend_path.string());
  }
}

}  // namespace scpa
