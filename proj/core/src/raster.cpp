#include "scpa/raster.hpp"

#include "scpa/error.hpp"

namespace scpa {

LabelRaster::LabelRaster(Grid<ClassId> pixels, LandClassSet classes)
    : pixels_(std::move(pixels)), classes_(std::move(classes)) {
  const auto count = classes_.count();
  const auto cells = pixels_.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] >= count) {
      throw DataError("class ID " + std::to_string(cells[i]) + " at pixel (" +
                      std::to_string(i % pixels_.width()) + ", " +
                      std::to_string(i / pixels_.width()) + ") out of range for " +
                      std::to_string(count) + " classes");
    }
  }
}

ChangeRaster::ChangeRaster(Grid<ChangeCode> codes, CodecInfo codec)
    : codes_(std::move(codes)), codec_(std::move(codec)) {
  if (codec_.class_count == 0) {
    throw DataError("change raster codec needs at least one class");
  }
  const auto n = codec_.n_types();
  const auto cells = codes_.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] >= n) {
      throw DataError("change code " + std::to_string(cells[i]) + " at pixel (" +
                      std::to_string(i % codes_.width()) + ", " +
                      std::to_string(i / codes_.width()) + ") out of range for " +
                      std::to_string(n) + " change types");
    }
  }
}

}  // namespace scpa
