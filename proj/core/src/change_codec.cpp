#include "scpa/change_codec.hpp"

#include <string>

#include "scpa/error.hpp"

namespace scpa {

std::uint32_t max_change_types(std::uint32_t class_count) {
  if (class_count == 0) {
    throw DataError("no land classes, no change taxonomy");
  }
  return class_count * class_count - class_count + 1;
}

ChangeCodec::ChangeCodec(LandClassSet classes) : classes_(std::move(classes)) {
  // 256 classes give 65281 types, the most that fit a 16-bit change code.
  if (classes_.count() > 256) {
    throw DataError("change codec supports at most 256 classes, got " +
                    std::to_string(classes_.count()));
  }
  n_types_ = max_change_types(classes_.count());
}

ChangeCode ChangeCodec::encode(ClassId src, ClassId dst) const {
  const std::uint32_t count = classes_.count();
  if (src >= count || dst >= count) {
    throw DataError("class pair (" + std::to_string(src) + ", " +
                    std::to_string(dst) + ") out of range for " +
                    std::to_string(count) + " classes");
  }
  if (src == dst) {
    return kNoChange;
  }
  const std::uint32_t adjusted = dst < src ? dst : dst - 1u;
  return static_cast<ChangeCode>(1u + src * (count - 1u) + adjusted);
}

std::optional<ClassPair> ChangeCodec::decode(ChangeCode code) const {
  if (code >= n_types_) {
    throw DataError("change code " + std::to_string(code) +
                    " out of range for " + std::to_string(n_types_) + " types");
  }
  if (code == kNoChange) {
    return std::nullopt;
  }
  const std::uint32_t count = classes_.count();
  const std::uint32_t ordinal = code - 1u;
  const std::uint32_t src = ordinal / (count - 1u);
  const std::uint32_t adjusted = ordinal % (count - 1u);
  const std::uint32_t dst = adjusted < src ? adjusted : adjusted + 1u;
  return ClassPair{static_cast<ClassId>(src), static_cast<ClassId>(dst)};
}

std::string ChangeCodec::type_name(ChangeCode code) const {
  const auto pair = decode(code);
  if (!pair) {
    return "no_change";
  }
  return classes_.name(pair->src) + " -> " + classes_.name(pair->dst);
}

ChangeRaster change_map(const LabelRaster& src, const LabelRaster& dst,
                        const ChangeCodec& codec) {
  if (!src.pixels().same_shape(dst.pixels())) {
    throw DataError("label rasters differ in shape: " +
                    std::to_string(src.width()) + "x" +
                    std::to_string(src.height()) + " vs " +
                    std::to_string(dst.width()) + "x" +
                    std::to_string(dst.height()));
  }
  if (src.classes().count() != codec.classes().count() ||
      dst.classes().count() != codec.classes().count()) {
    throw DataError("label rasters and codec disagree on the class count");
  }
  Grid<ChangeCode> codes(src.width(), src.height());
  const auto a = src.pixels().cells();
  const auto b = dst.pixels().cells();
  const auto out = codes.cells();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = codec.encode(a[i], b[i]);
  }
  return ChangeRaster(std::move(codes), codec.info());
}

}  // namespace scpa
