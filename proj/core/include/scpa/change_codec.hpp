#pragma once

#include <cstdint>
#include <optional>

#include "scpa/land_class.hpp"
#include "scpa/raster.hpp"

namespace scpa {

/// Maximal number of change types for L land classes: L^2 - L + 1
/// (all ordered pairs with the L identity pairs collapsed into one
/// no-change type). Rejects L = 0.
std::uint32_t max_change_types(std::uint32_t class_count);

/// An ordered (source class, destination class) pair; src != dst.
struct ClassPair {
  ClassId src = 0;
  ClassId dst = 0;

  friend bool operator==(const ClassPair&, const ClassPair&) = default;
};

/// Invertible mapping between ordered class pairs and change-type codes.
///
/// Code 0 is no-change. Changed pairs are ordered lexicographically by
/// (src, dst) with the diagonal removed:
///
///   code(src, dst) = 1 + src*(L-1) + (dst < src ? dst : dst - 1)
///
/// which is a bijection from {(src, dst) : src != dst} onto 1..N-1 and is
/// O(1) to invert. The ordering tag "lex-src-dst" names this convention in
/// output files.
class ChangeCodec {
 public:
  explicit ChangeCodec(LandClassSet classes);

  const LandClassSet& classes() const { return classes_; }
  std::uint32_t n_types() const { return n_types_; }
  CodecInfo info() const { return CodecInfo{classes_.count()}; }

  /// Code for a (source, destination) class pair. Asymmetric:
  /// encode(a, b) != encode(b, a) whenever a != b.
  ChangeCode encode(ClassId src, ClassId dst) const;

  /// Inverse of encode; nullopt is no-change (code 0).
  std::optional<ClassPair> decode(ChangeCode code) const;

  /// "no_change" or "<src name> -> <dst name>"; used in legends and reports.
  std::string type_name(ChangeCode code) const;

 private:
  LandClassSet classes_;
  std::uint32_t n_types_ = 0;
};

/// Pixelwise encode of a co-registered label pair. Inputs must share
/// dimensions and the codec's class set; the first offending pixel is
/// reported on failure.
ChangeRaster change_map(const LabelRaster& src, const LabelRaster& dst,
                        const ChangeCodec& codec);

}  // namespace scpa
