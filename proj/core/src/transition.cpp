#include "scpa/transition.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scpa/error.hpp"

namespace scpa {

TransitionMatrix::TransitionMatrix(LandClassSet classes)
    : classes_(std::move(classes)) {
  counts_.assign(static_cast<std::size_t>(classes_.count()) * classes_.count(), 0);
}

void TransitionMatrix::accumulate(const LabelRaster& src, const LabelRaster& dst) {
  if (src.classes() != classes_ || dst.classes() != classes_) {
    throw DataError("label rasters and transition matrix disagree on classes");
  }
  if (!src.pixels().same_shape(dst.pixels())) {
    throw DataError("label rasters differ in shape: " + std::to_string(src.width()) +
                    "x" + std::to_string(src.height()) + " vs " +
                    std::to_string(dst.width()) + "x" + std::to_string(dst.height()));
  }
  const auto count = classes_.count();
  const auto a = src.pixels().cells();
  const auto b = dst.pixels().cells();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++counts_[static_cast<std::size_t>(a[i]) * count + b[i]];
  }
  total_ += a.size();
}

void TransitionMatrix::merge(const TransitionMatrix& other) {
  if (other.classes_ != classes_) {
    throw DataError("cannot merge transition matrices over different class sets");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  total_ += other.total_;
}

void TransitionMatrix::add(ClassId src, ClassId dst, std::uint64_t pixels) {
  if (src >= classes_.count() || dst >= classes_.count()) {
    throw DataError("class pair (" + std::to_string(src) + ", " +
                    std::to_string(dst) + ") out of range");
  }
  counts_[static_cast<std::size_t>(src) * classes_.count() + dst] += pixels;
  total_ += pixels;
}

std::uint64_t TransitionMatrix::count(ClassId src, ClassId dst) const {
  if (src >= classes_.count() || dst >= classes_.count()) {
    throw DataError("class pair (" + std::to_string(src) + ", " +
                    std::to_string(dst) + ") out of range");
  }
  return counts_[static_cast<std::size_t>(src) * classes_.count() + dst];
}

std::uint64_t TransitionMatrix::row_sum(ClassId src) const {
  std::uint64_t sum = 0;
  for (std::uint32_t j = 0; j < classes_.count(); ++j) {
    sum += count(src, static_cast<ClassId>(j));
  }
  return sum;
}

std::uint64_t TransitionMatrix::col_sum(ClassId dst) const {
  std::uint64_t sum = 0;
  for (std::uint32_t i = 0; i < classes_.count(); ++i) {
    sum += count(static_cast<ClassId>(i), dst);
  }
  return sum;
}

ClassDistribution class_distribution(const LabelRaster& raster) {
  if (raster.pixels().empty()) {
    throw DataError("cannot take the class distribution of an empty raster");
  }
  ClassDistribution dist{raster.classes(), {}, raster.pixels().size()};
  dist.counts.assign(raster.classes().count(), 0);
  for (const auto id : raster.pixels().cells()) {
    ++dist.counts[id];
  }
  return dist;
}

TransitionMatrix transition_matrix(const LabelRaster& src, const LabelRaster& dst) {
  TransitionMatrix matrix(src.classes());
  matrix.accumulate(src, dst);
  return matrix;
}

std::vector<AsymmetryRow> asymmetry_report(const TransitionMatrix& matrix) {
  std::vector<AsymmetryRow> rows;
  const auto count = matrix.classes().count();
  for (std::uint32_t a = 0; a < count; ++a) {
    for (std::uint32_t b = a + 1; b < count; ++b) {
      const auto forward = matrix.count(static_cast<ClassId>(a), static_cast<ClassId>(b));
      const auto backward = matrix.count(static_cast<ClassId>(b), static_cast<ClassId>(a));
      const auto hi = std::max(forward, backward);
      const auto lo = std::max<std::uint64_t>(std::min(forward, backward), 1);
      rows.push_back({static_cast<ClassId>(a), static_cast<ClassId>(b), forward,
                      backward, static_cast<double>(hi) / static_cast<double>(lo)});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const AsymmetryRow& x, const AsymmetryRow& y) {
    const auto dx = x.forward > x.backward ? x.forward - x.backward
                                           : x.backward - x.forward;
    const auto dy = y.forward > y.backward ? y.forward - y.backward
                                           : y.backward - y.forward;
    if (dx != dy) return dx > dy;
    return std::pair(x.class_a, x.class_b) < std::pair(y.class_a, y.class_b);
  });
  return rows;
}

DerivedTransition transition_from_change_raster(
    const ChangeRaster& raster, const LandClassSet& classes,
    const ClassDistribution* unchanged_distribution) {
  if (classes.count() != raster.codec().class_count) {
    throw DataError("class set has " + std::to_string(classes.count()) +
                    " classes, change raster codec " +
                    std::to_string(raster.codec().class_count));
  }
  ChangeCodec codec(classes);
  DerivedTransition result{TransitionMatrix(classes), 0, false};

  // Histogram of codes first; one decode per present code.
  std::vector<std::uint64_t> per_code(codec.n_types(), 0);
  for (const auto code : raster.codes().cells()) {
    ++per_code[code];
  }
  result.unchanged_pixels = per_code[kNoChange];
  for (std::uint32_t code = 1; code < per_code.size(); ++code) {
    if (per_code[code] == 0) continue;
    const auto pair = codec.decode(static_cast<ChangeCode>(code));
    result.matrix.add(pair->src, pair->dst, per_code[code]);
  }

  if (unchanged_distribution) {
    if (unchanged_distribution->classes.count() != classes.count()) {
      throw DataError("unchanged-pixel distribution uses a different class set");
    }
    if (unchanged_distribution->total != result.unchanged_pixels) {
      throw DataError("unchanged-pixel distribution covers " +
                      std::to_string(unchanged_distribution->total) +
                      " pixels but the raster has " +
                      std::to_string(result.unchanged_pixels) + " unchanged");
    }
    for (std::uint32_t c = 0; c < classes.count(); ++c) {
      result.matrix.add(static_cast<ClassId>(c), static_cast<ClassId>(c),
                        unchanged_distribution->counts[c]);
    }
    result.diagonal_filled = true;
  }
  return result;
}

std::string transition_csv(const TransitionMatrix& matrix) {
  const auto& classes = matrix.classes();
  std::ostringstream out;
  out << "src\\dst";
  for (std::uint32_t j = 0; j < classes.count(); ++j) {
    out << ',' << classes.name(static_cast<ClassId>(j));
  }
  out << '\n';
  for (std::uint32_t i = 0; i < classes.count(); ++i) {
    out << classes.name(static_cast<ClassId>(i));
    for (std::uint32_t j = 0; j < classes.count(); ++j) {
      out << ',' << matrix.count(static_cast<ClassId>(i), static_cast<ClassId>(j));
    }
    out << '\n';
  }
  return out.str();
}

std::string asymmetry_csv(const std::vector<AsymmetryRow>& rows,
                          const LandClassSet& classes) {
  std::ostringstream out;
  out << "class_a,class_b,a_to_b,b_to_a,ratio\n";
  for (const auto& row : rows) {
    out << classes.name(row.class_a) << ',' << classes.name(row.class_b) << ','
        << row.forward << ',' << row.backward << ',' << row.ratio << '\n';
  }
  return out.str();
}

std::string distribution_json(const ClassDistribution& distribution) {
  nlohmann::ordered_json j;
  j["total_pixels"] = distribution.total;
  nlohmann::ordered_json counts, proportions;
  for (std::uint32_t c = 0; c < distribution.classes.count(); ++c) {
    const auto& name = distribution.classes.name(static_cast<ClassId>(c));
    counts[name] = distribution.counts[c];
    proportions[name] = distribution.proportion(static_cast<ClassId>(c));
  }
  j["counts"] = counts;
  j["proportions"] = proportions;
  return j.dump(2) + "\n";
}

}  // namespace scpa
