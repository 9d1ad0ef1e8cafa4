#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scpa/change_codec.hpp"
#include "scpa/raster.hpp"

namespace scpa {

/// Pixel counts and proportions per land class for one raster.
struct ClassDistribution {
  LandClassSet classes;
  std::vector<std::uint64_t> counts;  // indexed by class ID
  std::uint64_t total = 0;

  double proportion(ClassId id) const {
    return static_cast<double>(counts.at(id)) / static_cast<double>(total);
  }
};

/// L x L joint counts: count(i, j) = pixels of source class i and
/// destination class j. The diagonal holds unchanged pixels; row sums are
/// the source distribution and column sums the destination distribution.
/// Mergeable like ChangeConfusion.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(LandClassSet classes);

  void accumulate(const LabelRaster& src, const LabelRaster& dst);
  void merge(const TransitionMatrix& other);
  void add(ClassId src, ClassId dst, std::uint64_t pixels);

  std::uint64_t count(ClassId src, ClassId dst) const;
  std::uint64_t row_sum(ClassId src) const;
  std::uint64_t col_sum(ClassId dst) const;
  std::uint64_t total_pixels() const { return total_; }
  const LandClassSet& classes() const { return classes_; }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  LandClassSet classes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

ClassDistribution class_distribution(const LabelRaster& raster);

TransitionMatrix transition_matrix(const LabelRaster& src, const LabelRaster& dst);

/// One unordered class pair compared in both directions. `ratio` is
/// max/min with the minimum clamped to 1, so a one-way transition prints
/// as its own magnitude instead of infinity.
struct AsymmetryRow {
  ClassId class_a = 0;
  ClassId class_b = 0;
  std::uint64_t forward = 0;   // class_a -> class_b
  std::uint64_t backward = 0;  // class_b -> class_a
  double ratio = 0.0;
};

/// All unordered pairs sorted by |forward - backward| descending; ties by
/// (class_a, class_b) ascending.
std::vector<AsymmetryRow> asymmetry_report(const TransitionMatrix& matrix);

struct DerivedTransition {
  TransitionMatrix matrix;
  std::uint64_t unchanged_pixels = 0;
  bool diagonal_filled = false;
};

/// Rebuilds the transition matrix from a change raster. Off-diagonal cells
/// reconstruct exactly via decode; code 0 erases class identity, so the
/// diagonal needs the class distribution of the unchanged pixels when one
/// is available, and otherwise stays zero with the aggregate count reported
/// separately.
DerivedTransition transition_from_change_raster(
    const ChangeRaster& raster, const LandClassSet& classes,
    const ClassDistribution* unchanged_distribution = nullptr);

/// CSV with class-name header row and column.
std::string transition_csv(const TransitionMatrix& matrix);
std::string asymmetry_csv(const std::vector<AsymmetryRow>& rows,
                          const LandClassSet& classes);
std::string distribution_json(const ClassDistribution& distribution);

}  // namespace scpa
