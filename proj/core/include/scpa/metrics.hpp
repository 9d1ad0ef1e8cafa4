#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scpa/raster.hpp"

namespace scpa {

/// Which change types count toward M, the number of types "actually
/// appearing". kUnion (default) takes types present in truth or prediction,
/// so hallucinated types score an IoU of 0 instead of vanishing; kTruthOnly
/// restricts to ground-truth types. Types absent from both are always
/// excluded, so no IoU is ever 0/0.
enum class PresenceRule { kUnion, kTruthOnly };

/// Change-type confusion counts: count(t, p) = pixels of true type t
/// predicted as type p. Value-semantic and mergeable, so tiles can be
/// accumulated independently and combined; merge is entrywise addition,
/// associative and commutative with the zero matrix as identity.
class ChangeConfusion {
 public:
  explicit ChangeConfusion(CodecInfo codec);

  /// Adds one co-registered truth/prediction pair, pixel by pixel.
  void accumulate(const ChangeRaster& truth, const ChangeRaster& predicted);

  /// Entrywise addition; both sides must share the codec.
  void merge(const ChangeConfusion& other);

  std::uint64_t count(ChangeCode truth, ChangeCode predicted) const;
  std::uint64_t row_sum(ChangeCode truth) const;
  std::uint64_t col_sum(ChangeCode predicted) const;
  std::uint64_t total_pixels() const { return total_; }
  const CodecInfo& codec() const { return codec_; }
  std::uint32_t n_types() const { return codec_.n_types(); }

  friend bool operator==(const ChangeConfusion&, const ChangeConfusion&) = default;

 private:
  CodecInfo codec_;
  std::vector<std::uint64_t> counts_;  // n x n, row-major by truth type
  std::uint64_t total_ = 0;
};

struct IouResult {
  double miou = 0.0;
  std::map<ChangeCode, double> per_type;   // only present types
  std::vector<ChangeCode> present_types;   // ascending
};

/// Mean IoU over present change types:
/// IoU_i = C_ii / (row_i + col_i - C_ii). Rejects an empty confusion.
IouResult mean_iou(const ChangeConfusion& confusion,
                   PresenceRule rule = PresenceRule::kUnion);

struct BinaryResult {
  double bacc = 0.0;
  std::uint64_t tp = 0;  // truth changed, predicted changed (any types)
  std::uint64_t tn = 0;  // truth unchanged, predicted unchanged
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

/// Binary accuracy after collapsing every nonzero code to "changed":
/// (TP + TN) / (TP + FP + TN + FN). Rejects an empty confusion.
BinaryResult binary_accuracy(const ChangeConfusion& confusion);

struct MetricsReport {
  double miou = 0.0;
  double bacc = 0.0;
  std::map<ChangeCode, double> per_type_iou;
  std::vector<ChangeCode> present_types;
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::uint64_t total_pixels = 0;
  PresenceRule rule = PresenceRule::kUnion;
};

MetricsReport report(const ChangeConfusion& confusion,
                     PresenceRule rule = PresenceRule::kUnion);

/// JSON with deterministic key order.
std::string metrics_json(const MetricsReport& report);

/// Full confusion matrix as CSV with change-code header row and column.
std::string confusion_csv(const ChangeConfusion& confusion);

}  // namespace scpa
