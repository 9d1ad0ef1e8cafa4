#include "scpa/metrics.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "scpa/error.hpp"

namespace scpa {

namespace {

// Dense storage; 64 classes give 4033 types and a 130 MB matrix, which is
// already past any realistic change taxonomy.
constexpr std::uint64_t kMaxDenseTypes = 4096;

void check_same_codec(const CodecInfo& a, const CodecInfo& b) {
  if (a != b) {
    throw DataError("confusion codecs disagree: " +
                    std::to_string(a.class_count) + " classes/" + a.ordering +
                    " vs " + std::to_string(b.class_count) + " classes/" +
                    b.ordering);
  }
}

}  // namespace

ChangeConfusion::ChangeConfusion(CodecInfo codec) : codec_(std::move(codec)) {
  if (codec_.class_count == 0) {
    throw DataError("confusion matrix needs at least one class");
  }
  const std::uint64_t n = codec_.n_types();
  if (n > kMaxDenseTypes) {
    throw DataError("confusion over " + std::to_string(n) +
                    " change types exceeds the dense limit of " +
                    std::to_string(kMaxDenseTypes));
  }
  counts_.assign(n * n, 0);
}

void ChangeConfusion::accumulate(const ChangeRaster& truth,
                                 const ChangeRaster& predicted) {
  check_same_codec(codec_, truth.codec());
  check_same_codec(codec_, predicted.codec());
  if (!truth.codes().same_shape(predicted.codes())) {
    throw DataError("truth and prediction differ in shape: " +
                    std::to_string(truth.width()) + "x" +
                    std::to_string(truth.height()) + " vs " +
                    std::to_string(predicted.width()) + "x" +
                    std::to_string(predicted.height()));
  }
  const auto n = codec_.n_types();
  const auto t = truth.codes().cells();
  const auto p = predicted.codes().cells();
  for (std::size_t i = 0; i < t.size(); ++i) {
    ++counts_[static_cast<std::size_t>(t[i]) * n + p[i]];
  }
  total_ += t.size();
}

void ChangeConfusion::merge(const ChangeConfusion& other) {
  check_same_codec(codec_, other.codec_);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  total_ += other.total_;
}

std::uint64_t ChangeConfusion::count(ChangeCode truth, ChangeCode predicted) const {
  const auto n = codec_.n_types();
  if (truth >= n || predicted >= n) {
    throw DataError("change code out of range for " + std::to_string(n) + " types");
  }
  return counts_[static_cast<std::size_t>(truth) * n + predicted];
}

std::uint64_t ChangeConfusion::row_sum(ChangeCode truth) const {
  const auto n = codec_.n_types();
  std::uint64_t sum = 0;
  for (std::uint32_t j = 0; j < n; ++j) {
    sum += counts_[static_cast<std::size_t>(truth) * n + j];
  }
  return sum;
}

std::uint64_t ChangeConfusion::col_sum(ChangeCode predicted) const {
  const auto n = codec_.n_types();
  std::uint64_t sum = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    sum += counts_[static_cast<std::size_t>(i) * n + predicted];
  }
  return sum;
}

IouResult mean_iou(const ChangeConfusion& confusion, PresenceRule rule) {
  if (confusion.total_pixels() == 0) {
    throw DataError("cannot compute mIoU of an empty confusion");
  }
  const auto n = confusion.n_types();
  IouResult result;
  double sum = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto code = static_cast<ChangeCode>(i);
    const auto row = confusion.row_sum(code);
    const auto col = confusion.col_sum(code);
    const bool present =
        rule == PresenceRule::kUnion ? (row + col > 0) : (row > 0);
    if (!present) continue;
    const auto diag = confusion.count(code, code);
    const double iou = static_cast<double>(diag) /
                       static_cast<double>(row + col - diag);
    result.per_type[code] = iou;
    result.present_types.push_back(code);
    sum += iou;
  }
  result.miou = sum / static_cast<double>(result.present_types.size());
  return result;
}

BinaryResult binary_accuracy(const ChangeConfusion& confusion) {
  if (confusion.total_pixels() == 0) {
    throw DataError("cannot compute binary accuracy of an empty confusion");
  }
  // "Changed" is the positive class, regardless of the specific type.
  BinaryResult result;
  result.tn = confusion.count(kNoChange, kNoChange);
  result.fp = confusion.row_sum(kNoChange) - result.tn;  // truth unchanged, predicted changed
  result.fn = confusion.col_sum(kNoChange) - result.tn;  // truth changed, predicted unchanged
  result.tp = confusion.total_pixels() - result.tn - result.fp - result.fn;
  result.bacc = static_cast<double>(result.tp + result.tn) /
                static_cast<double>(confusion.total_pixels());
  return result;
}

MetricsReport report(const ChangeConfusion& confusion, PresenceRule rule) {
  const auto iou = mean_iou(confusion, rule);
  const auto binary = binary_accuracy(confusion);
  MetricsReport out;
  out.miou = iou.miou;
  out.bacc = binary.bacc;
  out.per_type_iou = iou.per_type;
  out.present_types = iou.present_types;
  out.tp = binary.tp;
  out.tn = binary.tn;
  out.fp = binary.fp;
  out.fn = binary.fn;
  out.total_pixels = confusion.total_pixels();
  out.rule = rule;
  return out;
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["miou"] = report.miou;
  j["bacc"] = report.bacc;
  j["presence_rule"] =
      report.rule == PresenceRule::kUnion ? "union" : "truth-only";
  j["present_types"] = report.present_types;
  nlohmann::ordered_json per_type;
  for (const auto& [code, iou] : report.per_type_iou) {
    per_type[std::to_string(code)] = iou;
  }
  j["per_type_iou"] = per_type;
  j["tp"] = report.tp;
  j["tn"] = report.tn;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  j["total_pixels"] = report.total_pixels;
  return j.dump(2) + "\n";
}

std::string confusion_csv(const ChangeConfusion& confusion) {
  const auto n = confusion.n_types();
  std::ostringstream out;
  out << "truth\\pred";
  for (std::uint32_t j = 0; j < n; ++j) out << ',' << j;
  out << '\n';
  for (std::uint32_t i = 0; i < n; ++i) {
    out << i;
    for (std::uint32_t j = 0; j < n; ++j) {
      out << ',' << confusion.count(static_cast<ChangeCode>(i),
                                    static_cast<ChangeCode>(j));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace scpa
