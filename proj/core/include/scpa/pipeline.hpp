#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scpa/dataset.hpp"
#include "scpa/metrics.hpp"
#include "scpa/palette.hpp"
#include "scpa/transition.hpp"

namespace scpa {

struct PairPaths {
  std::string stem;
  std::filesystem::path src_image;
  std::filesystem::path dst_image;
  std::filesystem::path src_labels;
  std::filesystem::path dst_labels;
};

/// Pairs found under the standard dataset layout, sorted by stem.
std::vector<PairPaths> discover_pairs(const std::filesystem::path& dataset_dir);

/// Exactly one prediction source: a trained segmenter model applied to the
/// pair imagery, or directories of externally produced label rasters
/// matched by stem (any first-stage model can drop its outputs there).
struct PipelineConfig {
  std::optional<std::filesystem::path> model_file;
  std::optional<std::pair<std::filesystem::path, std::filesystem::path>>
      prediction_dirs;  // src, dst
  LandClassSet classes{1};
  std::optional<std::filesystem::path> palette_file;
  std::filesystem::path output_dir;
  PresenceRule presence = PresenceRule::kUnion;
  std::size_t jobs = 0;  // 0: hardware concurrency

  void validate() const;
};

struct PairResult {
  std::string stem;
  MetricsReport metrics;
  std::filesystem::path predicted_src_labels;
  std::filesystem::path predicted_dst_labels;
  std::filesystem::path truth_change;
  std::filesystem::path predicted_change;
  std::filesystem::path truth_render;
  std::filesystem::path predicted_render;
};

struct RunSummary {
  MetricsReport global;                    // micro-average over all pairs
  TransitionMatrix truth_transitions;      // from ground-truth labels
  TransitionMatrix predicted_transitions;  // from predicted labels
  std::vector<PairResult> pairs;
};

/// Runs the two-step method over every pair: predict (or ingest) both label
/// rasters, compare pixelwise into change rasters, evaluate against the
/// ground-truth change raster, accumulate one global confusion, and write
/// all artifacts plus summary.json under config.output_dir. Fails fast on
/// the first malformed or missing pair.
RunSummary run_two_step(const PipelineConfig& config,
                        std::span<const PairPaths> pairs);

std::string summary_json(const RunSummary& summary, const PipelineConfig& config);

struct PredictionPair {
  LabelRaster src;
  LabelRaster dst;
};

/// Loads externally produced prediction rasters for the given stems;
/// grayscale IDs directly, RGB through the palette. Missing files and
/// out-of-range class IDs fail naming the stem.
std::vector<PredictionPair> ingest_external_predictions(
    const std::filesystem::path& dir_src, const std::filesystem::path& dir_dst,
    const LandClassSet& classes, const Palette* palette,
    std::span<const std::string> stems);

}  // namespace scpa
