#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "scpa/raster.hpp"

namespace scpa {

enum class FeatureKind { kRgb, kRgbWindow };

/// Per-pixel features: RGB scaled to [0,1], optionally concatenated with
/// per-channel mean and standard deviation over a window x window
/// neighborhood (borders clamped). Dimensions: 3 or 9.
struct FeatureSpec {
  FeatureKind kind = FeatureKind::kRgb;
  std::size_t window = 5;  // odd

  std::size_t dim() const { return kind == FeatureKind::kRgb ? 3 : 9; }

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct FeatureMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // pixel-major

  std::span<const double> pixel(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
};

FeatureMap compute_features(const Image& image, const FeatureSpec& spec);

struct TrainConfig {
  double initial_lr = 0.01;
  double power = 0.9;
  double momentum = 0.9;
  std::size_t max_iter = 0;  // 0: derived as epochs * ceil(pixels / batch_size)
  std::size_t batch_size = 256;
  std::size_t epochs = 5;
  std::uint64_t seed = 42;
  FeatureSpec features;

  void validate() const;
};

/// Poly decay: initial_lr * (1 - iter/max_iter)^power. Exact at the
/// endpoints (iter 0 gives initial_lr, iter == max_iter gives 0) and
/// non-increasing in between.
double poly_lr(const TrainConfig& config, std::size_t iter);

enum class SegmenterKind { kCentroid, kSoftmax };

struct SegmenterModel {
  SegmenterKind kind = SegmenterKind::kCentroid;
  LandClassSet classes{1};
  FeatureSpec features;
  std::vector<double> centroids;  // classes x dim (centroid kind)
  std::vector<double> weights;    // classes x dim (softmax kind)
  std::vector<double> bias;       // classes      (softmax kind)

  void validate() const;
};

/// Versioned JSON model files.
void save_model(const SegmenterModel& model, const std::filesystem::path& path);
SegmenterModel load_model(const std::filesystem::path& path);

struct TrainSample {
  Image image;
  LabelRaster labels;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean step loss per epoch (softmax only)
  std::size_t iterations = 0;
};

/// Centroid training is one pass of per-class feature means; softmax is
/// cross-entropy SGD with momentum (v <- momentum*v - lr*grad,
/// theta <- theta + v) under the poly schedule, deterministic per seed.
/// Every class must have at least one labeled pixel.
SegmenterModel train(std::span<const TrainSample> samples, SegmenterKind kind,
                     const TrainConfig& config, TrainStats* stats = nullptr);

/// Per-pixel argmax; ties break toward the lowest class ID.
LabelRaster predict(const SegmenterModel& model, const Image& image);

/// Mini-batch for the softmax objective; features are sample-major.
struct SoftmaxBatch {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<double> features;  // size() == labels.size() * dim
  std::vector<ClassId> labels;
};

/// Mean cross-entropy over the batch and its gradient; exposed so the
/// gradient can be checked against finite differences.
double softmax_loss_and_grad(std::span<const double> weights,
                             std::span<const double> bias,
                             const SoftmaxBatch& batch,
                             std::span<double> grad_weights,
                             std::span<double> grad_bias);

}  // namespace scpa
