#include "scpa/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include <nlohmann/json.hpp>

#include "rng.hpp"
#include "scpa/error.hpp"

namespace scpa {

namespace {

constexpr int kModelVersion = 1;

const char* kind_name(SegmenterKind kind) {
  return kind == SegmenterKind::kCentroid ? "centroid" : "softmax";
}

const char* feature_name(FeatureKind kind) {
  return kind == FeatureKind::kRgb ? "rgb" : "rgb-window";
}

}  // namespace

FeatureMap compute_features(const Image& image, const FeatureSpec& spec) {
  if (spec.kind == FeatureKind::kRgbWindow && spec.window % 2 == 0) {
    throw DataError("feature window must be odd, got " +
                    std::to_string(spec.window));
  }
  const std::size_t w = image.width(), h = image.height();
  FeatureMap map{w, h, spec.dim(), {}};
  map.values.resize(w * h * map.dim);

  for (std::size_t i = 0; i < w * h; ++i) {
    const Rgb px = image[i];
    double* out = map.values.data() + i * map.dim;
    out[0] = px.r / 255.0;
    out[1] = px.g / 255.0;
    out[2] = px.b / 255.0;
  }
  if (spec.kind == FeatureKind::kRgb) {
    return map;
  }

  const std::ptrdiff_t radius = static_cast<std::ptrdiff_t>(spec.window / 2);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double sum[3] = {0, 0, 0};
      double sq[3] = {0, 0, 0};
      std::size_t n = 0;
      for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy) {
        const std::size_t yy = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            static_cast<std::ptrdiff_t>(y) + dy, 0, static_cast<std::ptrdiff_t>(h) - 1));
        for (std::ptrdiff_t dx = -radius; dx <= radius; ++dx) {
          const std::size_t xx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
              static_cast<std::ptrdiff_t>(x) + dx, 0,
              static_cast<std::ptrdiff_t>(w) - 1));
          const Rgb px = image.at(xx, yy);
          const double c[3] = {px.r / 255.0, px.g / 255.0, px.b / 255.0};
          for (int ch = 0; ch < 3; ++ch) {
            sum[ch] += c[ch];
            sq[ch] += c[ch] * c[ch];
          }
          ++n;
        }
      }
      double* out = map.values.data() + (y * w + x) * map.dim;
      for (int ch = 0; ch < 3; ++ch) {
        const double mean = sum[ch] / static_cast<double>(n);
        const double var = std::max(sq[ch] / static_cast<double>(n) - mean * mean, 0.0);
        out[3 + ch] = mean;
        out[6 + ch] = std::sqrt(var);
      }
    }
  }
  return map;
}

void TrainConfig::validate() const {
  if (!(initial_lr > 0.0)) {
    throw DataError("initial_lr must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw DataError("momentum must be in [0, 1)");
  }
  if (power < 0.0) {
    throw DataError("poly power must be non-negative");
  }
  if (batch_size == 0) {
    throw DataError("batch_size must be at least 1");
  }
  if (max_iter == 0 && epochs == 0) {
    throw DataError("either max_iter or epochs must be set");
  }
  if (features.kind == FeatureKind::kRgbWindow && features.window % 2 == 0) {
    throw DataError("feature window must be odd");
  }
}

double poly_lr(const TrainConfig& config, std::size_t iter) {
  if (config.max_iter == 0) {
    throw DataError("poly_lr needs max_iter >= 1");
  }
  if (iter > config.max_iter) {
    throw DataError("iteration " + std::to_string(iter) + " past max_iter " +
                    std::to_string(config.max_iter));
  }
  const double progress =
      static_cast<double>(iter) / static_cast<double>(config.max_iter);
  return config.initial_lr * std::pow(1.0 - progress, config.power);
}

void SegmenterModel::validate() const {
  const std::size_t L = classes.count();
  const std::size_t dim = features.dim();
  if (kind == SegmenterKind::kCentroid) {
    if (centroids.size() != L * dim) {
      throw DataError("centroid model expects " + std::to_string(L * dim) +
                      " parameters, has " + std::to_string(centroids.size()));
    }
  } else {
    if (weights.size() != L * dim || bias.size() != L) {
      throw DataError("softmax model parameter shapes do not match " +
                      std::to_string(L) + " classes x " + std::to_string(dim) +
                      " features");
    }
  }
  for (const auto v : centroids) {
    if (!std::isfinite(v)) throw DataError("non-finite centroid parameter");
  }
  for (const auto v : weights) {
    if (!std::isfinite(v)) throw DataError("non-finite weight");
  }
  for (const auto v : bias) {
    if (!std::isfinite(v)) throw DataError("non-finite bias");
  }
}

void save_model(const SegmenterModel& model, const std::filesystem::path& path) {
  model.validate();
  nlohmann::ordered_json j;
  j["format"] = "scpa-segmenter";
  j["version"] = kModelVersion;
  j["kind"] = kind_name(model.kind);
  j["classes"] = {{"count", model.classes.count()},
                  {"names", model.classes.names()}};
  j["features"] = {{"kind", feature_name(model.features.kind)},
                   {"window", model.features.window}};
  if (model.kind == SegmenterKind::kCentroid) {
    j["centroids"] = model.centroids;
  } else {
    j["weights"] = model.weights;
    j["bias"] = model.bias;
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write model file " + path.string());
  }
  out << j.dump(2) << '\n';
  if (!out.flush()) {
    throw IoError("failed writing model file " + path.string());
  }
}

SegmenterModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open model file " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed model JSON: " + e.what());
  }
  try {
    if (j.at("format") != "scpa-segmenter") {
      throw DataError(path.string() + ": not a segmenter model file");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw DataError(path.string() + ": unsupported model version " +
                      j.at("version").dump());
    }
    SegmenterModel model;
    const std::string kind = j.at("kind");
    if (kind == "centroid") {
      model.kind = SegmenterKind::kCentroid;
    } else if (kind == "softmax") {
      model.kind = SegmenterKind::kSoftmax;
    } else {
      throw DataError(path.string() + ": unknown segmenter kind `" + kind + "`");
    }
    model.classes =
        LandClassSet(j.at("classes").at("count").get<std::uint32_t>(),
                     j.at("classes").at("names").get<std::vector<std::string>>());
    const std::string feature = j.at("features").at("kind");
    if (feature == "rgb") {
      model.features.kind = FeatureKind::kRgb;
    } else if (feature == "rgb-window") {
      model.features.kind = FeatureKind::kRgbWindow;
    } else {
      throw DataError(path.string() + ": unknown feature kind `" + feature + "`");
    }
    model.features.window = j.at("features").at("window").get<std::size_t>();
    if (model.kind == SegmenterKind::kCentroid) {
      model.centroids = j.at("centroids").get<std::vector<double>>();
    } else {
      model.weights = j.at("weights").get<std::vector<double>>();
      model.bias = j.at("bias").get<std::vector<double>>();
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed model JSON: " + e.what());
  }
}

double softmax_loss_and_grad(std::span<const double> weights,
                             std::span<const double> bias,
                             const SoftmaxBatch& batch,
                             std::span<double> grad_weights,
                             std::span<double> grad_bias) {
  const std::size_t L = batch.classes, dim = batch.dim;
  const std::size_t count = batch.labels.size();
  if (weights.size() != L * dim || bias.size() != L ||
      grad_weights.size() != L * dim || grad_bias.size() != L) {
    throw DataError("softmax parameter spans do not match the batch shape");
  }
  if (count == 0 || batch.features.size() != count * dim) {
    throw DataError("empty or inconsistent softmax batch");
  }
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);

  std::vector<double> logits(L);
  double loss = 0.0;
  const double inv_count = 1.0 / static_cast<double>(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double* x = batch.features.data() + s * dim;
    for (std::size_t c = 0; c < L; ++c) {
      double z = bias[c];
      const double* row = weights.data() + c * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        z += row[d] * x[d];
      }
      logits[c] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < L; ++c) {
      sum += std::exp(logits[c] - zmax);
    }
    const double log_sum = std::log(sum);
    const ClassId label = batch.labels[s];
    loss += (log_sum - (logits[label] - zmax)) * inv_count;

    for (std::size_t c = 0; c < L; ++c) {
      const double p = std::exp(logits[c] - zmax) / sum;
      const double g = (p - (c == label ? 1.0 : 0.0)) * inv_count;
      grad_bias[c] += g;
      double* grow = grad_weights.data() + c * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        grow[d] += g * x[d];
      }
    }
  }
  return loss;
}

namespace {

struct TrainingSet {
  std::vector<FeatureMap> features;
  std::vector<const LabelRaster*> labels;
  std::vector<std::size_t> offsets;  // prefix sums of pixel counts
  std::size_t total_pixels = 0;

  std::pair<std::span<const double>, ClassId> sample(std::size_t global) const {
    std::size_t tile = 0;
    while (global >= offsets[tile + 1]) ++tile;
    const std::size_t local = global - offsets[tile];
    return {features[tile].pixel(local), labels[tile]->pixels()[local]};
  }
};

TrainingSet build_training_set(std::span<const TrainSample> samples,
                               const FeatureSpec& spec) {
  if (samples.empty()) {
    throw DataError("training needs at least one labeled tile");
  }
  TrainingSet set;
  set.offsets.push_back(0);
  const auto& classes = samples.front().labels.classes();
  for (const auto& sample : samples) {
    if (sample.labels.classes() != classes) {
      throw DataError("training tiles use different class sets");
    }
    if (sample.image.width() != sample.labels.width() ||
        sample.image.height() != sample.labels.height()) {
      throw DataError("training tile image and labels differ in shape");
    }
    set.features.push_back(compute_features(sample.image, spec));
    set.labels.push_back(&sample.labels);
    set.total_pixels += sample.image.size();
    set.offsets.push_back(set.total_pixels);
  }
  if (set.total_pixels == 0) {
    throw DataError("training tiles are empty");
  }

  std::vector<std::uint64_t> per_class(classes.count(), 0);
  for (const auto* labels : set.labels) {
    for (const auto id : labels->pixels().cells()) {
      ++per_class[id];
    }
  }
  for (std::uint32_t c = 0; c < classes.count(); ++c) {
    if (per_class[c] == 0) {
      throw DataError("class `" + classes.name(static_cast<ClassId>(c)) +
                      "` has no training pixels");
    }
  }
  return set;
}

SegmenterModel train_centroid(const TrainingSet& set, const LandClassSet& classes,
                              const FeatureSpec& spec) {
  const std::size_t L = classes.count(), dim = spec.dim();
  std::vector<double> sums(L * dim, 0.0);
  std::vector<std::uint64_t> counts(L, 0);
  for (std::size_t tile = 0; tile < set.features.size(); ++tile) {
    const auto& features = set.features[tile];
    const auto pixels = set.labels[tile]->pixels().cells();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const auto x = features.pixel(i);
      double* row = sums.data() + static_cast<std::size_t>(pixels[i]) * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        row[d] += x[d];
      }
      ++counts[pixels[i]];
    }
  }
  SegmenterModel model;
  model.kind = SegmenterKind::kCentroid;
  model.classes = classes;
  model.features = spec;
  model.centroids.resize(L * dim);
  for (std::size_t c = 0; c < L; ++c) {
    for (std::size_t d = 0; d < dim; ++d) {
      model.centroids[c * dim + d] =
          sums[c * dim + d] / static_cast<double>(counts[c]);
    }
  }
  return model;
}

SegmenterModel train_softmax(const TrainingSet& set, const LandClassSet& classes,
                             const TrainConfig& config, TrainStats* stats) {
  const std::size_t L = classes.count(), dim = config.features.dim();
  TrainConfig resolved = config;
  if (resolved.max_iter == 0) {
    const std::size_t steps_per_epoch =
        (set.total_pixels + config.batch_size - 1) / config.batch_size;
    resolved.max_iter = config.epochs * steps_per_epoch;
  }

  std::vector<double> weights(L * dim, 0.0), bias(L, 0.0);
  std::vector<double> vel_w(L * dim, 0.0), vel_b(L, 0.0);
  std::vector<double> grad_w(L * dim), grad_b(L);

  std::mt19937_64 rng(config.seed);
  SoftmaxBatch batch;
  batch.classes = L;
  batch.dim = dim;
  batch.labels.resize(config.batch_size);
  batch.features.resize(config.batch_size * dim);

  const std::size_t epochs = std::max<std::size_t>(config.epochs, 1);
  const std::size_t epoch_len = (resolved.max_iter + epochs - 1) / epochs;
  double epoch_sum = 0.0;
  std::size_t epoch_steps = 0;

  for (std::size_t iter = 0; iter < resolved.max_iter; ++iter) {
    for (std::size_t s = 0; s < config.batch_size; ++s) {
      const auto [x, y] = set.sample(detail::uniform_below(rng, set.total_pixels));
      std::copy(x.begin(), x.end(), batch.features.begin() + s * dim);
      batch.labels[s] = y;
    }
    const double loss =
        softmax_loss_and_grad(weights, bias, batch, grad_w, grad_b);

    const double lr = poly_lr(resolved, iter);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      vel_w[i] = config.momentum * vel_w[i] - lr * grad_w[i];
      weights[i] += vel_w[i];
    }
    for (std::size_t i = 0; i < bias.size(); ++i) {
      vel_b[i] = config.momentum * vel_b[i] - lr * grad_b[i];
      bias[i] += vel_b[i];
    }

    if (stats) {
      epoch_sum += loss;
      ++epoch_steps;
      if (epoch_steps == epoch_len || iter + 1 == resolved.max_iter) {
        stats->epoch_loss.push_back(epoch_sum / static_cast<double>(epoch_steps));
        epoch_sum = 0.0;
        epoch_steps = 0;
      }
    }
  }
  if (stats) {
    stats->iterations = resolved.max_iter;
  }

  SegmenterModel model;
  model.kind = SegmenterKind::kSoftmax;
  model.classes = classes;
  model.features = config.features;
  model.weights = std::move(weights);
  model.bias = std::move(bias);
  return model;
}

}  // namespace

SegmenterModel train(std::span<const TrainSample> samples, SegmenterKind kind,
                     const TrainConfig& config, TrainStats* stats) {
  config.validate();
  const auto set = build_training_set(samples, config.features);
  const auto& classes = samples.front().labels.classes();
  if (kind == SegmenterKind::kCentroid) {
    if (stats) *stats = TrainStats{};
    return train_centroid(set, classes, config.features);
  }
  return train_softmax(set, classes, config, stats);
}

LabelRaster predict(const SegmenterModel& model, const Image& image) {
  model.validate();
  const auto features = compute_features(image, model.features);
  const std::size_t L = model.classes.count(), dim = model.features.dim();
  Grid<ClassId> out(image.width(), image.height());

  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = features.pixel(i);
    std::size_t best = 0;
    if (model.kind == SegmenterKind::kCentroid) {
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < L; ++c) {
        const double* row = model.centroids.data() + c * dim;
        double dist = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = x[d] - row[d];
          dist += diff * diff;
        }
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
    } else {
      double best_logit = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < L; ++c) {
        const double* row = model.weights.data() + c * dim;
        double z = model.bias[c];
        for (std::size_t d = 0; d < dim; ++d) {
          z += row[d] * x[d];
        }
        if (z > best_logit) {
          best_logit = z;
          best = c;
        }
      }
    }
    out[i] = static_cast<ClassId>(best);
  }
  return LabelRaster(std::move(out), model.classes);
}

}  // namespace scpa
