#include "scpa/segmenter.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "scpa/error.hpp"
#include "test_util.hpp"

using namespace scpa;

namespace {

// Two constant-color classes, separable by construction.
TrainSample separable_sample(std::size_t w, std::size_t h) {
  Image image(w, h);
  Grid<ClassId> labels(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const bool right = x >= w / 2;
      image.at(x, y) = right ? Rgb{220, 30, 30} : Rgb{10, 10, 10};
      labels.at(x, y) = right ? 1 : 0;
    }
  }
  return {std::move(image), LabelRaster(std::move(labels), LandClassSet(2))};
}

double training_accuracy(const SegmenterModel& model, const TrainSample& sample) {
  const auto predicted = predict(model, sample.image);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.pixels().size(); ++i) {
    hits += predicted.pixels()[i] == sample.labels.pixels()[i];
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.pixels().size());
}

}  // namespace

TEST_CASE("poly_lr endpoints and the frozen midpoint") {
  TrainConfig cfg;
  cfg.initial_lr = 0.01;
  cfg.power = 0.9;
  cfg.max_iter = 1000;
  CHECK(poly_lr(cfg, 0) == 0.01);
  CHECK(poly_lr(cfg, 1000) == 0.0);
  // 0.01 * 0.5^0.9 evaluated at high precision.
  CHECK(std::fabs(poly_lr(cfg, 500) - 0.00535886731268146582) < 1e-12);
  CHECK_THROWS_AS(poly_lr(cfg, 1001), DataError);
}

TEST_CASE("poly_lr is non-increasing for random configs") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    TrainConfig cfg;
    cfg.initial_lr = 0.001 + (rng() % 1000) / 1000.0;
    cfg.power = (rng() % 300) / 100.0;
    cfg.max_iter = 1 + rng() % 2000;
    CHECK(poly_lr(cfg, 0) == cfg.initial_lr);
    CHECK(poly_lr(cfg, cfg.max_iter) == (cfg.power == 0.0 ? cfg.initial_lr : 0.0));
    double prev = poly_lr(cfg, 0);
    for (std::size_t iter = 1; iter <= cfg.max_iter; iter += 1 + cfg.max_iter / 37) {
      const double lr = poly_lr(cfg, iter);
      CHECK(lr <= prev);
      prev = lr;
    }
  }
}

TEST_CASE("window features use clamped borders and finite values") {
  Image image(4, 3);
  image.at(0, 0) = {255, 0, 0};
  const FeatureSpec spec{FeatureKind::kRgbWindow, 5};
  const auto map = compute_features(image, spec);
  CHECK(map.dim == 9);
  for (const auto v : map.values) {
    CHECK(std::isfinite(v));
  }
  // Constant image: window stats equal the pixel and stddev is zero.
  Image flat(6, 6, Rgb{100, 150, 200});
  const auto flat_map = compute_features(flat, spec);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto x = flat_map.pixel(i);
    CHECK(x[3] == doctest::Approx(100.0 / 255.0));
    CHECK(x[6] == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(compute_features(image, FeatureSpec{FeatureKind::kRgbWindow, 4}),
                  DataError);
}

TEST_CASE("centroid training separates constant-color classes") {
  const auto sample = separable_sample(32, 16);
  const auto model =
      train(std::span(&sample, 1), SegmenterKind::kCentroid, TrainConfig{});
  CHECK(model.kind == SegmenterKind::kCentroid);
  CHECK(training_accuracy(model, sample) == 1.0);
}

TEST_CASE("softmax reaches 99% training accuracy within 500 iterations") {
  const auto sample = separable_sample(32, 16);
  TrainConfig cfg;
  cfg.max_iter = 500;
  cfg.batch_size = 64;
  TrainStats stats;
  const auto model = train(std::span(&sample, 1), SegmenterKind::kSoftmax, cfg, &stats);
  CHECK(stats.iterations == 500);
  CHECK(training_accuracy(model, sample) >= 0.99);
}

TEST_CASE("softmax epoch losses are non-increasing on separable data") {
  const auto sample = separable_sample(32, 32);
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 128;
  TrainStats stats;
  train(std::span(&sample, 1), SegmenterKind::kSoftmax, cfg, &stats);
  REQUIRE(stats.epoch_loss.size() == 6);
  for (std::size_t e = 1; e < stats.epoch_loss.size(); ++e) {
    CHECK(stats.epoch_loss[e] <= stats.epoch_loss[e - 1] + 1e-6);
  }
}

TEST_CASE("training is deterministic under the seed") {
  const auto sample = separable_sample(16, 16);
  TrainConfig cfg;
  cfg.max_iter = 50;
  const auto a = train(std::span(&sample, 1), SegmenterKind::kSoftmax, cfg);
  const auto b = train(std::span(&sample, 1), SegmenterKind::kSoftmax, cfg);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
}

TEST_CASE("a class with no training pixels is reported by name") {
  Image image(4, 4);
  Grid<ClassId> labels(4, 4, ClassId{0});
  const TrainSample sample{image,
                           LabelRaster(labels, LandClassSet(3, {"bg", "farm", "water"}))};
  CHECK_THROWS_WITH_AS(
      train(std::span(&sample, 1), SegmenterKind::kCentroid, TrainConfig{}),
      doctest::Contains("farm"), DataError);
}

TEST_CASE("analytic softmax gradient matches central finite differences") {
  std::mt19937 rng(4242);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (rng() % 100000) / 100000.0;
  };
  for (int trial = 0; trial < 50; ++trial) {
    SoftmaxBatch batch;
    batch.classes = 2 + rng() % 4;
    batch.dim = 2 + rng() % 5;
    const std::size_t count = 1 + rng() % 8;
    for (std::size_t s = 0; s < count; ++s) {
      batch.labels.push_back(static_cast<ClassId>(rng() % batch.classes));
      for (std::size_t d = 0; d < batch.dim; ++d) {
        batch.features.push_back(uniform(-1.0, 1.0));
      }
    }
    std::vector<double> weights(batch.classes * batch.dim), bias(batch.classes);
    for (auto& w : weights) w = uniform(-2.0, 2.0);
    for (auto& b : bias) b = uniform(-2.0, 2.0);

    std::vector<double> grad_w(weights.size()), grad_b(bias.size());
    softmax_loss_and_grad(weights, bias, batch, grad_w, grad_b);

    auto loss_at = [&](const std::vector<double>& w, const std::vector<double>& b) {
      std::vector<double> tmp_w(w.size()), tmp_b(b.size());
      return softmax_loss_and_grad(w, b, batch, tmp_w, tmp_b);
    };

    const double h = 1e-6;
    std::vector<double> fd_w(weights.size()), fd_b(bias.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      auto plus = weights, minus = weights;
      plus[i] += h;
      minus[i] -= h;
      fd_w[i] = (loss_at(plus, bias) - loss_at(minus, bias)) / (2 * h);
    }
    for (std::size_t i = 0; i < bias.size(); ++i) {
      auto plus = bias, minus = bias;
      plus[i] += h;
      minus[i] -= h;
      fd_b[i] = (loss_at(weights, plus) - loss_at(weights, minus)) / (2 * h);
    }

    double num = 0, den = 0;
    for (std::size_t i = 0; i < grad_w.size(); ++i) {
      num += (grad_w[i] - fd_w[i]) * (grad_w[i] - fd_w[i]);
      den += grad_w[i] * grad_w[i] + fd_w[i] * fd_w[i];
    }
    for (std::size_t i = 0; i < grad_b.size(); ++i) {
      num += (grad_b[i] - fd_b[i]) * (grad_b[i] - fd_b[i]);
      den += grad_b[i] * grad_b[i] + fd_b[i] * fd_b[i];
    }
    CAPTURE(trial);
    CHECK(std::sqrt(num) / std::max(std::sqrt(den), 1e-12) < 1e-5);
  }
}

TEST_CASE("prediction matches a brute-force scoring loop") {
  std::mt19937 rng(55);
  Image image(8, 8);
  for (auto& px : image.cells()) {
    px = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
          static_cast<std::uint8_t>(rng())};
  }
  SegmenterModel model;
  model.kind = SegmenterKind::kSoftmax;
  model.classes = LandClassSet(3);
  model.weights.resize(9);
  model.bias.resize(3);
  for (auto& w : model.weights) w = (rng() % 200 - 100) / 50.0;
  for (auto& b : model.bias) b = (rng() % 200 - 100) / 50.0;

  const auto predicted = predict(model, image);
  const auto features = compute_features(image, model.features);
  for (std::size_t i = 0; i < image.size(); ++i) {
    const auto x = features.pixel(i);
    double best = -1e300;
    ClassId arg = 0;
    for (ClassId c = 0; c < 3; ++c) {
      double z = model.bias[c];
      for (std::size_t d = 0; d < 3; ++d) z += model.weights[c * 3 + d] * x[d];
      if (z > best) {
        best = z;
        arg = c;
      }
    }
    CHECK(predicted.pixels()[i] == arg);
  }
}

TEST_CASE("prediction is pure and shape-preserving") {
  const auto sample = separable_sample(20, 12);
  const auto model =
      train(std::span(&sample, 1), SegmenterKind::kCentroid, TrainConfig{});
  const auto a = predict(model, sample.image);
  const auto b = predict(model, Image(sample.image));
  CHECK(a == b);
  CHECK(a.width() == 20);
  CHECK(a.height() == 12);
}

TEST_CASE("ties break toward the lowest class ID") {
  SegmenterModel model;
  model.kind = SegmenterKind::kSoftmax;
  model.classes = LandClassSet(3);
  model.weights.assign(9, 0.0);
  model.bias.assign(3, 0.0);  // all logits equal
  const auto predicted = predict(model, Image(3, 1, Rgb{50, 60, 70}));
  for (const auto id : predicted.pixels().cells()) CHECK(id == 0);
}

TEST_CASE("scaling softmax parameters by a positive constant keeps the argmax") {
  const auto sample = separable_sample(16, 8);
  TrainConfig cfg;
  cfg.max_iter = 200;
  auto model = train(std::span(&sample, 1), SegmenterKind::kSoftmax, cfg);
  const auto before = predict(model, sample.image);
  for (auto& w : model.weights) w *= 3.5;
  for (auto& b : model.bias) b *= 3.5;
  CHECK(predict(model, sample.image) == before);
}

TEST_CASE("models round-trip through the versioned JSON file") {
  const TempDir dir("model");
  const auto sample = separable_sample(16, 8);
  TrainConfig cfg;
  cfg.max_iter = 100;
  cfg.features = {FeatureKind::kRgbWindow, 3};

  for (const auto kind : {SegmenterKind::kCentroid, SegmenterKind::kSoftmax}) {
    const auto model = train(std::span(&sample, 1), kind, cfg);
    const auto path = dir.path() / "model.json";
    save_model(model, path);
    const auto loaded = load_model(path);
    CHECK(loaded.kind == model.kind);
    CHECK(loaded.classes == model.classes);
    CHECK(loaded.features == model.features);
    CHECK(loaded.centroids == model.centroids);
    CHECK(loaded.weights == model.weights);
    CHECK(loaded.bias == model.bias);
  }

  std::ofstream bad(dir.path() / "bad.json");
  bad << "{\"format\": \"something-else\"}";
  bad.close();
  CHECK_THROWS_AS(load_model(dir.path() / "bad.json"), DataError);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.initial_lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = TrainConfig{};
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
}
