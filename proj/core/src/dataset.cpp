#include "scpa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "rng.hpp"
#include "scpa/error.hpp"

namespace scpa {

namespace {

template <typename T>
Grid<T> crop(const Grid<T>& source, std::size_t x0, std::size_t y0,
             std::size_t size) {
  Grid<T> out(size, size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      out.at(x, y) = source.at(x0 + x, y0 + y);
    }
  }
  return out;
}

Fraction parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    throw DataError("expected a fraction like 1/2, got `" + text + "`");
  }
  return {static_cast<std::uint32_t>(std::stoul(text.substr(0, slash))),
          static_cast<std::uint32_t>(std::stoul(text.substr(slash + 1)))};
}

std::string fraction_text(const Fraction& f) {
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

void check_fractions(const SplitFractions& f) {
  for (const auto& part : {f.train, f.val, f.test}) {
    if (part.den == 0 || part.num > part.den) {
      throw DataError("split fraction " + fraction_text(part) + " is not in [0, 1]");
    }
  }
  // train + val + test must be exactly 1.
  const std::uint64_t den =
      std::uint64_t{f.train.den} * f.val.den * f.test.den;
  const std::uint64_t num = std::uint64_t{f.train.num} * f.val.den * f.test.den +
                            std::uint64_t{f.val.num} * f.train.den * f.test.den +
                            std::uint64_t{f.test.num} * f.train.den * f.val.den;
  if (num != den) {
    throw DataError("split fractions " + fraction_text(f.train) + " + " +
                    fraction_text(f.val) + " + " + fraction_text(f.test) +
                    " do not sum to 1");
  }
}

}  // namespace

TileResult tile(const Image& src_image, const Image& dst_image,
                const LabelRaster& src_labels, const LabelRaster& dst_labels,
                std::size_t tile_size, const std::string& stem) {
  if (tile_size == 0) {
    throw DataError("tile size must be at least 1");
  }
  const auto w = src_image.width(), h = src_image.height();
  if (dst_image.width() != w || dst_image.height() != h ||
      src_labels.width() != w || src_labels.height() != h ||
      dst_labels.width() != w || dst_labels.height() != h) {
    throw DataError("the four rasters of a pair must share dimensions");
  }
  TileResult result;
  result.grid.tile_size = tile_size;
  for (std::size_t y0 = 0; y0 + tile_size <= h; y0 += tile_size) {
    for (std::size_t x0 = 0; x0 + tile_size <= w; x0 += tile_size) {
      TileRef ref{stem + "_" + std::to_string(y0) + "_" + std::to_string(x0), x0, y0};
      result.grid.tiles.push_back(ref);
      result.tiles.push_back(
          {ref, crop(src_image, x0, y0, tile_size), crop(dst_image, x0, y0, tile_size),
           LabelRaster(crop(src_labels.pixels(), x0, y0, tile_size),
                       src_labels.classes()),
           LabelRaster(crop(dst_labels.pixels(), x0, y0, tile_size),
                       dst_labels.classes())});
    }
  }
  return result;
}

std::string subset_name(Subset subset) {
  switch (subset) {
    case Subset::kTrain:
      return "train";
    case Subset::kVal:
      return "val";
    case Subset::kTest:
      return "test";
  }
  throw DataError("unknown subset");
}

std::vector<std::string> SplitManifest::ids_in(Subset subset) const {
  std::vector<std::string> ids;
  for (const auto& [id, assigned] : assignments) {
    if (assigned == subset) ids.push_back(id);
  }
  return ids;
}

SplitManifest split(const std::vector<std::string>& tile_ids, std::uint64_t seed,
                    const SplitFractions& fractions) {
  if (tile_ids.empty()) {
    throw DataError("cannot split an empty tile list");
  }
  check_fractions(fractions);
  std::vector<std::string> ids = tile_ids;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw DataError("duplicate tile IDs in split input");
  }

  std::mt19937_64 rng(seed);
  detail::shuffle(ids, rng);

  const std::uint64_t n = ids.size();
  const std::uint64_t n_train = n * fractions.train.num / fractions.train.den;
  const std::uint64_t n_val = n * fractions.val.num / fractions.val.den;

  SplitManifest manifest{seed, fractions, {}};
  for (std::uint64_t i = 0; i < n; ++i) {
    const Subset subset = i < n_train             ? Subset::kTrain
                          : i < n_train + n_val   ? Subset::kVal
                                                  : Subset::kTest;
    manifest.assignments.emplace(ids[i], subset);
  }
  return manifest;
}

std::string manifest_json(const SplitManifest& manifest) {
  nlohmann::ordered_json j;
  j["seed"] = manifest.seed;
  j["fractions"] = {{"train", fraction_text(manifest.fractions.train)},
                    {"val", fraction_text(manifest.fractions.val)},
                    {"test", fraction_text(manifest.fractions.test)}};
  nlohmann::ordered_json assignments;
  for (const auto& [id, subset] : manifest.assignments) {
    assignments[id] = subset_name(subset);
  }
  j["assignments"] = assignments;
  return j.dump(2) + "\n";
}

SplitManifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed split manifest: ") + e.what());
  }
  SplitManifest manifest;
  try {
    manifest.seed = j.at("seed").get<std::uint64_t>();
    manifest.fractions.train = parse_fraction(j.at("fractions").at("train"));
    manifest.fractions.val = parse_fraction(j.at("fractions").at("val"));
    manifest.fractions.test = parse_fraction(j.at("fractions").at("test"));
    for (const auto& [id, subset] : j.at("assignments").items()) {
      const std::string name = subset.get<std::string>();
      if (name == "train") {
        manifest.assignments.emplace(id, Subset::kTrain);
      } else if (name == "val") {
        manifest.assignments.emplace(id, Subset::kVal);
      } else if (name == "test") {
        manifest.assignments.emplace(id, Subset::kTest);
      } else {
        throw DataError("unknown subset `" + name + "` for tile " + id);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed split manifest: ") + e.what());
  }
  return manifest;
}

PairValidation validate_pair(const LabelRaster& src, const LabelRaster& dst,
                             const Image* src_image, const Image* dst_image,
                             const Palette* palette) {
  PairValidation report;
  const bool same_shape = src.pixels().same_shape(dst.pixels());
  if (!same_shape) {
    report.findings.push_back(
        "label shapes differ: " + std::to_string(src.width()) + "x" +
        std::to_string(src.height()) + " vs " + std::to_string(dst.width()) + "x" +
        std::to_string(dst.height()));
  }
  if (src.classes() != dst.classes()) {
    report.findings.push_back("label rasters use different class sets");
  }
  auto check_image = [&](const Image* image, const char* which) {
    if (image && (image->width() != src.width() || image->height() != src.height())) {
      report.findings.push_back(std::string(which) + " image is " +
                                std::to_string(image->width()) + "x" +
                                std::to_string(image->height()) + ", labels are " +
                                std::to_string(src.width()) + "x" +
                                std::to_string(src.height()));
    }
  };
  check_image(src_image, "source");
  check_image(dst_image, "destination");
  if (palette && palette->size() < src.classes().count()) {
    report.findings.push_back("palette covers " + std::to_string(palette->size()) +
                              " of " + std::to_string(src.classes().count()) +
                              " classes");
  }

  if (same_shape && src.classes() == dst.classes()) {
    std::vector<std::uint64_t> per_class(src.classes().count(), 0);
    std::vector<std::uint64_t> kept(src.classes().count(), 0);
    std::uint64_t unchanged = 0;
    const auto a = src.pixels().cells();
    const auto b = dst.pixels().cells();
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++per_class[a[i]];
      if (a[i] == b[i]) {
        ++kept[a[i]];
        ++unchanged;
      }
    }
    for (std::uint32_t c = 0; c < src.classes().count(); ++c) {
      if (per_class[c] > 0) {
        report.per_class_unchanged[static_cast<ClassId>(c)] =
            static_cast<double>(kept[c]) / static_cast<double>(per_class[c]);
      }
    }
    report.unchanged_fraction =
        a.empty() ? 0.0
                  : static_cast<double>(unchanged) / static_cast<double>(a.size());
  }
  return report;
}

SynthPair synth_pair(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.width == 0 || spec.height == 0) {
    throw DataError("synthetic canvas must be non-empty");
  }
  if (spec.classes == 0) {
    throw DataError("synthetic scene needs at least one class");
  }
  if (spec.change_budget < 0.0 || spec.change_budget > 1.0) {
    throw DataError("change budget " + std::to_string(spec.change_budget) +
                    " outside [0, 1]");
  }
  if (spec.change_budget > 0.0 && spec.classes < 2) {
    throw DataError("one class cannot change; budget requires at least two");
  }
  std::vector<Rgb> colors = spec.colors;
  if (colors.empty()) {
    for (const auto& entry : default_palette().entries()) {
      colors.push_back(entry.color);
    }
  }
  if (colors.size() < spec.classes) {
    throw DataError("need " + std::to_string(spec.classes) + " class colors, have " +
                    std::to_string(colors.size()));
  }

  std::mt19937_64 rng(seed);
  const std::size_t w = spec.width, h = spec.height;
  const LandClassSet classes(spec.classes);

  // Source scene: random rectangles over a class-0 background.
  Grid<ClassId> src(w, h, ClassId{0});
  for (std::uint32_t r = 0; r < spec.regions; ++r) {
    const auto rw = detail::uniform_range(rng, std::max<std::size_t>(w / 8, 1),
                                          std::max<std::size_t>(w / 3, 1));
    const auto rh = detail::uniform_range(rng, std::max<std::size_t>(h / 8, 1),
                                          std::max<std::size_t>(h / 3, 1));
    const auto x0 = detail::uniform_below(rng, w - std::min(rw, w - 1));
    const auto y0 = detail::uniform_below(rng, h - std::min(rh, h - 1));
    const auto cls = static_cast<ClassId>(detail::uniform_below(rng, spec.classes));
    for (std::size_t y = y0; y < std::min(y0 + rh, h); ++y) {
      for (std::size_t x = x0; x < std::min(x0 + rw, w); ++x) {
        src.at(x, y) = cls;
      }
    }
  }

  // Destination starts as a copy; the pair ledger starts on the diagonal.
  Grid<ClassId> dst = src;
  std::vector<std::uint64_t> pair_counts(
      static_cast<std::size_t>(spec.classes) * spec.classes, 0);
  for (const auto cls : src.cells()) {
    ++pair_counts[static_cast<std::size_t>(cls) * spec.classes + cls];
  }

  const std::uint64_t total = w * h;
  const auto target =
      static_cast<std::uint64_t>(std::llround(spec.change_budget * total));
  std::uint64_t changed = 0;

  if (target > 0) {
    // Rectangle edits sized at most `remaining` can never overshoot the
    // target; stop once within 5% below it.
    const std::uint64_t stop_at = target - target / 20;
    std::size_t proposals = 0;
    while (changed < stop_at) {
      if (++proposals > 20000) {
        throw DataError("could not realize change budget " +
                        std::to_string(spec.change_budget) + "; reached " +
                        std::to_string(static_cast<double>(changed) / total));
      }
      const std::uint64_t remaining = target - changed;
      const auto area =
          detail::uniform_range(rng, std::max<std::uint64_t>(remaining / 4, 1),
                                remaining);
      auto rw = static_cast<std::size_t>(std::llround(std::sqrt(
          static_cast<double>(area))));
      rw = std::clamp<std::size_t>(rw, 1, std::min<std::uint64_t>(w, area));
      auto rh = std::clamp<std::size_t>(area / rw, 1, h);
      const auto x0 = detail::uniform_below(rng, w - rw + 1);
      const auto y0 = detail::uniform_below(rng, h - rh + 1);
      // Pick a class that differs from the rectangle center, so most of
      // the rectangle makes progress.
      const ClassId center = src.at(x0 + rw / 2, y0 + rh / 2);
      auto cls = static_cast<ClassId>(detail::uniform_below(rng, spec.classes - 1));
      if (cls >= center) ++cls;

      for (std::size_t y = y0; y < y0 + rh; ++y) {
        for (std::size_t x = x0; x < x0 + rw; ++x) {
          const ClassId s = src.at(x, y);
          const ClassId old = dst.at(x, y);
          if (old == cls) continue;
          if (old != s) --changed;
          if (cls != s) ++changed;
          --pair_counts[static_cast<std::size_t>(s) * spec.classes + old];
          ++pair_counts[static_cast<std::size_t>(s) * spec.classes + cls];
          dst.at(x, y) = cls;
        }
      }
    }
    const double realized = static_cast<double>(changed) / static_cast<double>(total);
    if (realized < 0.8 * spec.change_budget || realized > 1.2 * spec.change_budget) {
      throw DataError("generator realized change fraction " +
                      std::to_string(realized) + " outside +/-20% of " +
                      std::to_string(spec.change_budget));
    }
  }

  // Render both scenes: class color plus gaussian noise per channel.
  detail::Gaussian noise;
  auto render = [&](const Grid<ClassId>& labels) {
    Image image(w, h);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Rgb base = colors[labels[i]];
      auto channel = [&](std::uint8_t v) {
        const double sample = v + spec.noise_sigma * noise.next(rng);
        return static_cast<std::uint8_t>(std::clamp(sample, 0.0, 255.0));
      };
      image[i] = {channel(base.r), channel(base.g), channel(base.b)};
    }
    return image;
  };
  Image src_image = render(src);
  Image dst_image = render(dst);

  TransitionMatrix ledger(classes);
  for (std::uint32_t i = 0; i < spec.classes; ++i) {
    for (std::uint32_t j = 0; j < spec.classes; ++j) {
      const auto count = pair_counts[static_cast<std::size_t>(i) * spec.classes + j];
      if (count > 0) {
        ledger.add(static_cast<ClassId>(i), static_cast<ClassId>(j), count);
      }
    }
  }

  return SynthPair{std::move(src_image), std::move(dst_image),
                   LabelRaster(std::move(src), classes),
                   LabelRaster(std::move(dst), classes), std::move(ledger)};
}

std::filesystem::path DatasetLayout::src_image(const std::string& stem) const {
  return root / "src_img" / (stem + ".png");
}
std::filesystem::path DatasetLayout::dst_image(const std::string& stem) const {
  return root / "dst_img" / (stem + ".png");
}
std::filesystem::path DatasetLayout::src_labels(const std::string& stem) const {
  return root / "src_lbl" / (stem + ".png");
}
std::filesystem::path DatasetLayout::dst_labels(const std::string& stem) const {
  return root / "dst_lbl" / (stem + ".png");
}

DatasetLayout make_dataset_dirs(const std::filesystem::path& root) {
  for (const char* sub : {"src_img", "dst_img", "src_lbl", "dst_lbl"}) {
    std::error_code ec;
    std::filesystem::create_directories(root / sub, ec);
    if (ec) {
      throw IoError("cannot create " + (root / sub).string() + ": " + ec.message());
    }
  }
  return DatasetLayout{root};
}

std::vector<std::string> dataset_stems(const std::filesystem::path& root) {
  const auto src_dir = root / "src_img";
  if (!std::filesystem::is_directory(src_dir)) {
    throw IoError(src_dir.string() + " is not a directory");
  }
  std::vector<std::string> stems;
  for (const auto& entry : std::filesystem::directory_iterator(src_dir)) {
    if (entry.path().extension() == ".png") {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  const DatasetLayout layout{root};
  for (const auto& stem : stems) {
    for (const auto& path : {layout.dst_image(stem), layout.src_labels(stem),
                             layout.dst_labels(stem)}) {
      if (!std::filesystem::exists(path)) {
        throw DataError("pair " + stem + " is missing " + path.string());
      }
    }
  }
  return stems;
}

}  // namespace scpa
