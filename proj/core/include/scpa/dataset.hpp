#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scpa/palette.hpp"
#include "scpa/raster.hpp"
#include "scpa/transition.hpp"

namespace scpa {

struct TileRef {
  std::string id;        // "<stem>_<y>_<x>"
  std::size_t x = 0;     // pixel offsets into the source image
  std::size_t y = 0;
};

struct TileGrid {
  std::size_t tile_size = 512;
  std::vector<TileRef> tiles;
};

struct TileQuadruple {
  TileRef ref;
  Image src_image;
  Image dst_image;
  LabelRaster src_labels;
  LabelRaster dst_labels;
};

struct TileResult {
  std::vector<TileQuadruple> tiles;
  TileGrid grid;
};

/// Cuts a co-registered quadruple into aligned tile_size x tile_size
/// crops. Remainder strips that do not fill a whole tile are dropped, so a
/// 500x500 image at tile size 512 yields zero tiles.
TileResult tile(const Image& src_image, const Image& dst_image,
                const LabelRaster& src_labels, const LabelRaster& dst_labels,
                std::size_t tile_size, const std::string& stem);

enum class Subset { kTrain, kVal, kTest };

std::string subset_name(Subset subset);

struct Fraction {
  std::uint32_t num = 0;
  std::uint32_t den = 1;
};

struct SplitFractions {
  Fraction train{1, 2};
  Fraction val{1, 6};
  Fraction test{1, 3};
};

/// Seeded assignment of tile IDs to train/val/test. Counts follow the
/// floor policy: |train| = floor(n*train), |val| = floor(n*val), the
/// remainder goes to test so the largest advertised fraction stays honest.
struct SplitManifest {
  std::uint64_t seed = 0;
  SplitFractions fractions;
  std::map<std::string, Subset> assignments;

  std::vector<std::string> ids_in(Subset subset) const;
};

SplitManifest split(const std::vector<std::string>& tile_ids, std::uint64_t seed,
                    const SplitFractions& fractions = {});

std::string manifest_json(const SplitManifest& manifest);
SplitManifest manifest_from_json(const std::string& text);

/// Consistency findings for one co-registered pair; empty findings mean
/// the pair is usable. per_class_unchanged[c] is the fraction of source
/// pixels of class c that kept their class.
struct PairValidation {
  std::vector<std::string> findings;
  std::map<ClassId, double> per_class_unchanged;
  double unchanged_fraction = 0.0;

  bool ok() const { return findings.empty(); }
};

PairValidation validate_pair(const LabelRaster& src, const LabelRaster& dst,
                             const Image* src_image = nullptr,
                             const Image* dst_image = nullptr,
                             const Palette* palette = nullptr);

/// Synthetic scene generator: axis-aligned rectangles of random classes
/// over a class-0 background, then destination-side edits until the
/// requested fraction of pixels has changed class. Labels are exact by
/// construction; images color each class and add gaussian pixel noise.
struct SynthSpec {
  std::size_t width = 256;
  std::size_t height = 256;
  std::uint32_t classes = 4;
  std::uint32_t regions = 12;
  double change_budget = 0.3;  // target changed fraction, realized within +/-20%
  double noise_sigma = 8.0;    // additive gaussian, 0..255 scale
  std::vector<Rgb> colors;     // defaults to the built-in palette colors
};

struct SynthPair {
  Image src_image;
  Image dst_image;
  LabelRaster src_labels;
  LabelRaster dst_labels;
  TransitionMatrix ledger;  // maintained during generation, not recounted
};

SynthPair synth_pair(const SynthSpec& spec, std::uint64_t seed);

/// Directory layout shared by tiling, synthesis and the pipeline:
/// src_img/ dst_img/ src_lbl/ dst_lbl/ each holding <stem>.png.
struct DatasetLayout {
  std::filesystem::path root;

  std::filesystem::path src_image(const std::string& stem) const;
  std::filesystem::path dst_image(const std::string& stem) const;
  std::filesystem::path src_labels(const std::string& stem) const;
  std::filesystem::path dst_labels(const std::string& stem) const;
};

/// Creates the four subdirectories.
DatasetLayout make_dataset_dirs(const std::filesystem::path& root);

/// Stems present in all four subdirectories, sorted; errors name the stem
/// and the directory a file is missing from.
std::vector<std::string> dataset_stems(const std::filesystem::path& root);

}  // namespace scpa
