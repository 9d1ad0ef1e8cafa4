#include "scpa/dataset.hpp"

#include <random>
#include <set>

#include "doctest.h"
#include "scpa/change_codec.hpp"
#include "scpa/error.hpp"
#include "scpa/raster_io.hpp"
#include "test_util.hpp"

using namespace scpa;

namespace {

TileResult tile_blank(std::size_t w, std::size_t h, std::size_t tile_size) {
  const LandClassSet classes(4);
  return tile(Image(w, h), Image(w, h), LabelRaster(Grid<ClassId>(w, h), classes),
              LabelRaster(Grid<ClassId>(w, h), classes), tile_size, "t");
}

}  // namespace

TEST_CASE("tiling produces floor(H/ts) * floor(W/ts) tiles") {
  CHECK(tile_blank(1536, 1024, 512).tiles.size() == 6);  // 3x2 grid
  CHECK(tile_blank(500, 500, 512).tiles.size() == 0);    // remainder dropped
  CHECK(tile_blank(512, 512, 512).tiles.size() == 1);
  CHECK_THROWS_AS(tile_blank(16, 16, 0), DataError);
}

TEST_CASE("tile IDs carry pixel offsets") {
  const auto result = tile_blank(1024, 1024, 512);
  REQUIRE(result.tiles.size() == 4);
  CHECK(result.tiles[0].ref.id == "t_0_0");
  CHECK(result.tiles[1].ref.id == "t_0_512");
  CHECK(result.tiles[2].ref.id == "t_512_0");
  CHECK(result.tiles[3].ref.id == "t_512_512");
  CHECK(result.grid.tile_size == 512);
}

TEST_CASE("tiles stay co-registered and reassemble the cropped region") {
  std::mt19937 rng(42);
  const std::size_t w = 96, h = 64, ts = 32;
  const LandClassSet classes(5);
  Image src_img(w, h), dst_img(w, h);
  Grid<ClassId> src_lbl(w, h), dst_lbl(w, h);
  for (auto& px : src_img.cells())
    px = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
          static_cast<std::uint8_t>(rng())};
  for (auto& px : dst_img.cells())
    px = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
          static_cast<std::uint8_t>(rng())};
  for (auto& v : src_lbl.cells()) v = static_cast<ClassId>(rng() % 5);
  for (auto& v : dst_lbl.cells()) v = static_cast<ClassId>(rng() % 5);

  const auto result = tile(src_img, dst_img, LabelRaster(src_lbl, classes),
                           LabelRaster(dst_lbl, classes), ts, "x");
  REQUIRE(result.tiles.size() == 6);

  Image reassembled(w, h);
  for (const auto& quad : result.tiles) {
    for (std::size_t y = 0; y < ts; ++y) {
      for (std::size_t x = 0; x < ts; ++x) {
        reassembled.at(quad.ref.x + x, quad.ref.y + y) = quad.src_image.at(x, y);
        CHECK(quad.src_labels.pixels().at(x, y) ==
              src_lbl.at(quad.ref.x + x, quad.ref.y + y));
        CHECK(quad.dst_labels.pixels().at(x, y) ==
              dst_lbl.at(quad.ref.x + x, quad.ref.y + y));
      }
    }
  }
  CHECK(reassembled == src_img);
}

TEST_CASE("tiling rejects mismatched dimensions") {
  const LandClassSet classes(4);
  CHECK_THROWS_AS(tile(Image(64, 64), Image(64, 32),
                       LabelRaster(Grid<ClassId>(64, 64), classes),
                       LabelRaster(Grid<ClassId>(64, 64), classes), 32, "t"),
                  DataError);
}

TEST_CASE("split counts follow the floor policy") {
  std::vector<std::string> ids;
  for (int i = 0; i < 853; ++i) ids.push_back("tile_" + std::to_string(i));
  const auto manifest = split(ids, 7);
  CHECK(manifest.ids_in(Subset::kTrain).size() == 426);
  CHECK(manifest.ids_in(Subset::kVal).size() == 142);
  CHECK(manifest.ids_in(Subset::kTest).size() == 285);
  CHECK(manifest.assignments.size() == 853);
}

TEST_CASE("each tile lands in exactly one subset") {
  for (std::size_t n : {6u, 7u, 100u}) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("id" + std::to_string(i));
    const auto manifest = split(ids, 3);
    CHECK(manifest.ids_in(Subset::kTrain).size() == n / 2);
    CHECK(manifest.ids_in(Subset::kVal).size() == n / 6);
    CHECK(manifest.ids_in(Subset::kTest).size() == n - n / 2 - n / 6);
    std::set<std::string> seen;
    for (const auto& [id, subset] : manifest.assignments) seen.insert(id);
    CHECK(seen.size() == n);
  }
}

TEST_CASE("split is deterministic under the seed") {
  std::vector<std::string> ids;
  for (int i = 0; i < 60; ++i) ids.push_back("p" + std::to_string(i));
  const auto a = split(ids, 99);
  const auto b = split(ids, 99);
  CHECK(a.assignments == b.assignments);

  // Input order must not matter, only the ID set.
  auto reversed = ids;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(split(reversed, 99).assignments == a.assignments);

  const auto c = split(ids, 100);
  CHECK(c.assignments != a.assignments);
}

TEST_CASE("split rejects bad input") {
  CHECK_THROWS_AS(split({}, 1), DataError);
  CHECK_THROWS_AS(split({"a", "a"}, 1), DataError);
  SplitFractions bad;
  bad.test = {1, 4};  // 1/2 + 1/6 + 1/4 != 1
  CHECK_THROWS_AS(split({"a", "b"}, 1, bad), DataError);
}

TEST_CASE("manifests round-trip through JSON") {
  std::vector<std::string> ids{"a", "b", "c", "d", "e", "f", "g"};
  const auto manifest = split(ids, 5);
  const auto text = manifest_json(manifest);
  const auto parsed = manifest_from_json(text);
  CHECK(parsed.seed == 5);
  CHECK(parsed.assignments == manifest.assignments);
  CHECK(parsed.fractions.val.num == 1);
  CHECK(parsed.fractions.val.den == 6);
  CHECK_THROWS_AS(manifest_from_json("{"), DataError);
}

TEST_CASE("validate_pair reports unchanged fractions") {
  const LandClassSet classes(3);
  const LabelRaster src(Grid<ClassId>(2, 2, std::vector<ClassId>{0, 0, 1, 2}),
                        classes);

  SUBCASE("identical pair is 100% unchanged") {
    const auto report = validate_pair(src, src);
    CHECK(report.ok());
    CHECK(report.unchanged_fraction == 1.0);
    for (const auto& [cls, fraction] : report.per_class_unchanged) {
      CHECK(fraction == 1.0);
    }
  }

  SUBCASE("mismatched sizes produce a finding") {
    const LabelRaster odd(Grid<ClassId>(3, 2), classes);
    const auto report = validate_pair(src, odd);
    CHECK(!report.ok());
    CHECK(report.findings.size() == 1);
  }

  SUBCASE("random pair matches an unchanged-count oracle") {
    std::mt19937 rng(8);
    Grid<ClassId> a(16, 16), b(16, 16);
    for (auto& v : a.cells()) v = static_cast<ClassId>(rng() % 3);
    for (auto& v : b.cells()) v = static_cast<ClassId>(rng() % 3);
    const LabelRaster sa(a, classes), sb(b, classes);
    const auto report = validate_pair(sa, sb);
    std::uint64_t unchanged = 0;
    for (std::size_t i = 0; i < a.size(); ++i) unchanged += a[i] == b[i];
    CHECK(report.unchanged_fraction ==
          static_cast<double>(unchanged) / static_cast<double>(a.size()));
  }

  SUBCASE("image size findings") {
    const Image small(1, 1);
    const auto report = validate_pair(src, src, &small, nullptr);
    CHECK(!report.ok());
  }
}

TEST_CASE("synth_pair with zero budget leaves labels identical") {
  SynthSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.change_budget = 0.0;
  const auto pair = synth_pair(spec, 11);
  CHECK(pair.src_labels == pair.dst_labels);
  ChangeCodec codec{pair.src_labels.classes()};
  const auto cm = change_map(pair.src_labels, pair.dst_labels, codec);
  for (const auto code : cm.codes().cells()) CHECK(code == kNoChange);
}

TEST_CASE("synth_pair hits the change budget within +/-20%") {
  SynthSpec spec;
  spec.width = 256;
  spec.height = 256;
  spec.classes = 4;
  spec.change_budget = 0.3;
  const auto pair = synth_pair(spec, 1234);

  ChangeCodec codec{pair.src_labels.classes()};
  const auto cm = change_map(pair.src_labels, pair.dst_labels, codec);
  std::uint64_t changed = 0;
  for (const auto code : cm.codes().cells()) changed += code != kNoChange;
  const double fraction = static_cast<double>(changed) / (256.0 * 256.0);
  CHECK(fraction >= 0.24);
  CHECK(fraction <= 0.36);
}

TEST_CASE("synth_pair is bit-identical under the same seed") {
  SynthSpec spec;
  spec.width = 96;
  spec.height = 80;
  spec.change_budget = 0.25;
  const auto a = synth_pair(spec, 77);
  const auto b = synth_pair(spec, 77);
  CHECK(a.src_labels == b.src_labels);
  CHECK(a.dst_labels == b.dst_labels);
  CHECK(a.src_image == b.src_image);
  CHECK(a.dst_image == b.dst_image);
  const auto c = synth_pair(spec, 78);
  CHECK(c.src_image != a.src_image);
}

TEST_CASE("the generator ledger matches the realized transitions") {
  SynthSpec spec;
  spec.width = 128;
  spec.height = 128;
  spec.classes = 5;
  spec.change_budget = 0.4;
  const auto pair = synth_pair(spec, 999);
  const auto matrix = transition_matrix(pair.src_labels, pair.dst_labels);
  CHECK(pair.ledger == matrix);
}

TEST_CASE("infeasible synth specs are rejected") {
  SynthSpec spec;
  spec.change_budget = 1.5;
  CHECK_THROWS_AS(synth_pair(spec, 1), DataError);

  SynthSpec one_class;
  one_class.classes = 1;
  one_class.change_budget = 0.1;
  CHECK_THROWS_AS(synth_pair(one_class, 1), DataError);

  SynthSpec too_many;
  too_many.classes = 12;  // default palette has 7 colors
  CHECK_THROWS_AS(synth_pair(too_many, 1), DataError);
}

TEST_CASE("dataset layout round-trips stems") {
  const TempDir dir("dataset");
  const auto layout = make_dataset_dirs(dir.path());
  SynthSpec spec;
  spec.width = 32;
  spec.height = 32;
  const auto pair = synth_pair(spec, 3);
  save_image(pair.src_image, layout.src_image("p0"));
  save_image(pair.dst_image, layout.dst_image("p0"));
  save_label_raster(pair.src_labels, layout.src_labels("p0"));
  save_label_raster(pair.dst_labels, layout.dst_labels("p0"));

  CHECK(dataset_stems(dir.path()) == std::vector<std::string>{"p0"});

  std::filesystem::remove(layout.dst_labels("p0"));
  CHECK_THROWS_AS(dataset_stems(dir.path()), DataError);
}
