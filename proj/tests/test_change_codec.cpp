#include "scpa/change_codec.hpp"

#include <random>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "scpa/error.hpp"

using namespace scpa;

namespace {

// Enumeration oracle: ordered (src, dst) pairs with src != dst, sorted
// lexicographically, give codes 1..N-1 in order.
std::vector<ClassPair> ordered_pairs(std::uint32_t count) {
  std::vector<ClassPair> pairs;
  for (std::uint32_t src = 0; src < count; ++src) {
    for (std::uint32_t dst = 0; dst < count; ++dst) {
      if (src != dst) {
        pairs.push_back({static_cast<ClassId>(src), static_cast<ClassId>(dst)});
      }
    }
  }
  return pairs;
}

}  // namespace

TEST_CASE("max_change_types follows L^2 - L + 1") {
  CHECK(max_change_types(7) == 43);
  CHECK(max_change_types(1) == 1);
  CHECK(max_change_types(2) == 3);
  CHECK_THROWS_AS(max_change_types(0), DataError);
}

TEST_CASE("encode matches the canonical ordering") {
  ChangeCodec codec{LandClassSet(7)};
  CHECK(codec.n_types() == 43);
  CHECK(codec.encode(3, 3) == 0);
  CHECK(codec.encode(0, 1) == 1);
  CHECK(codec.encode(1, 0) == 7);
  CHECK(codec.encode(1, 3) == 9);
  CHECK_THROWS_AS(codec.encode(7, 0), DataError);
  CHECK_THROWS_AS(codec.encode(0, 7), DataError);
}

TEST_CASE("decode inverts encode") {
  ChangeCodec codec{LandClassSet(7)};
  CHECK(!codec.decode(0).has_value());
  CHECK(codec.decode(1) == ClassPair{0, 1});
  CHECK(codec.decode(42) == ClassPair{6, 5});
  CHECK_THROWS_AS(codec.decode(43), DataError);

  // The last code belongs to the last pair in lexicographic order.
  const auto pairs = ordered_pairs(7);
  REQUIRE(pairs.size() == 42);
  CHECK(codec.decode(42) == pairs.back());
}

TEST_CASE("codes enumerate pairs in lexicographic order") {
  for (std::uint32_t count : {2u, 3u, 7u, 16u}) {
    ChangeCodec codec{LandClassSet(count)};
    const auto pairs = ordered_pairs(count);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CAPTURE(count);
      CAPTURE(i);
      CHECK(codec.encode(pairs[i].src, pairs[i].dst) == i + 1);
      CHECK(codec.decode(static_cast<ChangeCode>(i + 1)) == pairs[i]);
    }
  }
}

TEST_CASE("codec is bijective and asymmetric for L in 1..16") {
  for (std::uint32_t count = 1; count <= 16; ++count) {
    ChangeCodec codec{LandClassSet(count)};
    const auto n = codec.n_types();
    CHECK(n == count * count - count + 1);

    std::set<ChangeCode> image{kNoChange};
    for (std::uint32_t a = 0; a < count; ++a) {
      for (std::uint32_t b = 0; b < count; ++b) {
        const auto code = codec.encode(static_cast<ClassId>(a),
                                       static_cast<ClassId>(b));
        CHECK(code < n);
        image.insert(code);
        if (a != b) {
          CHECK(code != codec.encode(static_cast<ClassId>(b),
                                     static_cast<ClassId>(a)));
          CHECK(codec.decode(code) ==
                ClassPair{static_cast<ClassId>(a), static_cast<ClassId>(b)});
        } else {
          CHECK(code == kNoChange);
        }
      }
    }
    CHECK(image.size() == n);
    for (std::uint32_t code = 0; code < n; ++code) {
      const auto pair = codec.decode(static_cast<ChangeCode>(code));
      if (pair) {
        CHECK(codec.encode(pair->src, pair->dst) == code);
      } else {
        CHECK(code == kNoChange);
      }
    }
  }
}

TEST_CASE("degenerate single-class codec has exactly one code") {
  ChangeCodec codec{LandClassSet(1)};
  CHECK(codec.n_types() == 1);
  CHECK(codec.encode(0, 0) == 0);
  CHECK(!codec.decode(0).has_value());
  CHECK_THROWS_AS(codec.decode(1), DataError);
}

TEST_CASE("type_name renders pairs through class names") {
  ChangeCodec codec{
      LandClassSet(3, {"background", "farmland", "water"})};
  CHECK(codec.type_name(0) == "no_change");
  CHECK(codec.type_name(codec.encode(1, 2)) == "farmland -> water");
}

TEST_CASE("change_map applies encode per pixel") {
  ChangeCodec codec{LandClassSet(7)};

  SUBCASE("identity input is all zero") {
    Grid<ClassId> g(4, 3);
    std::mt19937 rng(7);
    for (auto& v : g.cells()) v = static_cast<ClassId>(rng() % 7);
    LabelRaster raster(g, codec.classes());
    const auto cm = change_map(raster, raster, codec);
    for (auto code : cm.codes().cells()) CHECK(code == kNoChange);
  }

  SUBCASE("1x2 example") {
    LabelRaster src(Grid<ClassId>(2, 1, std::vector<ClassId>{1, 1}),
                    codec.classes());
    LabelRaster dst(Grid<ClassId>(2, 1, std::vector<ClassId>{1, 3}),
                    codec.classes());
    const auto cm = change_map(src, dst, codec);
    CHECK(cm.codes()[0] == 0);
    CHECK(cm.codes()[1] == 9);
    CHECK(cm.codec().class_count == 7);
  }

  SUBCASE("random pair matches the pixelwise loop oracle") {
    ChangeCodec codec4{LandClassSet(4)};
    std::mt19937 rng(99);
    Grid<ClassId> a(16, 16), b(16, 16);
    for (auto& v : a.cells()) v = static_cast<ClassId>(rng() % 4);
    for (auto& v : b.cells()) v = static_cast<ClassId>(rng() % 4);
    LabelRaster src(a, codec4.classes()), dst(b, codec4.classes());
    const auto cm = change_map(src, dst, codec4);
    for (std::size_t y = 0; y < 16; ++y) {
      for (std::size_t x = 0; x < 16; ++x) {
        CHECK(cm.codes().at(x, y) == codec4.encode(a.at(x, y), b.at(x, y)));
      }
    }
  }

  SUBCASE("dimension mismatch is rejected") {
    LabelRaster src(Grid<ClassId>(2, 2), codec.classes());
    LabelRaster dst(Grid<ClassId>(3, 2), codec.classes());
    CHECK_THROWS_AS(change_map(src, dst, codec), DataError);
  }
}

TEST_CASE("label raster rejects out-of-range IDs with coordinates") {
  Grid<ClassId> g(3, 2);
  g.at(2, 1) = 9;
  CHECK_THROWS_WITH_AS(LabelRaster(g, LandClassSet(7)),
                       doctest::Contains("(2, 1)"), DataError);
}
