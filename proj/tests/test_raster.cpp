#include <doctest.h>

#include <random>

#include "grainsize/error.hpp"
#include "grainsize/raster.hpp"
#include "oracles.hpp"

using namespace grainsize;

TEST_CASE("grid construction checks sizes") {
  const LabelMask m(3, 2, std::vector<LabelId>{0, 1, 1, 2, 2, 0});
  CHECK(m.width() == 3);
  CHECK(m.height() == 2);
  CHECK(m.at(2, 1) == 0);
  CHECK(m.at(0, 1) == 2);
  CHECK_THROWS_AS(LabelMask(2, 2, std::vector<LabelId>{1, 2, 3}), Error);
  CHECK_THROWS_AS(LabelMask(-1, 2), Error);
  try {
    LabelMask(2, 2, std::vector<LabelId>{1});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("instance index areas and boxes") {
  const LabelMask m(4, 3, std::vector<LabelId>{0, 5, 5, 0,  //
                                               0, 5, 0, 9,  //
                                               9, 9, 0, 9});
  const auto idx = instance_index(m);
  REQUIRE(idx.size() == 2);
  CHECK(idx[0].id == 5);
  CHECK(idx[0].area == 3);
  CHECK(idx[0].bbox == BoundingBox{1, 0, 2, 1});
  CHECK(idx[1].id == 9);
  CHECK(idx[1].area == 4);
  CHECK(idx[1].bbox == BoundingBox{0, 1, 3, 2});
  CHECK(instance_count(m) == 2);
}

TEST_CASE("instance areas partition the foreground") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMask m = oracle::random_labels(40, 30, 1 + trial * 37 % 300, rng);
    std::size_t nonzero = 0;
    for (const auto v : m.pixels()) nonzero += v != 0;
    std::size_t total = 0;
    for (const auto& s : instance_index(m)) total += s.area;
    CHECK(total == nonzero);
    CHECK(instance_index(m).size() == oracle::ids(m).size());
  }
}

TEST_CASE("compact labels keeps order and background") {
  const LabelMask m(5, 1, std::vector<LabelId>{0, 40, 7, 40, 65535});
  const LabelMask c = compact_labels(m);
  CHECK(c == LabelMask(5, 1, std::vector<LabelId>{0, 2, 1, 2, 3}));
  CHECK(compact_labels(LabelMask(3, 3)) == LabelMask(3, 3));
}

TEST_CASE("error codes have names") {
  CHECK(std::string(to_string(ErrorCode::TargetUnreachable)) == "target unreachable");
  const Error e(ErrorCode::EmptyMask, "nothing here");
  CHECK(e.code() == ErrorCode::EmptyMask);
  CHECK(std::string(e.what()).find("nothing here") != std::string::npos);
}
