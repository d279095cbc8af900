#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>

#include "grainsize/error.hpp"
#include "grainsize/mask_io.hpp"
#include "grainsize/stitcher.hpp"
#include "oracles.hpp"

using namespace grainsize;

namespace {

Raster solid(int w, int h, std::uint16_t value, int bit_depth = 8) {
  return Raster{w, h, 1, bit_depth, std::vector<std::uint16_t>(static_cast<std::size_t>(w) * h, value)};
}

// Every pixel encodes (patch index, y, x) so misplacement is visible.
Raster numbered(int index, int w, int h) {
  Raster r{w, h, 1, 16, {}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) r.samples.push_back(static_cast<std::uint16_t>(index * 10000 + (y % 100) * 100 + x % 100));
  return r;
}

std::vector<Patch> grid_of(int rows, int cols, int w, int h) {
  std::vector<Patch> out;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.push_back({{"G", r, c}, numbered(r * cols + c, w, h)});
  return out;
}

std::uint16_t px(const Raster& r, int x, int y) { return r.samples[static_cast<std::size_t>(y) * r.width + x]; }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidArgument;
}

StitchPlan plan(int rows, int cols) {
  StitchPlan p;
  p.rows = rows;
  p.cols = cols;
  return p;
}

}  // namespace

TEST_CASE("parse_coordinate with the default pattern") {
  const auto a = parse_coordinate("RG8_r0_c2.png", kDefaultPatchPattern, 3, 4);
  CHECK(a.group_id == "RG8");
  CHECK(a.row == 0);
  CHECK(a.col == 2);
  const auto b = parse_coordinate("RG8_r2_c3.png", kDefaultPatchPattern, 3, 4);
  CHECK(b.row == 2);
  CHECK(b.col == 3);
  CHECK(parse_coordinate("a_b_r1_c1.tif", kDefaultPatchPattern, 3, 4).group_id == "a_b");
  CHECK(code_of([] { parse_coordinate("scalebar.png", kDefaultPatchPattern, 3, 4); }) == ErrorCode::NoMatch);
  CHECK(code_of([] { parse_coordinate("RG8_r3_c0.png", kDefaultPatchPattern, 3, 4); }) == ErrorCode::NoMatch);
  CHECK(code_of([] { parse_coordinate("x.png", "(?<group>x)", 3, 4); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_coordinate("x.png", "(", 3, 4); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("1x1 plan is the identity") {
  const Raster r = numbered(0, 7, 5);
  CHECK(stitch_group({{{"G", 0, 0}, r}}, plan(1, 1)) == r);
}

TEST_CASE("2x2 solid patches land in their quadrants") {
  const std::vector<Patch> patches{{{"G", 0, 0}, solid(10, 10, 1)},
                                   {{"G", 0, 1}, solid(10, 10, 2)},
                                   {{"G", 1, 0}, solid(10, 10, 3)},
                                   {{"G", 1, 1}, solid(10, 10, 4)}};
  const Raster out = stitch_group(patches, plan(2, 2));
  REQUIRE(out.width == 20);
  REQUIRE(out.height == 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) CHECK(px(out, x, y) == 1 + (x >= 10) + 2 * (y >= 10));
}

TEST_CASE("3x4 grid of 100x100 patches keeps all 48 corners") {
  const auto patches = grid_of(3, 4, 100, 100);
  const Raster out = stitch_group(patches, plan(3, 4));
  REQUIRE(out.width == 400);
  REQUIRE(out.height == 300);
  int checked = 0;
  for (const auto& p : patches) {
    for (const auto& [x, y] : std::vector<std::pair<int, int>>{{0, 0}, {99, 0}, {0, 99}, {99, 99}}) {
      CHECK(px(out, p.coord.col * 100 + x, p.coord.row * 100 + y) == px(p.image, x, y));
      ++checked;
    }
  }
  CHECK(checked == 48);
}

TEST_CASE("split then stitch is lossless") {
  std::mt19937_64 rng(2);
  for (const int channels : {1, 3}) {
    Raster big{60, 36, channels, 16, {}};
    for (int i = 0; i < 60 * 36 * channels; ++i) big.samples.push_back(static_cast<std::uint16_t>(rng()));
    auto parts = split_grid(big, 3, 4, "G");
    CHECK(parts.size() == 12);
    CHECK(parts[5].coord.row == 1);
    CHECK(parts[5].coord.col == 1);
    std::shuffle(parts.begin(), parts.end(), rng);
    CHECK(stitch_group(parts, plan(3, 4)) == big);
  }
  CHECK(code_of([] { split_grid(solid(10, 10, 0), 3, 4); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("stitch_group errors") {
  auto patches = grid_of(2, 2, 4, 4);
  auto missing = patches;
  missing.pop_back();
  CHECK(code_of([&] { stitch_group(missing, plan(2, 2)); }) == ErrorCode::MissingPatch);
  auto dup = patches;
  dup.back().coord = dup.front().coord;
  CHECK(code_of([&] { stitch_group(dup, plan(2, 2)); }) == ErrorCode::DuplicateCoordinate);
  auto odd = patches;
  odd[1].image = numbered(1, 5, 4);
  CHECK(code_of([&] { stitch_group(odd, plan(2, 2)); }) == ErrorCode::DimensionMismatch);
  StitchPlan sized = plan(2, 2);
  sized.patch_width = 8;
  CHECK(code_of([&] { stitch_group(patches, sized); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("relabel joins grains across seams only") {
  // Two 4x4 patches side by side. Left patch: id 1 touching the seam; right patch: id 1 touching it too.
  LabelMask m(8, 4);
  for (int y = 0; y < 4; ++y) {
    m.at(2, y) = 1;
    m.at(3, y) = 1;
    m.at(4, y) = 1;
  }
  m.at(0, 0) = 5;
  m.at(1, 0) = 6;  // different id inside one patch: stays separate
  m.at(6, 3) = 1;  // same id as its neighbour patch grain but not connected
  const LabelMask out = relabel_stitched(m, 4, 4);
  CHECK(out.at(2, 0) == out.at(4, 3));
  CHECK(out.at(0, 0) != out.at(1, 0));
  CHECK(out.at(6, 3) != out.at(4, 3));
  CHECK(instance_count(out) == 4);
  CHECK(out.at(0, 0) == 1);
}

TEST_CASE("stitched instance count is at least the largest per-patch count") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const LabelMask big = oracle::random_rectangles(48, 30, 25, rng, 12);
    const auto parts = split_grid(to_raster(big), 3, 4);
    std::size_t max_patch = 0;
    for (const auto& p : parts) {
      LabelMask pm(p.image.width, p.image.height, std::vector<LabelId>(p.image.samples.begin(), p.image.samples.end()));
      max_patch = std::max(max_patch, instance_count(pm));
    }
    CHECK(instance_count(relabel_stitched(big, 12, 10)) >= max_patch);
  }
}

TEST_CASE("stitch_dataset groups, strays and empty input") {
  oracle::TempDir in;
  oracle::TempDir out;
  SUBCASE("empty directory") {
    const auto s = stitch_dataset(in.path(), plan(3, 4), out.path());
    CHECK(s.groups.empty());
    CHECK(s.skipped.empty());
    CHECK(s.errors.empty());
  }
  SUBCASE("two complete groups") {
    for (const std::string g : {"A", "B"})
      for (const auto& p : grid_of(3, 4, 10, 8))
        write_raster(p.image, in / (g + "_r" + std::to_string(p.coord.row) + "_c" + std::to_string(p.coord.col) + ".png"));
    std::ofstream(in / "notes.txt") << "x";
    const auto s = stitch_dataset(in.path(), plan(3, 4), out.path(), 2);
    CHECK(s.groups == std::vector<std::string>{"A", "B"});
    CHECK(s.skipped.empty());
    CHECK(s.errors.empty());
    CHECK(s.ignored == std::vector<std::string>{"notes.txt"});
    const Raster a = read_raster(out / "A.png");
    CHECK(a == stitch_group(grid_of(3, 4, 10, 8), plan(3, 4)));
  }
  SUBCASE("one group plus a stray patch") {
    for (const auto& p : grid_of(3, 4, 10, 8))
      write_raster(p.image, in / ("A_r" + std::to_string(p.coord.row) + "_c" + std::to_string(p.coord.col) + ".tif"));
    write_raster(solid(10, 8, 1), in / "Z_r0_c0.png");
    const auto s = stitch_dataset(in.path(), plan(3, 4), out.path());
    CHECK(s.groups == std::vector<std::string>{"A"});
    REQUIRE(s.skipped.size() == 1);
    CHECK(s.skipped[0].group_id == "Z");
    CHECK(std::filesystem::exists(out / "A.tif"));
  }
  SUBCASE("masks are stitched and relabelled") {
    StitchPlan p = plan(1, 2);
    p.mask_pattern = R"((?<group>.+)_r(?<row>\d+)_c(?<col>\d+)_mask\.tif$)";
    LabelMask left(4, 4), right(4, 4);
    for (int y = 0; y < 4; ++y) {
      left.at(3, y) = 7;
      right.at(0, y) = 7;
      right.at(3, y) = 2;
    }
    write_label_mask(left, in / "S_r0_c0_mask.tif");
    write_label_mask(right, in / "S_r0_c1_mask.tif");
    const auto s = stitch_dataset(in.path(), p, out.path());
    CHECK(s.groups == std::vector<std::string>{"S"});
    const LabelMask m = read_label_mask(out / "S_mask.tif");
    CHECK(m.width() == 8);
    CHECK(instance_count(m) == 2);
    CHECK(m.at(3, 0) == m.at(4, 0));
  }
  SUBCASE("dimension mismatch is reported, not thrown") {
    write_raster(solid(4, 4, 1), in / "Q_r0_c0.png");
    write_raster(solid(5, 4, 1), in / "Q_r0_c1.png");
    const auto s = stitch_dataset(in.path(), plan(1, 2), out.path());
    CHECK(s.groups.empty());
    CHECK(s.errors.size() == 1);
  }
}
