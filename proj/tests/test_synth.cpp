#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "grainsize/error.hpp"
#include "grainsize/synth.hpp"
#include "oracles.hpp"

using namespace grainsize;
using doctest::Approx;

TEST_CASE("single seed covers the canvas") {
  SynthSpec s;
  s.width = 40;
  s.height = 30;
  s.n_seeds = 1;
  const SynthField f = generate_voronoi(s);
  CHECK(instance_count(f.labels) == 1);
  CHECK(std::all_of(f.labels.pixels().begin(), f.labels.pixels().end(), [](LabelId v) { return v == 1; }));
  CHECK(std::all_of(f.edges.pixels().begin(), f.edges.pixels().end(), [](std::uint8_t v) { return v == 0; }));
}

TEST_CASE("two seeds meet on the perpendicular bisector") {
  SUBCASE("even width") {
    const SynthField f = voronoi_from_seeds(10, 8, {{0, 4}, {9, 4}}, 0);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 10; ++x) CHECK(f.labels.at(x, y) == (x <= 4 ? 1 : 2));
      CHECK(f.edges.at(4, y) == 255);
      CHECK(f.edges.at(5, y) == 0);
    }
  }
  SUBCASE("odd width puts the tie column on the lower index") {
    const SynthField f = voronoi_from_seeds(11, 8, {{0, 4}, {10, 4}}, 0);
    for (int y = 0; y < 8; ++y) {
      CHECK(f.labels.at(5, y) == 1);
      CHECK(f.labels.at(6, y) == 2);
    }
  }
  SUBCASE("thick boundary cuts background") {
    const SynthField f = voronoi_from_seeds(10, 8, {{0, 4}, {9, 4}}, 2);
    for (int y = 0; y < 8; ++y) {
      CHECK(f.labels.at(3, y) == 1);
      CHECK(f.labels.at(4, y) == 0);
      CHECK(f.labels.at(5, y) == 0);
      CHECK(f.labels.at(6, y) == 2);
    }
    CHECK(instance_count(f.labels) == 2);
  }
}

TEST_CASE("labels equal an exhaustive nearest-seed scan") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto seeds = random_seeds(256, 256, 100, seed);
    REQUIRE(seeds.size() == 100);
    for (const auto& p : seeds) {
      CHECK(p.x >= 0.0);
      CHECK(p.x < 256.0);
      CHECK(p.y >= 0.0);
      CHECK(p.y < 256.0);
    }
    const SynthField f = voronoi_from_seeds(256, 256, seeds, 0);
    const LabelMask want = compact_labels(oracle::nearest_seed(256, 256, seeds));
    CHECK(f.labels.pixels().size() == want.pixels().size());
    CHECK(std::equal(f.labels.pixels().begin(), f.labels.pixels().end(), want.pixels().begin()));
  }
}

TEST_CASE("generation is deterministic per seed") {
  SynthSpec s;
  s.width = s.height = 128;
  s.n_seeds = 50;
  s.rng_seed = 77;
  s.boundary_thickness = 1;
  const SynthField a = generate_voronoi(s);
  const SynthField b = generate_voronoi(s);
  CHECK(std::equal(a.labels.pixels().begin(), a.labels.pixels().end(), b.labels.pixels().begin()));
  CHECK(std::equal(a.edges.pixels().begin(), a.edges.pixels().end(), b.edges.pixels().begin()));
  s.rng_seed = 78;
  const SynthField c = generate_voronoi(s);
  CHECK_FALSE(std::equal(a.labels.pixels().begin(), a.labels.pixels().end(), c.labels.pixels().begin()));
  // Thin boundaries cut background between cells.
  CHECK(std::count(a.labels.pixels().begin(), a.labels.pixels().end(), LabelId{0}) > 0);
}

TEST_CASE("zero thickness leaves no background") {
  SynthSpec s;
  s.width = s.height = 100;
  s.n_seeds = 80;
  const SynthField f = generate_voronoi(s);
  CHECK(std::count(f.labels.pixels().begin(), f.labels.pixels().end(), LabelId{0}) == 0);
  CHECK(instance_count(f.labels) <= 80);
  CHECK(instance_count(f.labels) >= 78);
}

TEST_CASE("true density") {
  SynthSpec s;
  s.width = s.height = 1024;
  s.n_seeds = 2000;
  const double area = 1024.0 * 1024.0 / (2.26 * 2.26 * 1e6);
  CHECK(true_density(s, Calibration{2.26}) == Approx(2000.0 / area));
  s.width = s.height = 1000;
  s.n_seeds = 1;
  CHECK(true_density(s, Calibration{1.0}) == Approx(1.0));
}

TEST_CASE("SynthSpec validation") {
  SynthSpec s;
  s.n_seeds = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.width = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.width = s.height = 4;
  s.n_seeds = 17;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.degradation = Degradation{1.5, 0.0, 0};
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(voronoi_from_seeds(4, 4, {}, 0), Error);
}

TEST_CASE("degrade") {
  SynthSpec s;
  s.width = s.height = 256;
  s.n_seeds = 200;
  s.rng_seed = 5;
  const LabelMask gt = generate_voronoi(s).labels;
  const std::size_t k = instance_count(gt);

  SUBCASE("zero fractions are the identity") {
    const LabelMask out = degrade(gt, {0.0, 0.0, 1});
    CHECK(std::equal(out.pixels().begin(), out.pixels().end(), gt.pixels().begin()));
  }
  SUBCASE("merging two grains leaves one") {
    const LabelMask two = voronoi_from_seeds(20, 10, {{2, 5}, {17, 5}}, 0).labels;
    const LabelMask one = degrade(two, {1.0, 0.0, 0});
    CHECK(instance_count(one) == 1);
    CHECK(static_cast<long>(instance_count(one)) - static_cast<long>(instance_count(two)) == -1);
  }
  SUBCASE("ten percent merges") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const std::size_t n = instance_count(degrade(gt, {0.1, 0.0, seed}));
      CHECK(n <= k);
      CHECK(n >= 160);
      CHECK(n == k - static_cast<std::size_t>(std::llround(0.1 * k)));
    }
  }
  SUBCASE("merges never add and splits never remove instances") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CHECK(instance_count(degrade(gt, {0.2, 0.0, seed})) < k);
      const std::size_t split = instance_count(degrade(gt, {0.0, 0.1, seed}));
      CHECK(split > k);
      CHECK(split <= k + 20);
    }
  }
  SUBCASE("output ids are compact and only background stays background") {
    const LabelMask out = degrade(gt, {0.1, 0.1, 3});
    const auto ids = oracle::ids(out);
    CHECK(*ids.rbegin() == ids.size());
    for (std::size_t i = 0; i < gt.size(); ++i) CHECK((gt.pixels()[i] == 0) == (out.pixels()[i] == 0));
  }
  SUBCASE("deterministic and seed dependent") {
    const LabelMask a = degrade(gt, {0.1, 0.1, 11});
    const LabelMask b = degrade(gt, {0.1, 0.1, 11});
    const LabelMask c = degrade(gt, {0.1, 0.1, 12});
    CHECK(std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin()));
    CHECK_FALSE(std::equal(a.pixels().begin(), a.pixels().end(), c.pixels().begin()));
  }
  CHECK_THROWS_AS(degrade(gt, {-0.1, 0.0, 0}), Error);
}
