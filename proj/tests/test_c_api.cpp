#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include "grainsize/grainsize.h"

extern "C" int gs_c_header_check(void);

using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct MaskDeleter {
  void operator()(gs_mask* m) const { gs_mask_free(m); }
};
struct ImageDeleter {
  void operator()(gs_image* m) const { gs_image_free(m); }
};
using Mask = std::unique_ptr<gs_mask, MaskDeleter>;
using Image = std::unique_ptr<gs_image, ImageDeleter>;

Mask make(int w, int h, const std::vector<uint16_t>& v) {
  gs_mask* m = nullptr;
  REQUIRE(gs_mask_create(w, h, v.data(), &m) == GS_OK);
  return Mask(m);
}

Mask synth(int size, int seeds, uint64_t rng, Image* edges = nullptr) {
  gs_synth_spec s;
  gs_synth_spec_default(&s);
  s.width = s.height = size;
  s.n_seeds = seeds;
  s.rng_seed = rng;
  gs_mask* m = nullptr;
  gs_image* e = nullptr;
  REQUIRE(gs_synth_generate(&s, &m, edges ? &e : nullptr) == GS_OK);
  if (edges) edges->reset(e);
  return Mask(m);
}

struct Scratch {
  fs::path path;
  Scratch() {
    static int n = 0;
    path = fs::temp_directory_path() / ("grainsize-capi-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("header compiles as C") { CHECK(gs_c_header_check() == 0); }

TEST_CASE("version and status strings") {
  CHECK(std::string(gs_version()).size() > 0);
  CHECK(std::string(gs_status_string(GS_OK)) == "ok");
  CHECK(std::string(gs_status_string(GS_ERR_TARGET_UNREACHABLE)) == "target unreachable");
  CHECK(std::string(gs_status_string(GS_ERR_INTERNAL)) == "internal error");
  CHECK(std::string(gs_status_string(static_cast<gs_status>(42))) == "unknown status");
}

TEST_CASE("mask handles") {
  const Mask m = make(2, 2, {0, 1, 1, 2});
  CHECK(gs_mask_width(m.get()) == 2);
  CHECK(gs_mask_height(m.get()) == 2);
  CHECK(gs_mask_data(m.get())[3] == 2);
  CHECK(gs_mask_instance_count(m.get()) == 2);
  CHECK(gs_mask_width(nullptr) == 0);
  gs_mask_free(nullptr);

  CHECK(gs_mask_create(2, 2, nullptr, nullptr) == GS_ERR_INVALID_ARGUMENT);
  CHECK(std::string(gs_last_error()).size() > 0);
}

TEST_CASE("mask round trip through a file") {
  Scratch dir;
  const Mask m = make(3, 1, {300, 0, 7});
  const std::string path = (dir.path / "m.tif").string();
  REQUIRE(gs_mask_write(m.get(), path.c_str()) == GS_OK);
  gs_mask* back = nullptr;
  REQUIRE(gs_mask_read(path.c_str(), &back) == GS_OK);
  const Mask owned(back);
  CHECK(gs_mask_data(back)[0] == 300);
  CHECK(gs_mask_data(back)[2] == 7);

  gs_mask* missing = nullptr;
  CHECK(gs_mask_read((dir.path / "nope.tif").c_str(), &missing) == GS_ERR_IO);
  CHECK(missing == nullptr);
  CHECK(std::string(gs_last_error()).find("nope.tif") != std::string::npos);
}

TEST_CASE("formula functions") {
  double v = 0;
  REQUIRE(gs_astm_g(752.7, &v) == GS_OK);
  CHECK(v == Approx(6.60).epsilon(0.002));
  REQUIRE(gs_multiplier_dynamic(0.117, &v) == GS_OK);
  CHECK(v == Approx(8.547).epsilon(1e-3));
  REQUIRE(gs_multiplier_magnification(100, &v) == GS_OK);
  CHECK(v == Approx(2.0));
  REQUIRE(gs_grain_density(60, 32, 10, &v) == GS_OK);
  CHECK(v == Approx(760));
  REQUIRE(gs_physical_area(500, 2.26, &v) == GS_OK);
  CHECK(v == Approx(0.15377).epsilon(1e-3));
  CHECK(gs_astm_g(0, &v) == GS_ERR_NON_POSITIVE_DENSITY);
  CHECK(gs_multiplier_dynamic(-1, &v) == GS_ERR_INVALID_ARGUMENT);
  CHECK(gs_astm_g(1, nullptr) == GS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("inscription and analysis") {
  const Mask m = synth(256, 300, 4);
  gs_circle c;
  REQUIRE(gs_inscribe_circle(m.get(), 2.26, 60, nullptr, &c) == GS_OK);
  CHECK(c.cx == 127.5);
  CHECK(c.cy == 127.5);
  CHECK(c.radius > 0);

  gs_jeffries_result r;
  REQUIRE(gs_analyze(m.get(), 2.26, 60, nullptr, &r) == GS_OK);
  CHECK(r.n_inside >= 60);
  CHECK(r.circle.radius == c.radius);
  CHECK(r.g == Approx(3.321928 * std::log10(r.n_a) - 2.954));

  gs_jeffries_result same;
  REQUIRE(gs_analyze(m.get(), 2.26, 60, &c, &same) == GS_OK);
  CHECK(same.n_a == r.n_a);

  const Mask tiny = make(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
  CHECK(gs_analyze(tiny.get(), 2.26, 60, nullptr, &r) == GS_ERR_TARGET_UNREACHABLE);
  const Mask empty = make(3, 3, std::vector<uint16_t>(9, 0));
  CHECK(gs_analyze(empty.get(), 2.26, 1, nullptr, &r) == GS_ERR_EMPTY_MASK);
  const double outside[2] = {-5, 1};
  CHECK(gs_inscribe_circle(m.get(), 2.26, 1, outside, &c) == GS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("prep from a synthetic edge image") {
  Image edges;
  const Mask labels = synth(128, 20, 9, &edges);
  REQUIRE(edges);
  gs_prep_config cfg;
  gs_prep_config_default(&cfg);
  CHECK(cfg.threshold == 128);
  CHECK(cfg.erosion_radius == 1);
  CHECK(cfg.min_area == 200);
  CHECK(cfg.connectivity == 4);
  cfg.erosion_radius = 0;
  cfg.min_area = 0;
  gs_mask* out = nullptr;
  REQUIRE(gs_prepare_mask(edges.get(), &cfg, &out) == GS_OK);
  const Mask owned(out);
  CHECK(gs_mask_instance_count(out) == gs_mask_instance_count(labels.get()));
  cfg.connectivity = 5;
  CHECK(gs_prepare_mask(edges.get(), &cfg, &out) == GS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("overlay and image writing") {
  Scratch dir;
  Image edges;
  const Mask m = synth(128, 40, 2, &edges);
  gs_circle c;
  REQUIRE(gs_inscribe_circle(m.get(), 2.26, 10, nullptr, &c) == GS_OK);
  gs_overlay_style style;
  gs_overlay_style_default(&style);
  const std::string a = (dir.path / "a.png").string();
  const std::string b = (dir.path / "b.png").string();
  CHECK(gs_render_overlay(nullptr, m.get(), &c, nullptr, a.c_str()) == GS_OK);
  CHECK(gs_render_overlay(edges.get(), m.get(), &c, &style, b.c_str()) == GS_OK);
  CHECK(fs::file_size(a) > 0);
  CHECK(fs::file_size(b) > 0);

  const std::string e = (dir.path / "e.png").string();
  REQUIRE(gs_image_write_png(edges.get(), e.c_str()) == GS_OK);
  gs_image* back = nullptr;
  REQUIRE(gs_image_read(e.c_str(), &back) == GS_OK);
  const Image owned(back);
  CHECK(gs_image_width(back) == 128);
  CHECK(gs_image_data(back)[0] == gs_image_data(edges.get())[0]);
}

TEST_CASE("stitching") {
  Scratch in, out;
  Image edges;
  synth(40, 5, 1, &edges);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const std::string name = "S1_r" + std::to_string(r) + "_c" + std::to_string(c) + ".png";
      REQUIRE(gs_image_write_png(edges.get(), (in.path / name).c_str()) == GS_OK);
    }
  REQUIRE(gs_image_write_png(edges.get(), (in.path / "S2_r0_c0.png").c_str()) == GS_OK);

  gs_stitch_plan plan;
  gs_stitch_plan_default(&plan);
  CHECK(plan.filename_pattern != nullptr);
  plan.rows = 2;
  plan.cols = 2;
  gs_stitch_summary* summary = nullptr;
  REQUIRE(gs_stitch_dataset(in.path.c_str(), &plan, out.path.c_str(), 2, &summary) == GS_OK);
  CHECK(gs_stitch_summary_group_count(summary) == 1);
  CHECK(std::string(gs_stitch_summary_group(summary, 0)) == "S1");
  REQUIRE(gs_stitch_summary_skipped_count(summary) == 1);
  CHECK(std::string(gs_stitch_summary_skipped_group(summary, 0)) == "S2");
  CHECK(std::string(gs_stitch_summary_skipped_reason(summary, 0)).size() > 0);
  CHECK(gs_stitch_summary_error_count(summary) == 0);
  CHECK(gs_stitch_summary_group(summary, 5) == nullptr);
  gs_stitch_summary_free(summary);

  int stitched = 0;
  for (const auto& e : fs::directory_iterator(out.path)) {
    gs_image* img = nullptr;
    REQUIRE(gs_image_read(e.path().c_str(), &img) == GS_OK);
    CHECK(gs_image_width(img) == 80);
    CHECK(gs_image_height(img) == 80);
    gs_image_free(img);
    ++stitched;
  }
  CHECK(stitched == 1);
}

TEST_CASE("evaluation") {
  const Mask gt = synth(256, 300, 12);
  gs_eval_config cfg;
  gs_eval_config_default(&cfg);
  CHECK(cfg.pixels_per_micron == 2.26);
  CHECK(cfg.target == 60);
  gs_pair_record rec;
  REQUIRE(gs_evaluate_pair(gt.get(), gt.get(), &cfg, &rec) == GS_OK);
  CHECK(rec.ap50 == 1.0);
  CHECK(rec.map_50_95 == 1.0);
  CHECK(rec.boundary_f1 == 1.0);
  CHECK(rec.count_error == 0);
  CHECK(rec.ape_g == 0.0);

  gs_degradation d{0.1, 0.0, 3};
  gs_mask* pred = nullptr;
  REQUIRE(gs_degrade(gt.get(), &d, &pred) == GS_OK);
  const Mask owned(pred);
  gs_pair_record recs[2] = {rec, {}};
  REQUIRE(gs_evaluate_pair(gt.get(), pred, &cfg, &recs[1]) == GS_OK);
  CHECK(recs[1].count_error < 0);
  gs_eval_aggregate agg;
  REQUIRE(gs_aggregate(recs, 2, &agg) == GS_OK);
  CHECK(agg.images == 2);
  CHECK(agg.g_mape == Approx(recs[1].ape_g / 2));

  const double thresholds[1] = {0.5};
  cfg.iou_thresholds = thresholds;
  cfg.iou_threshold_count = 1;
  REQUIRE(gs_evaluate_pair(gt.get(), pred, &cfg, &rec) == GS_OK);
  CHECK(rec.map_50_95 == rec.ap50);

  const Mask small = make(2, 2, {1, 1, 1, 1});
  CHECK(gs_evaluate_pair(gt.get(), small.get(), &cfg, &rec) == GS_ERR_DIMENSION_MISMATCH);

  double m = 0;
  const double p[2] = {90, 110}, g[2] = {100, 100}, z[2] = {0, 1};
  REQUIRE(gs_mape(p, g, 2, &m) == GS_OK);
  CHECK(m == Approx(10.0));
  CHECK(gs_mape(p, z, 2, &m) == GS_ERR_ZERO_GROUND_TRUTH);
}

TEST_CASE("robustness table") {
  const Mask a = synth(256, 400, 1), b = synth(256, 400, 2);
  const Mask tiny = make(4, 4, {0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0});
  const gs_mask* gts[3] = {a.get(), b.get(), tiny.get()};
  const char* names[3] = {"a", "b", "tiny"};
  const int targets[2] = {10, 60};
  const gs_circle_mode modes[2] = {GS_MODE_GT_DERIVED, GS_MODE_GT_FREE};
  gs_robustness_table* table = nullptr;
  REQUIRE(gs_robustness_sweep(gts, gts, names, 3, 2.26, targets, 2, modes, 2, 2, &table) == GS_OK);
  REQUIRE(gs_robustness_table_row_count(table) == 4);
  for (size_t i = 0; i < 4; ++i) {
    gs_robustness_row row;
    REQUIRE(gs_robustness_table_row(table, i, &row) == GS_OK);
    CHECK(row.target == targets[i / 2]);
    CHECK(row.mode == modes[i % 2]);
    CHECK(row.images == 2);
    CHECK(row.g_mape == 0.0);
    REQUIRE(row.failures == 1);
    const char* name = nullptr;
    const char* reason = nullptr;
    REQUIRE(gs_robustness_table_failure(table, i, 0, &name, &reason) == GS_OK);
    CHECK(std::string(name) == "tiny");
    CHECK(std::string(reason).size() > 0);
  }
  gs_robustness_row row;
  CHECK(gs_robustness_table_row(table, 9, &row) == GS_ERR_INVALID_ARGUMENT);
  gs_robustness_table_free(table);

  CHECK(gs_robustness_sweep(gts, gts, nullptr, 0, 2.26, targets, 2, modes, 2, 1, &table) == GS_OK);
  CHECK(gs_robustness_table_row_count(table) == 4);
  gs_robustness_table_free(table);
}

TEST_CASE("synthesis") {
  gs_synth_spec s;
  gs_synth_spec_default(&s);
  s.width = s.height = 1024;
  s.n_seeds = 2000;
  double density = 0;
  REQUIRE(gs_synth_true_density(&s, 2.26, &density) == GS_OK);
  CHECK(density == Approx(2000 / (1024.0 * 1024.0 / (2.26 * 2.26 * 1e6))));
  s.n_seeds = 0;
  gs_mask* m = nullptr;
  CHECK(gs_synth_generate(&s, &m, nullptr) == GS_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
}
