#include "grainsize/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "disjoint_set.hpp"
#include "grainsize/error.hpp"

namespace grainsize {
namespace {

// std::mt19937_64 output is fully specified, the standard distributions are not; these
// helpers keep generated fields identical across standard libraries.
double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 Wide;

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<Wide>(rng()) * n) >> 64);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

// Seeds bucketed on a uniform grid so the nearest seed is found by expanding rings.
class SeedGrid {
 public:
  SeedGrid(int width, int height, const std::vector<Point>& seeds) : seeds_(seeds) {
    const double area = static_cast<double>(width) * height;
    cell_ = std::max(1.0, std::sqrt(area / static_cast<double>(std::max<std::size_t>(seeds.size(), 1))));
    cols_ = std::max(1, static_cast<int>(std::ceil(width / cell_)));
    rows_ = std::max(1, static_cast<int>(std::ceil(height / cell_)));
    start_.assign(static_cast<std::size_t>(cols_) * rows_ + 1, 0);
    std::vector<std::size_t> cell_of(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      cell_of[i] = cell_index(cell_col(seeds[i].x), cell_row(seeds[i].y));
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    members_.resize(seeds.size());
    auto fill = start_;
    // Ascending seed order within each cell.
    for (std::size_t i = 0; i < seeds.size(); ++i) members_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }

  std::uint32_t nearest(int px, int py) const {
    const int cx = cell_col(px);
    const int cy = cell_row(py);
    double best_d2 = std::numeric_limits<double>::infinity();
    std::uint32_t best = 0;
    const int max_ring = std::max(cols_, rows_);
    for (int k = 0; k <= max_ring; ++k) {
      for (int j = cy - k; j <= cy + k; ++j) {
        if (j < 0 || j >= rows_) continue;
        const bool edge_row = j == cy - k || j == cy + k;
        for (int i = cx - k; i <= cx + k; i += (edge_row || k == 0) ? 1 : 2 * k) {
          if (i < 0 || i >= cols_) continue;
          const std::size_t c = cell_index(i, j);
          for (std::size_t m = start_[c]; m < start_[c + 1]; ++m) {
            const std::uint32_t s = members_[m];
            const double dx = seeds_[s].x - px;
            const double dy = seeds_[s].y - py;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2 || (d2 == best_d2 && s < best)) {
              best_d2 = d2;
              best = s;
            }
          }
        }
      }
      // Seeds in ring k + 1 are farther than k * cell from any pixel of the center cell.
      const double bound = k * cell_;
      if (bound * bound >= best_d2) break;
    }
    return best;
  }

 private:
  int cell_col(double x) const { return std::clamp(static_cast<int>(x / cell_), 0, cols_ - 1); }
  int cell_row(double y) const { return std::clamp(static_cast<int>(y / cell_), 0, rows_ - 1); }
  std::size_t cell_index(int i, int j) const { return static_cast<std::size_t>(j) * cols_ + i; }

  const std::vector<Point>& seeds_;
  double cell_ = 1.0;
  int cols_ = 1;
  int rows_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> members_;
};

// One-pixel boundary: pixels whose right or lower neighbour differs.
BinaryMask base_boundary(const Grid<std::uint32_t>& owner) {
  BinaryMask out(owner.width(), owner.height());
  for (int y = 0; y < owner.height(); ++y) {
    for (int x = 0; x < owner.width(); ++x) {
      const auto id = owner.at(x, y);
      const bool edge = (x + 1 < owner.width() && owner.at(x + 1, y) != id) ||
                        (y + 1 < owner.height() && owner.at(x, y + 1) != id);
      out.at(x, y) = edge ? 1 : 0;
    }
  }
  return out;
}

// Widens a one-pixel line to `thickness` pixels with a square window.
BinaryMask thicken(const BinaryMask& line, int thickness) {
  if (thickness <= 1) return line;
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  BinaryMask out(line.width(), line.height());
  for (int y = 0; y < line.height(); ++y) {
    for (int x = 0; x < line.width(); ++x) {
      if (!line.at(x, y)) continue;
      for (int dy = lo; dy <= hi; ++dy) {
        for (int dx = lo; dx <= hi; ++dx) {
          if (out.contains(x + dx, y + dy)) out.at(x + dx, y + dy) = 1;
        }
      }
    }
  }
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "synthetic field needs positive size");
  if (n_seeds < 1) throw Error(ErrorCode::InvalidArgument, "n_seeds must be >= 1");
  if (static_cast<long long>(n_seeds) > static_cast<long long>(width) * height) {
    throw Error(ErrorCode::InvalidArgument, "more seeds than pixels");
  }
  if (n_seeds > kMaxLabel) throw Error(ErrorCode::LabelOverflow, "n_seeds exceeds the 16-bit label range");
  if (boundary_thickness < 0) throw Error(ErrorCode::InvalidArgument, "boundary thickness must be >= 0");
  if (degradation) {
    const auto& d = *degradation;
    if (!(d.merge_fraction >= 0.0 && d.merge_fraction <= 1.0) || !(d.split_fraction >= 0.0 && d.split_fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "degradation fractions must lie in [0, 1]");
    }
  }
}

std::vector<Point> random_seeds(int width, int height, int n_seeds, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::vector<Point> seeds(static_cast<std::size_t>(std::max(n_seeds, 0)));
  for (auto& s : seeds) {
    s.x = unit_real(rng) * width;
    s.y = unit_real(rng) * height;
  }
  return seeds;
}

SynthField voronoi_from_seeds(int width, int height, const std::vector<Point>& seeds, int boundary_thickness) {
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed is required");
  if (seeds.size() > kMaxLabel) throw Error(ErrorCode::LabelOverflow, "too many seeds for 16-bit labels");
  if (boundary_thickness < 0) throw Error(ErrorCode::InvalidArgument, "boundary thickness must be >= 0");
  const SeedGrid grid(width, height, seeds);
  Grid<std::uint32_t> owner(width, height, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) owner.at(x, y) = grid.nearest(x, y);
  }

  const BinaryMask line = base_boundary(owner);
  const BinaryMask cut = thicken(line, boundary_thickness);
  const BinaryMask drawn = boundary_thickness == 0 ? line : cut;

  LabelMask labels(width, height);
  GrayImage edges(width, height, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const bool on_boundary = boundary_thickness > 0 && cut.at(x, y);
      labels.at(x, y) = on_boundary ? 0 : static_cast<LabelId>(owner.at(x, y) + 1);
      edges.at(x, y) = drawn.at(x, y) ? 255 : 0;
    }
  }
  return {compact_labels(labels), std::move(edges), seeds};
}

SynthField generate_voronoi(const SynthSpec& spec) {
  spec.validate();
  SynthField field = voronoi_from_seeds(spec.width, spec.height,
                                        random_seeds(spec.width, spec.height, spec.n_seeds, spec.rng_seed),
                                        spec.boundary_thickness);
  if (spec.degradation) field.labels = degrade(field.labels, *spec.degradation);
  return field;
}

double true_density(const SynthSpec& spec, const Calibration& calibration) {
  const double c = calibration.pixels_per_micron();
  const double area_mm2 = static_cast<double>(spec.width) * spec.height / (c * c * 1e6);
  return spec.n_seeds / area_mm2;
}

LabelMask degrade(const LabelMask& mask, const Degradation& degradation) {
  if (!(degradation.merge_fraction >= 0.0 && degradation.merge_fraction <= 1.0) ||
      !(degradation.split_fraction >= 0.0 && degradation.split_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "degradation fractions must lie in [0, 1]");
  }
  const std::size_t k = instance_count(mask);
  const auto merges = static_cast<std::size_t>(std::llround(degradation.merge_fraction * static_cast<double>(k)));
  const auto splits = static_cast<std::size_t>(std::llround(degradation.split_fraction * static_cast<double>(k)));
  if (merges == 0 && splits == 0) return mask;

  std::mt19937_64 rng(degradation.rng_seed);
  const int w = mask.width();
  const int h = mask.height();
  detail::DisjointSet groups(static_cast<std::size_t>(kMaxLabel) + 1);

  if (merges > 0) {
    // Neighbouring grains: the first nonzero label within three steps right or down,
    // so grains separated by a thin boundary still count as adjacent.
    constexpr int kReach = 3;
    std::set<std::pair<LabelId, LabelId>> adjacent;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const LabelId a = mask.at(x, y);
        if (a == 0) continue;
        for (const auto& [sx, sy] : {std::pair{1, 0}, std::pair{0, 1}}) {
          for (int step = 1; step <= kReach; ++step) {
            const int nx = x + sx * step;
            const int ny = y + sy * step;
            if (!mask.contains(nx, ny)) break;
            const LabelId b = mask.at(nx, ny);
            if (b == 0) continue;
            if (b != a) adjacent.emplace(std::min(a, b), std::max(a, b));
            break;
          }
        }
      }
    }
    std::vector<std::pair<LabelId, LabelId>> pairs(adjacent.begin(), adjacent.end());
    shuffle(pairs, rng);
    std::size_t done = 0;
    for (const auto& [a, b] : pairs) {
      if (done == merges) break;
      if (groups.unite(a, b)) ++done;
    }
  }

  // Working labels: merged group root, later extended by split halves above kMaxLabel.
  Grid<std::uint32_t> work(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const LabelId id = mask.at(x, y);
      work.at(x, y) = id == 0 ? 0 : groups.find(id);
    }
  }

  if (splits > 0) {
    std::vector<double> sx(static_cast<std::size_t>(kMaxLabel) + 1, 0.0);
    std::vector<double> sy(sx.size(), 0.0);
    std::vector<std::size_t> n(sx.size(), 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto id = work.at(x, y);
        if (id == 0) continue;
        sx[id] += x;
        sy[id] += y;
        ++n[id];
      }
    }
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t id = 1; id < n.size(); ++id) {
      if (n[id] > 0) candidates.push_back(id);
    }
    shuffle(candidates, rng);
    candidates.resize(std::min(splits, candidates.size()));
    std::sort(candidates.begin(), candidates.end());

    struct Chord {
      double cx, cy, nx, ny;
      std::uint32_t new_id;
    };
    std::vector<std::optional<Chord>> chord(sx.size());
    std::uint32_t next_id = static_cast<std::uint32_t>(kMaxLabel) + 1;
    for (const auto id : candidates) {
      const double theta = unit_real(rng) * std::numbers::pi;
      chord[id] = Chord{sx[id] / n[id], sy[id] / n[id], std::cos(theta), std::sin(theta), next_id++};
    }
    Grid<std::uint32_t> split = work;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto id = work.at(x, y);
        if (id == 0 || !chord[id]) continue;
        const Chord& c = *chord[id];
        if ((x - c.cx) * c.nx + (y - c.cy) * c.ny > 0.0) {
          split.at(x, y) = c.new_id;
        }
      }
    }
    work = std::move(split);
  }

  // Compact to 1..K' in order of working id.
  std::vector<std::uint32_t> used;
  for (const auto id : work.pixels()) {
    if (id != 0) used.push_back(id);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  if (used.size() > kMaxLabel) throw Error(ErrorCode::LabelOverflow, "degraded mask exceeds 65535 instances");
  LabelMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto id = work.at(x, y);
      if (id == 0) continue;
      const auto pos = std::lower_bound(used.begin(), used.end(), id) - used.begin();
      out.at(x, y) = static_cast<LabelId>(pos + 1);
    }
  }
  return out;
}

}  // namespace grainsize
