#ifndef GRAINSIZE_TESTS_ORACLES_HPP
#define GRAINSIZE_TESTS_ORACLES_HPP

// Brute-force reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "grainsize/jeffries.hpp"
#include "grainsize/raster.hpp"
#include "grainsize/seg_eval.hpp"

namespace oracle {

using namespace grainsize;

inline BinaryMask random_binary(int w, int h, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution bit(p);
  BinaryMask m(w, h);
  for (auto& v : m.pixels()) v = bit(rng) ? 1 : 0;
  return m;
}

/// Random axis-aligned rectangles painted in order, later ones on top.
inline LabelMask random_rectangles(int w, int h, int n, std::mt19937_64& rng, int max_side = 16) {
  LabelMask m(w, h);
  std::uniform_int_distribution<int> side(2, max_side);
  for (int id = 1; id <= n; ++id) {
    const int rw = side(rng), rh = side(rng);
    const int x0 = std::uniform_int_distribution<int>(0, std::max(0, w - rw))(rng);
    const int y0 = std::uniform_int_distribution<int>(0, std::max(0, h - rh))(rng);
    for (int y = y0; y < std::min(h, y0 + rh); ++y)
      for (int x = x0; x < std::min(w, x0 + rw); ++x) m.at(x, y) = static_cast<LabelId>(id);
  }
  return m;
}

/// Random noise labels: every pixel gets a value in [0, n].
inline LabelMask random_labels(int w, int h, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> label(0, n);
  LabelMask m(w, h);
  for (auto& v : m.pixels()) v = static_cast<LabelId>(label(rng));
  return m;
}

/// BFS flood fill, components numbered in raster order of their first pixel.
inline Grid<std::uint32_t> flood_fill(const BinaryMask& m, bool eight) {
  Grid<std::uint32_t> out(m.width(), m.height(), 0);
  std::uint32_t next = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y) || out.at(x, y)) continue;
      ++next;
      std::deque<std::pair<int, int>> queue{{x, y}};
      out.at(x, y) = next;
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (!m.contains(nx, ny) || !m.at(nx, ny) || out.at(nx, ny)) continue;
            out.at(nx, ny) = next;
            queue.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return out;
}

inline std::uint32_t max_label(const Grid<std::uint32_t>& g) {
  std::uint32_t m = 0;
  for (const auto v : g.pixels()) m = std::max(m, v);
  return m;
}

struct Extent {
  double d_min = std::numeric_limits<double>::infinity();
  double d_max = -1.0;
};

inline std::map<LabelId, Extent> extents(const LabelMask& m, Point c) {
  std::map<LabelId, Extent> out;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      const LabelId id = m.at(x, y);
      if (!id) continue;
      const double d = std::sqrt((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y));
      auto& e = out[id];
      e.d_min = std::min(e.d_min, d);
      e.d_max = std::max(e.d_max, d);
    }
  }
  return out;
}

inline std::set<LabelId> ids(const LabelMask& m) {
  std::set<LabelId> out;
  for (const auto v : m.pixels())
    if (v) out.insert(v);
  return out;
}

/// IoU of every (gt, pred) id pair by direct pixel counting.
inline std::map<std::pair<LabelId, LabelId>, double> iou_table(const LabelMask& gt, const LabelMask& pred) {
  std::map<LabelId, std::size_t> ga, pa;
  std::map<std::pair<LabelId, LabelId>, std::size_t> inter;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const LabelId g = gt.pixels()[i], p = pred.pixels()[i];
    if (g) ++ga[g];
    if (p) ++pa[p];
    if (g && p) ++inter[{g, p}];
  }
  std::map<std::pair<LabelId, LabelId>, double> out;
  for (const auto& [k, n] : inter) {
    out[k] = static_cast<double>(n) / static_cast<double>(ga[k.first] + pa[k.second] - n);
  }
  return out;
}

/// Maximum number of disjoint (gt, pred) pairs with IoU >= threshold, by exhaustive search.
inline std::size_t max_assignment(const std::vector<LabelId>& gt_ids, const std::vector<LabelId>& pred_ids,
                                  const std::map<std::pair<LabelId, LabelId>, double>& iou, double threshold,
                                  std::size_t gi = 0, std::set<LabelId> used = {}) {
  if (gi == gt_ids.size()) return 0;
  std::size_t best = max_assignment(gt_ids, pred_ids, iou, threshold, gi + 1, used);
  for (const LabelId p : pred_ids) {
    if (used.count(p)) continue;
    const auto it = iou.find({gt_ids[gi], p});
    if (it == iou.end() || it->second < threshold - kIouSlack) continue;
    auto next = used;
    next.insert(p);
    best = std::max(best, 1 + max_assignment(gt_ids, pred_ids, iou, threshold, gi + 1, next));
  }
  return best;
}

/// Nonzero pixels with a 4-neighbour of a different value.
inline std::vector<std::pair<int, int>> boundary(const LabelMask& m) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      const LabelId v = m.at(x, y);
      if (!v) continue;
      const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& d : nb) {
        const int nx = x + d[0], ny = y + d[1];
        if (m.contains(nx, ny) && m.at(nx, ny) != v) {
          out.emplace_back(x, y);
          break;
        }
      }
    }
  }
  return out;
}

inline double boundary_f1(const LabelMask& gt, const LabelMask& pred, double tol) {
  const auto b_gt = boundary(gt);
  const auto b_pr = boundary(pred);
  if (b_gt.empty() && b_pr.empty()) return 1.0;
  if (b_gt.empty() || b_pr.empty()) return 0.0;
  auto fraction = [tol](const auto& from, const auto& to) {
    std::size_t hit = 0;
    for (const auto& [x, y] : from) {
      for (const auto& [u, v] : to) {
        const double d2 = double(x - u) * (x - u) + double(y - v) * (y - v);
        if (d2 <= tol * tol + 1e-9) {
          ++hit;
          break;
        }
      }
    }
    return static_cast<double>(hit) / static_cast<double>(from.size());
  };
  const double precision = fraction(b_pr, b_gt);
  const double recall = fraction(b_gt, b_pr);
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

/// Index of the nearest seed, lowest index on ties, by scanning every seed.
inline LabelMask nearest_seed(int w, int h, const std::vector<Point>& seeds) {
  LabelMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        const double dx = x - seeds[i].x, dy = y - seeds[i].y;
        const double d = dx * dx + dy * dy;
        if (d < best) {
          best = d;
          arg = i;
        }
      }
      out.at(x, y) = static_cast<LabelId>(arg + 1);
    }
  }
  return out;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("grainsize-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle

#endif  // GRAINSIZE_TESTS_ORACLES_HPP
