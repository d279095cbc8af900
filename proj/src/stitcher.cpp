#include "grainsize/stitcher.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <boost/regex.hpp>

#include "disjoint_set.hpp"
#include "grainsize/error.hpp"
#include "grainsize/mask_io.hpp"
#include "parallel.hpp"

namespace grainsize {
namespace {

bool has_named_group(const std::string& pattern, const std::string& name) {
  return pattern.find("(?<" + name + ">") != std::string::npos ||
         pattern.find("(?P<" + name + ">") != std::string::npos;
}

boost::regex compile_pattern(const std::string& pattern) {
  for (const char* name : {"group", "row", "col"}) {
    if (!has_named_group(pattern, name)) {
      throw Error(ErrorCode::InvalidArgument,
                  "filename pattern needs a named capture (?<" + std::string(name) + ">...): " + pattern);
    }
  }
  try {
    return boost::regex(pattern);
  } catch (const boost::regex_error& e) {
    throw Error(ErrorCode::InvalidArgument, "bad filename pattern '" + pattern + "': " + e.what());
  }
}

int parse_index(const std::string& text, const char* what, const std::string& filename) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used == text.size() && value >= 0) return value;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::NoMatch, filename + ": " + what + " '" + text + "' is not a non-negative integer");
}

PatchCoordinate parse_with(const std::string& filename, const boost::regex& re, int rows, int cols) {
  boost::smatch m;
  if (!boost::regex_search(filename, m, re)) {
    throw Error(ErrorCode::NoMatch, filename + ": does not match the patch filename pattern");
  }
  PatchCoordinate coord{m["group"].str(), parse_index(m["row"].str(), "row", filename),
                        parse_index(m["col"].str(), "col", filename)};
  if (coord.row >= rows || coord.col >= cols) {
    throw Error(ErrorCode::NoMatch, filename + ": cell (" + std::to_string(coord.row) + ", " +
                                        std::to_string(coord.col) + ") is outside the " + std::to_string(rows) +
                                        "x" + std::to_string(cols) + " grid");
  }
  return coord;
}

struct GroupFiles {
  std::map<std::pair<int, int>, std::vector<std::filesystem::path>> images;
  std::map<std::pair<int, int>, std::vector<std::filesystem::path>> masks;
};

enum class Completeness { Absent, Partial, Duplicate, Complete };

Completeness completeness(const std::map<std::pair<int, int>, std::vector<std::filesystem::path>>& cells,
                          const StitchPlan& plan) {
  if (cells.empty()) return Completeness::Absent;
  for (const auto& [cell, files] : cells) {
    if (files.size() > 1) return Completeness::Duplicate;
  }
  return cells.size() == static_cast<std::size_t>(plan.rows) * plan.cols ? Completeness::Complete
                                                                          : Completeness::Partial;
}

std::string describe(Completeness c, std::size_t have, const StitchPlan& plan) {
  switch (c) {
    case Completeness::Absent: return "no patches";
    case Completeness::Duplicate: return "duplicate coordinate";
    case Completeness::Partial:
      return std::to_string(have) + " of " + std::to_string(plan.rows * plan.cols) + " patches present";
    case Completeness::Complete: return "complete";
  }
  return {};
}

std::vector<Patch> load_patches(const std::string& group,
                                const std::map<std::pair<int, int>, std::vector<std::filesystem::path>>& cells,
                                bool as_labels) {
  std::vector<Patch> patches;
  for (const auto& [cell, files] : cells) {
    Raster image = as_labels ? to_raster(read_label_mask(files.front())) : read_raster(files.front());
    patches.push_back({{group, cell.first, cell.second}, std::move(image)});
  }
  return patches;
}

bool all_png(const std::map<std::pair<int, int>, std::vector<std::filesystem::path>>& cells) {
  return std::all_of(cells.begin(), cells.end(), [](const auto& kv) {
    auto ext = kv.second.front().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png";
  });
}

struct GroupOutcome {
  bool written = false;
  std::vector<SkippedGroup> skipped;
  std::vector<std::string> errors;
};

}  // namespace

void StitchPlan::validate() const {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidArgument, "stitch grid needs at least one row and column");
  if (patch_width < 0 || patch_height < 0) throw Error(ErrorCode::InvalidArgument, "patch size must be >= 0");
}

PatchCoordinate parse_coordinate(const std::string& filename, const std::string& pattern, int rows, int cols) {
  return parse_with(filename, compile_pattern(pattern), rows, cols);
}

Raster stitch_group(const std::vector<Patch>& patches, const StitchPlan& plan) {
  plan.validate();
  const std::size_t expected = static_cast<std::size_t>(plan.rows) * plan.cols;
  std::set<std::pair<int, int>> seen;
  for (const auto& p : patches) {
    if (p.coord.row < 0 || p.coord.col < 0 || p.coord.row >= plan.rows || p.coord.col >= plan.cols) {
      throw Error(ErrorCode::InvalidArgument, "patch (" + std::to_string(p.coord.row) + ", " +
                                                  std::to_string(p.coord.col) + ") lies outside the grid");
    }
    if (!seen.emplace(p.coord.row, p.coord.col).second) {
      throw Error(ErrorCode::DuplicateCoordinate, "patch (" + std::to_string(p.coord.row) + ", " +
                                                      std::to_string(p.coord.col) + ") given twice");
    }
  }
  if (seen.size() != expected) {
    throw Error(ErrorCode::MissingPatch,
                std::to_string(expected - seen.size()) + " of " + std::to_string(expected) + " patches missing");
  }

  const Raster& first = patches.front().image;
  const int pw = plan.patch_width > 0 ? plan.patch_width : first.width;
  const int ph = plan.patch_height > 0 ? plan.patch_height : first.height;
  for (const auto& p : patches) {
    const Raster& im = p.image;
    if (im.width != pw || im.height != ph || im.channels != first.channels || im.bit_depth != first.bit_depth) {
      throw Error(ErrorCode::DimensionMismatch,
                  "patch (" + std::to_string(p.coord.row) + ", " + std::to_string(p.coord.col) + ") is " +
                      std::to_string(im.width) + "x" + std::to_string(im.height) + "x" + std::to_string(im.channels) +
                      "@" + std::to_string(im.bit_depth) + ", expected " + std::to_string(pw) + "x" +
                      std::to_string(ph) + "x" + std::to_string(first.channels) + "@" +
                      std::to_string(first.bit_depth));
    }
  }

  Raster out;
  out.width = plan.cols * pw;
  out.height = plan.rows * ph;
  out.channels = first.channels;
  out.bit_depth = first.bit_depth;
  out.samples.assign(out.row_stride() * out.height, 0);
  const std::size_t patch_stride = first.row_stride();
  for (const auto& p : patches) {
    const std::size_t x0 = static_cast<std::size_t>(p.coord.col) * pw * out.channels;
    for (int y = 0; y < ph; ++y) {
      const auto src = p.image.samples.begin() + static_cast<std::ptrdiff_t>(y * patch_stride);
      const std::size_t dst_row = static_cast<std::size_t>(p.coord.row) * ph + y;
      std::copy(src, src + static_cast<std::ptrdiff_t>(patch_stride),
                out.samples.begin() + static_cast<std::ptrdiff_t>(dst_row * out.row_stride() + x0));
    }
  }
  return out;
}

std::vector<Patch> split_grid(const Raster& image, int rows, int cols, const std::string& group_id) {
  if (rows < 1 || cols < 1 || image.width % cols != 0 || image.height % rows != 0) {
    throw Error(ErrorCode::DimensionMismatch, "image does not divide evenly into the grid");
  }
  const int pw = image.width / cols;
  const int ph = image.height / rows;
  std::vector<Patch> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Raster p;
      p.width = pw;
      p.height = ph;
      p.channels = image.channels;
      p.bit_depth = image.bit_depth;
      p.samples.reserve(p.row_stride() * ph);
      for (int y = 0; y < ph; ++y) {
        const auto begin = image.samples.begin() +
                           static_cast<std::ptrdiff_t>((static_cast<std::size_t>(r) * ph + y) * image.row_stride() +
                                                       static_cast<std::size_t>(c) * pw * image.channels);
        p.samples.insert(p.samples.end(), begin, begin + static_cast<std::ptrdiff_t>(p.row_stride()));
      }
      out.push_back({{group_id, r, c}, std::move(p)});
    }
  }
  return out;
}

LabelMask relabel_stitched(const LabelMask& stitched, int patch_width, int patch_height) {
  if (patch_width < 1 || patch_height < 1) throw Error(ErrorCode::InvalidArgument, "patch size must be positive");
  const int w = stitched.width();
  const int h = stitched.height();
  detail::DisjointSet sets(static_cast<std::size_t>(w) * h);
  auto index = [w](int x, int y) { return static_cast<std::uint32_t>(y) * static_cast<std::uint32_t>(w) + x; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const LabelId here = stitched.at(x, y);
      if (here == 0) continue;
      if (x + 1 < w) {
        const LabelId right = stitched.at(x + 1, y);
        const bool seam = (x + 1) % patch_width == 0;
        if (right != 0 && (seam || right == here)) sets.unite(index(x, y), index(x + 1, y));
      }
      if (y + 1 < h) {
        const LabelId below = stitched.at(x, y + 1);
        const bool seam = (y + 1) % patch_height == 0;
        if (below != 0 && (seam || below == here)) sets.unite(index(x, y), index(x, y + 1));
      }
    }
  }
  std::vector<std::uint32_t> id_of_root(static_cast<std::size_t>(w) * h, 0);
  std::uint32_t next = 0;
  LabelMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (stitched.at(x, y) == 0) continue;
      const std::uint32_t root = sets.find(index(x, y));
      if (id_of_root[root] == 0) {
        if (next == kMaxLabel) {
          throw Error(ErrorCode::LabelOverflow, "stitched mask exceeds 65535 instances");
        }
        id_of_root[root] = ++next;
      }
      out.at(x, y) = static_cast<LabelId>(id_of_root[root]);
    }
  }
  return out;
}

StitchSummary stitch_dataset(const std::filesystem::path& input_dir, const StitchPlan& plan,
                             const std::filesystem::path& output_dir, int jobs) {
  plan.validate();
  const boost::regex image_re = compile_pattern(plan.filename_pattern);
  std::optional<boost::regex> mask_re;
  if (plan.mask_pattern) mask_re = compile_pattern(*plan.mask_pattern);

  StitchSummary summary;
  std::error_code ec;
  if (!std::filesystem::is_directory(input_dir, ec)) {
    throw Error(ErrorCode::Io, input_dir.string() + ": not a readable directory");
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(input_dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::Io, input_dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::map<std::string, GroupFiles> groups;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      if (mask_re && boost::regex_search(name, *mask_re)) {
        const auto c = parse_with(name, *mask_re, plan.rows, plan.cols);
        groups[c.group_id].masks[{c.row, c.col}].push_back(path);
      } else if (boost::regex_search(name, image_re)) {
        const auto c = parse_with(name, image_re, plan.rows, plan.cols);
        groups[c.group_id].images[{c.row, c.col}].push_back(path);
      } else {
        summary.ignored.push_back(name);
      }
    } catch (const Error& e) {
      summary.errors.emplace_back(e.what());
    }
  }
  if (groups.empty()) return summary;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw Error(ErrorCode::Io, output_dir.string() + ": " + ec.message());

  std::vector<std::pair<std::string, const GroupFiles*>> work;
  for (const auto& [name, g] : groups) work.emplace_back(name, &g);
  std::vector<GroupOutcome> outcomes(work.size());

  detail::parallel_for(work.size(), jobs, [&](std::size_t i) {
    const auto& [name, g] = work[i];
    GroupOutcome& out = outcomes[i];
    const Completeness images = completeness(g->images, plan);
    const Completeness masks = completeness(g->masks, plan);
    if (images != Completeness::Complete && masks != Completeness::Complete) {
      out.skipped.push_back({name, describe(images != Completeness::Absent ? images : masks,
                                            images != Completeness::Absent ? g->images.size() : g->masks.size(),
                                            plan)});
      return;
    }
    try {
      if (images == Completeness::Complete) {
        const Raster stitched = stitch_group(load_patches(name, g->images, false), plan);
        write_raster(stitched, output_dir / (name + (all_png(g->images) ? ".png" : ".tif")));
        out.written = true;
      } else if (images != Completeness::Absent) {
        out.errors.push_back(name + ": image patches " + describe(images, g->images.size(), plan));
      }
      if (masks == Completeness::Complete) {
        const Raster raw = stitch_group(load_patches(name, g->masks, true), plan);
        LabelMask mask(raw.width, raw.height, std::vector<LabelId>(raw.samples.begin(), raw.samples.end()));
        if (plan.relabel_masks) {
          mask = relabel_stitched(mask, raw.width / plan.cols, raw.height / plan.rows);
        }
        write_label_mask(mask, output_dir / (name + "_mask.tif"));
        out.written = true;
      } else if (masks != Completeness::Absent) {
        out.errors.push_back(name + ": mask patches " + describe(masks, g->masks.size(), plan));
      }
    } catch (const Error& e) {
      out.errors.push_back(name + ": " + e.what());
      if (!out.written) out.skipped.push_back({name, e.what()});
    }
  });

  for (std::size_t i = 0; i < work.size(); ++i) {
    if (outcomes[i].written) summary.groups.push_back(work[i].first);
    for (auto& s : outcomes[i].skipped) summary.skipped.push_back(std::move(s));
    for (auto& e : outcomes[i].errors) summary.errors.push_back(std::move(e));
  }
  return summary;
}

}  // namespace grainsize
