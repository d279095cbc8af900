#ifndef GRAINSIZE_TOOLS_HANDLES_HPP
#define GRAINSIZE_TOOLS_HANDLES_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include "grainsize/grainsize.h"

namespace cli {

struct MaskDeleter {
  void operator()(gs_mask* m) const noexcept { gs_mask_free(m); }
};
struct ImageDeleter {
  void operator()(gs_image* i) const noexcept { gs_image_free(i); }
};
struct SummaryDeleter {
  void operator()(gs_stitch_summary* s) const noexcept { gs_stitch_summary_free(s); }
};
struct TableDeleter {
  void operator()(gs_robustness_table* t) const noexcept { gs_robustness_table_free(t); }
};

using MaskPtr = std::unique_ptr<gs_mask, MaskDeleter>;
using ImagePtr = std::unique_ptr<gs_image, ImageDeleter>;
using SummaryPtr = std::unique_ptr<gs_stitch_summary, SummaryDeleter>;
using TablePtr = std::unique_ptr<gs_robustness_table, TableDeleter>;

/// A failed library call, carrying the status and the library's message.
class ApiError : public std::runtime_error {
 public:
  ApiError(gs_status status, const std::string& message) : std::runtime_error(message), status_(status) {}
  gs_status status() const noexcept { return status_; }
  const char* status_name() const noexcept { return gs_status_string(status_); }

 private:
  gs_status status_;
};

inline void check(gs_status status) {
  if (status != GS_OK) throw ApiError(status, gs_last_error());
}

inline MaskPtr read_mask(const std::string& path) {
  gs_mask* m = nullptr;
  check(gs_mask_read(path.c_str(), &m));
  return MaskPtr(m);
}

inline ImagePtr read_image(const std::string& path) {
  gs_image* i = nullptr;
  check(gs_image_read(path.c_str(), &i));
  return ImagePtr(i);
}

}  // namespace cli

#endif  // GRAINSIZE_TOOLS_HANDLES_HPP
