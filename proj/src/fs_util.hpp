#ifndef GRAINSIZE_SRC_FS_UTIL_HPP
#define GRAINSIZE_SRC_FS_UTIL_HPP

#include <filesystem>
#include <functional>

namespace grainsize::detail {

/// Runs `write` against a sibling temporary path and renames it over `target`, so readers
/// never observe a half-written file. The temporary is removed if `write` throws.
void atomic_write(const std::filesystem::path& target,
                  const std::function<void(const std::filesystem::path&)>& write);

}  // namespace grainsize::detail

#endif  // GRAINSIZE_SRC_FS_UTIL_HPP
