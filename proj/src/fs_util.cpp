#include "fs_util.hpp"

#include <atomic>
#include <string>
#include <system_error>

#include <unistd.h>

#include "grainsize/error.hpp"

namespace grainsize::detail {

void atomic_write(const std::filesystem::path& target,
                  const std::function<void(const std::filesystem::path&)>& write) {
  static std::atomic<unsigned> counter{0};
  auto tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1));
  try {
    write(tmp);
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
  }
}

}  // namespace grainsize::detail
