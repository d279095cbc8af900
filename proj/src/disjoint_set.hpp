#ifndef GRAINSIZE_SRC_DISJOINT_SET_HPP
#define GRAINSIZE_SRC_DISJOINT_SET_HPP

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace grainsize::detail {

/// Union-find with path halving. The smaller root always wins a union, so the root of a
/// set is its smallest member.
class DisjointSet {
 public:
  DisjointSet() = default;
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace grainsize::detail

#endif  // GRAINSIZE_SRC_DISJOINT_SET_HPP
