#ifndef GRAINSIZE_RASTER_IMPL_HPP
#define GRAINSIZE_RASTER_IMPL_HPP

#include <string>

#include "grainsize/error.hpp"

namespace grainsize {

template <typename T>
Grid<T>::Grid(int width, int height, T fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative grid dimensions");
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

template <typename T>
Grid<T>::Grid(int width, int height, std::vector<T> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative grid dimensions");
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::DimensionMismatch,
                "grid data has " + std::to_string(data_.size()) + " elements, expected " +
                    std::to_string(static_cast<std::size_t>(width) * height));
  }
}

}  // namespace grainsize

#endif  // GRAINSIZE_RASTER_IMPL_HPP
