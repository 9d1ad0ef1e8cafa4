#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "scpa/error.hpp"

namespace scpa {

/// Row-major 2D grid with value semantics. (x, y) addresses column x of
/// row y; y * width + x is the flat index.
template <typename T>
class Grid {
 public:
  Grid() = default;

  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}

  Grid(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw DataError("grid data size " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(width_) + "x" +
                      std::to_string(height_));
    }
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& at(std::size_t x, std::size_t y) const {
    return data_[y * width_ + x];
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> cells() { return data_; }
  std::span<const T> cells() const { return data_; }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

}  // namespace scpa
