#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qpb {

// Row-major 2-D array.
template <class T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(checked(rows, cols)), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool same_shape(const Grid2D& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  static long checked(int rows, int cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Grid2D: negative dimension");
    return static_cast<long>(rows) * cols;
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

}  // namespace qpb
