#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "aeris/common.hpp"

namespace aeris {

// Service area partitioned into uniform cells. Cells are indexed row-major
// from the south-west corner: index = row * cols + col, row 0 at y = 0.
class AreaGrid {
 public:
  AreaGrid() = default;

  AreaGrid(double width_m, double height_m, double cell_size_m)
      : width_m_(width_m), height_m_(height_m), cell_size_m_(cell_size_m) {
    if (width_m <= 0.0 || height_m <= 0.0)
      throw ConfigError("AreaGrid: area dimensions must be positive");
    if (cell_size_m <= 0.0)
      throw ConfigError("AreaGrid: cell size must be positive");
    if (cell_size_m > std::min(width_m, height_m))
      throw ConfigError("AreaGrid: cell size exceeds area dimension");
    cols_ = static_cast<int>(std::ceil(width_m / cell_size_m));
    rows_ = static_cast<int>(std::ceil(height_m / cell_size_m));
  }

  double width_m() const { return width_m_; }
  double height_m() const { return height_m_; }
  double cell_size_m() const { return cell_size_m_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int cell_count() const { return cols_ * rows_; }

  bool contains(double x, double y) const {
    return x >= 0.0 && x <= width_m_ && y >= 0.0 && y <= height_m_;
  }

  int col_of(double x) const {
    return std::min(static_cast<int>(std::floor(x / cell_size_m_)), cols_ - 1);
  }

  int row_of(double y) const {
    return std::min(static_cast<int>(std::floor(y / cell_size_m_)), rows_ - 1);
  }

  int cell_index(int col, int row) const { return row * cols_ + col; }

  int cell_of(double x, double y) const {
    if (!contains(x, y))
      throw DomainError("cell_of: position (" + std::to_string(x) + ", " +
                        std::to_string(y) + ") outside area");
    return cell_index(col_of(x), row_of(y));
  }

  // Center of a cell, clamped into the area for ragged last rows/columns.
  std::pair<double, double> cell_center(int index) const {
    if (index < 0 || index >= cell_count())
      throw DomainError("cell_center: index " + std::to_string(index) +
                        " out of range");
    int col = index % cols_;
    int row = index / cols_;
    double cx = std::min((col + 0.5) * cell_size_m_, width_m_);
    double cy = std::min((row + 0.5) * cell_size_m_, height_m_);
    return {cx, cy};
  }

  bool operator==(const AreaGrid& other) const {
    return width_m_ == other.width_m_ && height_m_ == other.height_m_ &&
           cell_size_m_ == other.cell_size_m_;
  }

 private:
  double width_m_ = 0.0;
  double height_m_ = 0.0;
  double cell_size_m_ = 0.0;
  int cols_ = 0;
  int rows_ = 0;
};

}  // namespace aeris
