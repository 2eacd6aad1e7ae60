// Dense 2D grids and small geometry helpers shared by all modules.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace tlgi {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2*pi).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Folds an angle into [0, pi); used for step orientations and rim azimuths,
/// which are only defined modulo pi.
inline double fold_pi(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

/// Pixel-center coordinates. Pixel (ix, iy) has its center at (ix, iy);
/// y grows with the row index.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Geometric center of an n-pixel axis: (n-1)/2, half-integer for even n.
inline Point grid_center(int n) { return {(n - 1) / 2.0, (n - 1) / 2.0}; }

/// Integer displacement of the test-arm sampling position.
struct PixelOffset {
  int dx = 0;
  int dy = 0;
};

/// Dense row-major 2D array with (x, y) indexing.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 1 && height >= 1);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

  T& operator()(int x, int y) {
    assert(in_bounds(x, y));
    return cells_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    assert(in_bounds(x, y));
    return cells_[static_cast<std::size_t>(y) * width_ + x];
  }

  const std::vector<T>& cells() const { return cells_; }
  std::vector<T>& cells() { return cells_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

}  // namespace tlgi
