// Phase masks (object and filter holograms), detection windows, and the
// azimuthal mode decomposition.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tlgi/grid.hpp"

namespace tlgi {

/// Discretization tolerance for azimuthal spectra of rasterized masks,
/// valid for analysis windows of radius >= 32 px.
inline constexpr double kDiscTolerance = 0.02;

/// A phase-only hologram: per-pixel phase in [0, 2*pi) plus a binary
/// transmission support (1 = transmitting, 0 = opaque).
struct PhaseMask {
  Grid<double> phase;
  Grid<std::uint8_t> support;
  std::string label;

  int width() const { return phase.width(); }
  int height() const { return phase.height(); }
};

/// Pixel region used for detection and for local mode analysis. Membership is
/// evaluated at pixel centers; enumeration clips to the host grid, and the
/// clipped pixel count is the effective M.
class Window {
 public:
  enum class Shape { square, disk };

  static Window square(Point center, double halfwidth) {
    return Window(Shape::square, center, halfwidth);
  }
  static Window disk(Point center, double radius) { return Window(Shape::disk, center, radius); }
  /// Square window covering an entire n x n grid.
  static Window full(int n) { return square(grid_center(n), n / 2.0); }

  Shape shape() const { return shape_; }
  Point center() const { return center_; }
  double extent() const { return extent_; }

  bool contains(int x, int y) const {
    const double dx = x - center_.x;
    const double dy = y - center_.y;
    if (shape_ == Shape::square) {
      return std::abs(dx) <= extent_ && std::abs(dy) <= extent_;
    }
    return dx * dx + dy * dy <= extent_ * extent_;
  }

  /// Member pixels clipped to a width x height grid, row-major order.
  std::vector<std::pair<int, int>> pixels(int grid_width, int grid_height) const {
    std::vector<std::pair<int, int>> out;
    const int x0 = std::max(0, static_cast<int>(std::floor(center_.x - extent_)));
    const int x1 = std::min(grid_width - 1, static_cast<int>(std::ceil(center_.x + extent_)));
    const int y0 = std::max(0, static_cast<int>(std::floor(center_.y - extent_)));
    const int y1 = std::min(grid_height - 1, static_cast<int>(std::ceil(center_.y + extent_)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (contains(x, y)) out.emplace_back(x, y);
    return out;
  }

 private:
  Window(Shape shape, Point center, double extent)
      : shape_(shape), center_(center), extent_(extent) {
    if (extent <= 0.0) throw std::invalid_argument("Window: extent must be positive");
  }

  Shape shape_;
  Point center_;
  double extent_;
};

inline PhaseMask make_uniform(int n, double phase) {
  if (n < 1) throw std::invalid_argument("make_uniform: n must be >= 1");
  PhaseMask m{Grid<double>(n, n, wrap_two_pi(phase)), Grid<std::uint8_t>(n, n, 1), "uniform"};
  return m;
}

/// Spiral (OAM) hologram: phase = charge * azimuth about the given center.
inline PhaseMask make_spiral(int n, int charge, Point center) {
  if (n < 1) throw std::invalid_argument("make_spiral: n must be >= 1");
  PhaseMask m{Grid<double>(n, n), Grid<std::uint8_t>(n, n, 1), "spiral"};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      m.phase(x, y) = wrap_two_pi(charge * std::atan2(y - center.y, x - center.x));
  return m;
}
inline PhaseMask make_spiral(int n, int charge) { return make_spiral(n, charge, grid_center(n)); }

/// Binary pi-step hologram: phase 0 on one side of the line through `center`
/// with direction `orientation`, pi on the other, sampled at pixel centers
/// (diagonal orientations therefore rasterize to a staircase boundary).
/// Pixels exactly on the line take phase 0 when the orientation lies in
/// [0, pi) mod 2*pi and pi otherwise, so make_step(n, a) and
/// make_step(n, a + pi) are identical partitions with phases swapped.
inline PhaseMask make_step(int n, double orientation, Point center) {
  if (n < 1) throw std::invalid_argument("make_step: n must be >= 1");
  const double o = wrap_two_pi(orientation);
  // Work with the line direction folded into [0, pi) and an explicit side
  // flip for the other half turn, so orientation and orientation + pi give
  // the exact same partition with phases swapped for every grid.
  const bool flipped = o >= kPi;
  const double base = flipped ? o - kPi : o;
  double nx = -std::sin(base);
  double ny = std::cos(base);
  if (std::abs(nx) < 1e-15) nx = 0.0;  // axis-aligned lines: kill trig residue
  if (std::abs(ny) < 1e-15) ny = 0.0;
  PhaseMask m{Grid<double>(n, n), Grid<std::uint8_t>(n, n, 1), "step"};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double s = nx * (x - center.x) + ny * (y - center.y);
      const double side = s > 0.0 ? 0.0 : (s < 0.0 ? kPi : 0.0);
      m.phase(x, y) = flipped ? kPi - side : side;
    }
  return m;
}
inline PhaseMask make_step(int n, double orientation) {
  return make_step(n, orientation, grid_center(n));
}

/// Circular phase object: phase pi inside the disk, 0 outside.
inline PhaseMask make_disk(int n, double radius, Point center) {
  if (n < 1) throw std::invalid_argument("make_disk: n must be >= 1");
  if (!(radius > 0.0) || radius > n / 2.0)
    throw std::invalid_argument("make_disk: radius must satisfy 0 < radius <= n/2");
  PhaseMask m{Grid<double>(n, n), Grid<std::uint8_t>(n, n, 1), "disk"};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double dx = x - center.x;
      const double dy = y - center.y;
      m.phase(x, y) = dx * dx + dy * dy <= radius * radius ? kPi : 0.0;
    }
  return m;
}
inline PhaseMask make_disk(int n, double radius) { return make_disk(n, radius, grid_center(n)); }

/// Binary raster to phase mask: nonzero cells -> pi, zero cells -> 0.
inline PhaseMask from_bitmap(const std::vector<std::vector<std::uint8_t>>& rows) {
  if (rows.empty() || rows.front().empty())
    throw std::invalid_argument("from_bitmap: raster is empty");
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  PhaseMask m{Grid<double>(w, h), Grid<std::uint8_t>(w, h, 1), "bitmap"};
  for (int y = 0; y < h; ++y) {
    if (static_cast<int>(rows[y].size()) != w)
      throw std::invalid_argument("from_bitmap: ragged raster at row " + std::to_string(y));
    for (int x = 0; x < w; ++x) m.phase(x, y) = rows[y][x] != 0 ? kPi : 0.0;
  }
  return m;
}

/// Local azimuthal mode content of a mask about a window center:
///   c_l = (1/M) sum_{x in window} exp(i*phase(x)) * exp(-i*l*azimuth(x)).
struct AzimuthalSpectrum {
  int l_max = 0;
  std::vector<std::complex<double>> coeff;  // index l + l_max
  Point center;
  int pixel_count = 0;

  std::complex<double> c(int l) const { return coeff[static_cast<std::size_t>(l + l_max)]; }
  double power(int l) const { return std::norm(c(l)); }
  double total_power() const {
    double t = 0.0;
    for (const auto& v : coeff) t += std::norm(v);
    return t;
  }
};

inline AzimuthalSpectrum azimuthal_spectrum(const PhaseMask& mask, const Window& window,
                                            int l_max) {
  if (l_max < 1) throw std::invalid_argument("azimuthal_spectrum: l_max must be >= 1");
  const auto pixels = window.pixels(mask.width(), mask.height());
  if (pixels.empty())
    throw std::invalid_argument("azimuthal_spectrum: window contains no pixels");
  AzimuthalSpectrum spec{l_max, std::vector<std::complex<double>>(2 * l_max + 1),
                         window.center(), static_cast<int>(pixels.size())};
  for (const auto& [x, y] : pixels) {
    const double theta = std::atan2(y - window.center().y, x - window.center().x);
    const std::complex<double> f = std::polar(1.0, mask.phase(x, y));
    for (int l = -l_max; l <= l_max; ++l)
      spec.coeff[static_cast<std::size_t>(l + l_max)] += f * std::polar(1.0, -l * theta);
  }
  for (auto& v : spec.coeff) v /= static_cast<double>(pixels.size());
  return spec;
}

}  // namespace tlgi
