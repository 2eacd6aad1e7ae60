// Pseudothermal speckle generation: circular complex Gaussian fields with a
// counter-based generator, so any pixel of any realization can be produced
// independently and in any order.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tlgi/grid.hpp"

namespace tlgi {
namespace rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

struct WordPair {
  std::uint64_t a;
  std::uint64_t b;
};

/// Keyed counter hash: two independent words per (seed, realization, pixel).
/// This chain is the generator's stability contract; changing it changes
/// every simulated ensemble.
inline WordPair counter_hash(std::uint64_t seed, std::uint64_t k, std::int64_t ix,
                             std::int64_t iy) {
  std::uint64_t h = mix64(seed + kGamma);
  h = mix64(h ^ (k + kGamma));
  h = mix64(h ^ (static_cast<std::uint64_t>(ix) + kGamma));
  h = mix64(h ^ (static_cast<std::uint64_t>(iy) + kGamma));
  return {mix64(h + kGamma), mix64(h + 2 * kGamma)};
}

/// Uniform in (0, 1] from the top 53 bits (never 0, so log() is safe).
inline double unit_open_closed(std::uint64_t w) { return ((w >> 11) + 1) * 0x1.0p-53; }
/// Uniform in [0, 1) from the top 53 bits.
inline double unit_closed_open(std::uint64_t w) { return (w >> 11) * 0x1.0p-53; }

/// Derives the sub-seed for an independent block of realizations (one block
/// per scan offset or rim sample).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed + kGamma) ^ (index + kGamma));
}

}  // namespace rng

/// One pseudothermal realization on a pixel grid.
struct SpeckleField {
  Grid<std::complex<double>> values;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  double coherence_px = 0.0;

  int width() const { return values.width(); }
  int height() const { return values.height(); }
};

/// Evaluates speckle values pixel by pixel. The draw for (seed, k, ix, iy) is
/// a pure function of those four integers: enlarging or cropping a grid never
/// changes the values of pixels it shares with another grid, and realizations
/// may be generated concurrently in any order.
class FieldSampler {
 public:
  explicit FieldSampler(std::uint64_t seed, double coherence_px = 0.0)
      : seed_(seed), coherence_px_(coherence_px) {
    if (coherence_px_ < 0.0)
      throw std::invalid_argument("FieldSampler: coherence_px must be >= 0");
    if (coherence_px_ > 0.0) {
      reach_ = static_cast<int>(std::ceil(4.0 * coherence_px_));
      const int d = 2 * reach_ + 1;
      weights_.resize(static_cast<std::size_t>(d) * d);
      double wsq = 0.0;
      for (int qy = -reach_; qy <= reach_; ++qy)
        for (int qx = -reach_; qx <= reach_; ++qx) {
          const double w =
              std::exp(-0.5 * (qx * qx + qy * qy) / (coherence_px_ * coherence_px_));
          weights_[static_cast<std::size_t>(qy + reach_) * d + (qx + reach_)] = w;
          wsq += w * w;
        }
      // Rescale so the smoothed field keeps unit mean square modulus.
      const double scale = 1.0 / std::sqrt(wsq);
      for (double& w : weights_) w *= scale;
    }
  }

  std::uint64_t seed() const { return seed_; }
  double coherence_px() const { return coherence_px_; }

  /// Delta-correlated unit-mean-square circular Gaussian draw:
  /// |E|^2 ~ Exp(1), phase uniform.
  std::complex<double> iid(std::uint64_t k, std::int64_t ix, std::int64_t iy) const {
    const rng::WordPair w = rng::counter_hash(seed_, k, ix, iy);
    const double radius = std::sqrt(-std::log(rng::unit_open_closed(w.a)));
    return std::polar(radius, kTwoPi * rng::unit_closed_open(w.b));
  }

  /// Field value at a pixel; convolves the i.i.d. draw with the Gaussian
  /// kernel when coherence_px > 0 (neighbor pixels outside any actual grid
  /// are well defined, so there are no boundary artifacts).
  std::complex<double> operator()(std::uint64_t k, std::int64_t ix, std::int64_t iy) const {
    if (reach_ == 0) return iid(k, ix, iy);
    const int d = 2 * reach_ + 1;
    std::complex<double> acc{0.0, 0.0};
    for (int qy = -reach_; qy <= reach_; ++qy)
      for (int qx = -reach_; qx <= reach_; ++qx)
        acc += weights_[static_cast<std::size_t>(qy + reach_) * d + (qx + reach_)] *
               iid(k, ix - qx, iy - qy);
    return acc;
  }

 private:
  std::uint64_t seed_;
  double coherence_px_;
  int reach_ = 0;
  std::vector<double> weights_;
};

/// Materializes realization k on a width x height grid.
inline SpeckleField sample_field(int width, int height, std::uint64_t seed, std::uint64_t k,
                                 double coherence_px = 0.0) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("sample_field: dimensions must be positive");
  const FieldSampler sampler(seed, coherence_px);
  SpeckleField field{Grid<std::complex<double>>(width, height), seed, k, coherence_px};
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) field.values(x, y) = sampler(k, x, y);
  return field;
}

}  // namespace tlgi
