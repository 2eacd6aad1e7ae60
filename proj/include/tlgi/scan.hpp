// Edge-enhanced ghost imaging scan: step the phase object across the filter
// window and record delta_g2 at each offset.
#pragma once

#include <cstdint>
#include <stdexcept>

#include "tlgi/correlator.hpp"
#include "tlgi/parallel.hpp"

namespace tlgi {

/// Inclusive rectangular offset ranges with a common stride.
struct OffsetRange {
  int x0 = 0, x1 = 0;
  int y0 = 0, y1 = 0;
  int stride = 1;

  bool valid() const { return stride >= 1 && x1 >= x0 && y1 >= y0; }
  int nx() const { return (x1 - x0) / stride + 1; }
  int ny() const { return (y1 - y0) / stride + 1; }
  PixelOffset at(int ix, int iy) const { return {x0 + ix * stride, y0 + iy * stride}; }
};

struct ScanConfig {
  PhaseMask object;
  PhaseMask filter;
  Window window = Window::full(1);
  OffsetRange offsets;
  EstimateMode mode = EstimateMode::analytic;
  std::uint64_t mc_realizations = 0;
  std::uint64_t seed = 0;
  double coherence_px = 0.0;
  int threads = 1;
};

/// delta_g2 per offset, plus per-offset standard errors in Monte Carlo mode.
struct ScanImage {
  OffsetRange offsets;
  Grid<double> values;
  Grid<double> std_errors;
  ScanConfig provenance;
};

/// Each offset is an independent work item; Monte Carlo offsets draw from an
/// independent realization block keyed by (seed, offset index), so the image
/// is identical for any thread count.
inline ScanImage run_scan(const ScanConfig& cfg) {
  if (!cfg.offsets.valid())
    throw std::invalid_argument("run_scan: offset ranges must be nonempty with stride >= 1");
  if (cfg.mode == EstimateMode::montecarlo && cfg.mc_realizations < 2)
    throw std::invalid_argument("run_scan: montecarlo mode requires mc_realizations >= 2");
  const int nx = cfg.offsets.nx();
  const int ny = cfg.offsets.ny();
  ScanImage img{cfg.offsets, Grid<double>(nx, ny, 0.0), Grid<double>(nx, ny, 0.0), cfg};
  parallel_for(nx * ny, cfg.threads, [&](int idx) {
    const int ix = idx % nx;
    const int iy = idx / nx;
    const PixelOffset off = cfg.offsets.at(ix, iy);
    CorrelationEstimate est;
    if (cfg.mode == EstimateMode::analytic) {
      est = analytic_g2(overlap(cfg.object, cfg.filter, off, cfg.window));
    } else {
      est = mc_correlate(cfg.object, cfg.filter, off, cfg.window, cfg.mc_realizations,
                         rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)),
                         cfg.coherence_px);
    }
    img.values(ix, iy) = est.delta_g2;
    img.std_errors(ix, iy) = est.std_error;
  });
  return img;
}

/// Affine map of the values onto [0, 1] for display output; a constant image
/// maps to all zeros. Standard errors are passed through unscaled.
inline ScanImage normalize_image(const ScanImage& img) {
  if (img.values.size() == 0) throw std::invalid_argument("normalize_image: empty image");
  double lo = img.values.cells().front();
  double hi = lo;
  for (const double v : img.values.cells()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  ScanImage out = img;
  if (hi > lo) {
    for (double& v : out.values.cells()) v = (v - lo) / (hi - lo);
  } else {
    for (double& v : out.values.cells()) v = 0.0;
  }
  return out;
}

}  // namespace tlgi
