// Second-order intensity correlation between the two arms: the analytic
// overlap route and the Monte Carlo estimator over shared speckle
// realizations.
//
// Both arms project their masked copy of one speckle field onto the uniform
// mode of the detection window (lens + on-axis point detector). For thermal
// fields this gives
//   g2 = 1 + |Gamma|^2 / (M_t * M_r),
// with Gamma the window overlap of the two transmissions, the reference arm
// entering conjugated.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tlgi/grid.hpp"
#include "tlgi/mask.hpp"
#include "tlgi/speckle.hpp"

namespace tlgi {

enum class EstimateMode { analytic, montecarlo };

struct CorrelationEstimate {
  double g2 = 1.0;
  double delta_g2 = 0.0;  // g2 - 1
  double std_error = 0.0; // 0 in analytic mode
  std::uint64_t n_realizations = 0;
  EstimateMode mode = EstimateMode::analytic;
};

struct Overlap {
  std::complex<double> gamma;
  int m_test = 0;  // transmitting test-arm pixels within the window
  int m_ref = 0;   // transmitting reference-arm pixels within the window
};

/// Window overlap of the two arms:
///   Gamma = sum_{x in window} s_t(x+offset) s_r(x) exp(i[phi_obj(x+offset) - phi_fil(x)]).
/// Window pixels live on the filter grid; the object is sampled at x+offset
/// and counts as opaque outside its own grid.
inline Overlap overlap(const PhaseMask& object, const PhaseMask& filter, PixelOffset offset,
                       const Window& window) {
  const auto pixels = window.pixels(filter.width(), filter.height());
  if (pixels.empty()) throw std::invalid_argument("overlap: window is empty after clipping");
  Overlap out;
  for (const auto& [x, y] : pixels) {
    const bool s_ref = filter.support(x, y) != 0;
    out.m_ref += s_ref;
    const int ox = x + offset.dx;
    const int oy = y + offset.dy;
    const bool s_test = object.phase.in_bounds(ox, oy) && object.support(ox, oy) != 0;
    out.m_test += s_test;
    if (s_test && s_ref)
      out.gamma += std::polar(1.0, object.phase(ox, oy) - filter.phase(x, y));
  }
  return out;
}

inline CorrelationEstimate analytic_g2(const Overlap& ov) {
  if (ov.m_test <= 0 || ov.m_ref <= 0)
    throw std::invalid_argument("analytic_g2: an arm has no transmitting pixels");
  CorrelationEstimate est;
  est.g2 = 1.0 + std::norm(ov.gamma) / (static_cast<double>(ov.m_test) * ov.m_ref);
  est.delta_g2 = est.g2 - 1.0;
  est.mode = EstimateMode::analytic;
  return est;
}

/// Single-arm detected intensity for one realization: the masked field summed
/// over the window, then squared. The mask is applied at its own offset
/// (object arm: scan offset; reference arm: zero).
inline double mc_detect(const SpeckleField& field, const PhaseMask& mask, PixelOffset offset,
                        const Window& window) {
  const auto pixels = window.pixels(field.width(), field.height());
  if (pixels.empty()) throw std::invalid_argument("mc_detect: window is empty after clipping");
  std::complex<double> amp{0.0, 0.0};
  for (const auto& [x, y] : pixels) {
    const int mx = x + offset.dx;
    const int my = y + offset.dy;
    if (mask.phase.in_bounds(mx, my) && mask.support(mx, my) != 0)
      amp += field.values(x, y) * std::polar(1.0, mask.phase(mx, my));
  }
  return std::norm(amp);
}

/// Monte Carlo estimate of g2 over n shared-field realizations, ratio of
/// means with a jackknife standard error. Realization k always draws from
/// (seed, k), and the accumulation order is fixed, so results do not depend
/// on how callers schedule work.
inline CorrelationEstimate mc_correlate(const PhaseMask& object, const PhaseMask& filter,
                                        PixelOffset offset, const Window& window,
                                        std::uint64_t n_realizations, std::uint64_t seed,
                                        double coherence_px = 0.0) {
  if (n_realizations < 2)
    throw std::invalid_argument("mc_correlate: need at least 2 realizations");
  const auto pixels = window.pixels(filter.width(), filter.height());
  if (pixels.empty())
    throw std::invalid_argument("mc_correlate: window is empty after clipping");

  // Per-pixel transmission phasors; exactly zero where an arm is opaque.
  const std::size_t m = pixels.size();
  std::vector<std::complex<double>> t_obj(m), t_fil(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [x, y] = pixels[i];
    const int ox = x + offset.dx;
    const int oy = y + offset.dy;
    t_obj[i] = object.phase.in_bounds(ox, oy) && object.support(ox, oy) != 0
                   ? std::polar(1.0, object.phase(ox, oy))
                   : std::complex<double>{0.0, 0.0};
    t_fil[i] = filter.support(x, y) != 0 ? std::polar(1.0, filter.phase(x, y))
                                         : std::complex<double>{0.0, 0.0};
  }

  const FieldSampler field(seed, coherence_px);
  const std::size_t n = static_cast<std::size_t>(n_realizations);
  std::vector<double> i_test(n), i_ref(n), prod(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> a_test{0.0, 0.0}, a_ref{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
      const std::complex<double> e = field(k, pixels[i].first, pixels[i].second);
      a_test += e * t_obj[i];
      a_ref += e * t_fil[i];
    }
    i_test[k] = std::norm(a_test);
    i_ref[k] = std::norm(a_ref);
    prod[k] = i_test[k] * i_ref[k];
  }

  double sum_t = 0.0, sum_r = 0.0, sum_p = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum_t += i_test[k];
    sum_r += i_ref[k];
    sum_p += prod[k];
  }
  if (sum_t <= 0.0 || sum_r <= 0.0)
    throw std::runtime_error("mc_correlate: degenerate zero-mean intensity");

  const double nd = static_cast<double>(n);
  CorrelationEstimate est;
  est.g2 = (sum_p / nd) / ((sum_t / nd) * (sum_r / nd));
  est.delta_g2 = est.g2 - 1.0;
  est.n_realizations = n_realizations;
  est.mode = EstimateMode::montecarlo;

  // Jackknife over realizations.
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = sum_t - i_test[k];
    const double r = sum_r - i_ref[k];
    const double p = sum_p - prod[k];
    if (t <= 0.0 || r <= 0.0)
      throw std::runtime_error("mc_correlate: degenerate zero-mean intensity");
    loo[k] = (nd - 1.0) * p / (t * r);
    loo_mean += loo[k];
  }
  loo_mean /= nd;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) ss += (loo[k] - loo_mean) * (loo[k] - loo_mean);
  est.std_error = std::sqrt((nd - 1.0) / nd * ss);
  return est;
}

}  // namespace tlgi
