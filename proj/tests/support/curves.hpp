// Synthetic correlation-curve fixtures for the CHSH algebra tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "tlgi/bell.hpp"

namespace fixtures {

/// Builds curves sampled on the standard binning (bin centers (k+0.5)*width)
/// from an arbitrary C(theta_a, theta_b).
template <typename Fn>
std::vector<tlgi::BellCurve> curves_from(Fn&& c_of, double azimuthal_deg = 3.0) {
  const int n_bins = static_cast<int>(std::lround(180.0 / azimuthal_deg));
  const double width = azimuthal_deg * tlgi::kPi / 180.0;
  std::vector<tlgi::BellCurve> curves;
  for (const double theta_a : tlgi::kDefaultOrientations) {
    tlgi::BellCurve curve;
    curve.theta_a = theta_a;
    curve.binning = tlgi::BellBinning{8, azimuthal_deg};
    for (int k = 0; k < n_bins; ++k) {
      const double theta_b = (k + 0.5) * width;
      curve.samples.push_back(tlgi::BellSample{theta_b, c_of(theta_a, theta_b), 0.0});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

/// Ideal fluctuation curves C = 1 + cos^2(theta_a - theta_b).
inline std::vector<tlgi::BellCurve> ideal_curves() {
  return curves_from([](double a, double b) {
    const double c = std::cos(a - b);
    return 1.0 + c * c;
  });
}

/// Triangular curves C = 1 + (1 - 4*d/pi)^2 with d = |theta_a - theta_b|
/// folded into [0, pi/2].
inline std::vector<tlgi::BellCurve> triangular_curves() {
  return curves_from([](double a, double b) {
    double d = std::fabs(std::fmod(a - b, tlgi::kPi));
    if (d > tlgi::kPi / 2.0) d = tlgi::kPi - d;
    const double t = 1.0 - 4.0 * d / tlgi::kPi;
    return 1.0 + t * t;
  });
}

/// Random raw curves with C uniform in [1, 2].
inline std::vector<tlgi::BellCurve> random_curves(std::mt19937& rng) {
  std::uniform_real_distribution<double> c(1.0, 2.0);
  return curves_from([&](double, double) { return c(rng); });
}

}  // namespace fixtures
