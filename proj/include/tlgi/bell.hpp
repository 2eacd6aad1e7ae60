// CHSH Bell-type analysis of the edge-enhancement correlations: sweep
// pi-step filter orientations against the rim of a circular phase object,
// bin the raw correlation curves C(theta_A, theta_B), and combine them into
// E values and the CHSH S.
//
// C is the raw normalized g2, background included. Only this choice yields
// the classical non-violation; the background-subtracted variant (exposed as
// a flag) turns ideal curves into a would-be violation of 2*sqrt(2).
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tlgi/correlator.hpp"
#include "tlgi/parallel.hpp"

namespace tlgi {

struct BellBinning {
  int radial_px = 8;
  double azimuthal_deg = 3.0;

  bool operator==(const BellBinning&) const = default;
};

struct BellSample {
  double theta_b = 0.0;  // rim azimuth, radians in [0, pi)
  double c = 1.0;        // raw normalized correlation
  double std_error = 0.0;
};

struct BellCurve {
  double theta_a = 0.0;  // filter step orientation, radians
  std::vector<BellSample> samples;
  BellBinning binning;
};

/// CHSH settings; defaults are the maximal-violation quadruple.
struct BellSettings {
  double theta_a = 0.0;
  double theta_b = kPi / 8.0;
  double theta_a_prime = kPi / 4.0;
  double theta_b_prime = 3.0 * kPi / 8.0;
};

struct BellEValue {
  double theta_a = 0.0;
  double theta_b = 0.0;
  double e = 0.0;
};

struct BellResult {
  std::vector<BellCurve> curves;
  std::array<BellEValue, 4> e_values;  // (A,B), (A,B'), (A',B), (A',B')
  double s = 0.0;
  BellSettings settings;
  bool background_subtracted = false;
};

/// Disk-object geometry needed to parametrize the rim.
struct RimGeometry {
  Point center;
  double radius = 0.0;
};

/// Reference-arm hologram plane: an n x n grid holding the oriented step
/// filter, with the detection window in its coordinates.
struct FilterPlane {
  int size = 10;
  Window window = Window::full(10);
};

struct McParams {
  std::uint64_t realizations = 0;
  std::uint64_t seed = 0;
  double coherence_px = 0.0;
};

/// Local edge orientation of the rim at azimuth theta_b (mod pi).
inline double rim_tangent(double theta_b) { return fold_pi(theta_b + kPi / 2.0); }

namespace detail {

/// Correlation with the window centered on an object-plane point (rounded to
/// pixel centers) and the step filter oriented at theta_a. Throws if any
/// window pixel would fall outside the object grid.
inline std::pair<double, double> correlation_at(const PhaseMask& object, Point target,
                                                double theta_a, const FilterPlane& plane,
                                                EstimateMode mode, const McParams& mc) {
  const Point fc = grid_center(plane.size);
  const PixelOffset offset{static_cast<int>(std::lround(target.x - fc.x)),
                           static_cast<int>(std::lround(target.y - fc.y))};
  for (const auto& [x, y] : plane.window.pixels(plane.size, plane.size)) {
    if (!object.phase.in_bounds(x + offset.dx, y + offset.dy))
      throw std::invalid_argument("rim_correlation: window clipped by the object grid");
  }
  const PhaseMask filter = make_step(plane.size, theta_a, fc);
  if (mode == EstimateMode::analytic) {
    return {analytic_g2(overlap(object, filter, offset, plane.window)).g2, 0.0};
  }
  const CorrelationEstimate est = mc_correlate(object, filter, offset, plane.window,
                                               mc.realizations, mc.seed, mc.coherence_px);
  return {est.g2, est.std_error};
}

}  // namespace detail

/// Raw correlation C = g2 with the window centered on the rim point at
/// azimuth theta_b and the step filter oriented at theta_a.
inline std::pair<double, double> rim_correlation(const PhaseMask& object, const RimGeometry& rim,
                                                 double theta_a, double theta_b,
                                                 const FilterPlane& plane, EstimateMode mode,
                                                 const McParams& mc = {}) {
  const Point target{rim.center.x + rim.radius * std::cos(theta_b),
                     rim.center.y + rim.radius * std::sin(theta_b)};
  return detail::correlation_at(object, target, theta_a, plane, mode, mc);
}

inline constexpr std::array<double, 4> kDefaultOrientations{0.0, kPi / 2.0, kPi / 4.0,
                                                            3.0 * kPi / 4.0};

/// Sweeps the binned correlation curves C(theta_b) for each filter
/// orientation. Each bin averages window placements spanning `radial_px`
/// radial pixels by `azimuthal_deg` degrees around the bin center; Monte
/// Carlo samples use independent realization blocks keyed by the flattened
/// sample index, so curves are identical for any thread count.
inline std::vector<BellCurve> sweep_curves(const PhaseMask& object, const RimGeometry& rim,
                                           const FilterPlane& plane,
                                           std::span<const double> theta_a_list,
                                           BellBinning binning, EstimateMode mode,
                                           const McParams& mc = {}, int threads = 1) {
  if (binning.radial_px < 1 || !(binning.azimuthal_deg > 0.0))
    throw std::invalid_argument("sweep_curves: degenerate binning");
  const double n_bins_exact = 180.0 / binning.azimuthal_deg;
  const int n_bins = static_cast<int>(std::lround(n_bins_exact));
  if (n_bins < 1 || std::abs(n_bins_exact - n_bins) > 1e-9)
    throw std::invalid_argument("sweep_curves: azimuthal bin must divide 180 degrees");
  const double bin_rad = binning.azimuthal_deg * kPi / 180.0;
  if (rim.radius * bin_rad < 1.0)
    throw std::invalid_argument(
        "sweep_curves: disk radius too small for the azimuthal binning (adjacent bins < 1 px)");

  const int n_az = std::max(1, static_cast<int>(std::lround(binning.azimuthal_deg)));
  const int n_samples = binning.radial_px * n_az;
  const int n_curves = static_cast<int>(theta_a_list.size());

  std::vector<BellCurve> curves(static_cast<std::size_t>(n_curves));
  for (int c = 0; c < n_curves; ++c) {
    curves[c].theta_a = theta_a_list[c];
    curves[c].binning = binning;
    curves[c].samples.resize(static_cast<std::size_t>(n_bins));
  }

  parallel_for(n_curves * n_bins, threads, [&](int item) {
    const int c = item / n_bins;
    const int bin = item % n_bins;
    const double theta_c = (bin + 0.5) * bin_rad;
    double c_sum = 0.0;
    double var_sum = 0.0;
    for (int j = 0; j < binning.radial_px; ++j) {
      const double r = rim.radius - binning.radial_px / 2.0 + 0.5 + j;
      for (int a = 0; a < n_az; ++a) {
        const double theta_b = theta_c + bin_rad * ((a + 0.5) / n_az - 0.5);
        McParams sample_mc = mc;
        sample_mc.seed = rng::derive_seed(
            mc.seed, static_cast<std::uint64_t>(item) * n_samples + j * n_az + a);
        const auto [cv, se] = rim_correlation(object, RimGeometry{rim.center, r},
                                              curves[c].theta_a, theta_b, plane, mode, sample_mc);
        c_sum += cv;
        var_sum += se * se;
      }
    }
    curves[c].samples[static_cast<std::size_t>(bin)] =
        BellSample{theta_c, c_sum / n_samples, std::sqrt(var_sum) / n_samples};
  });
  return curves;
}

namespace detail {

inline const BellCurve& find_curve(std::span<const BellCurve> curves, double theta_a) {
  const double want = fold_pi(theta_a);
  for (const BellCurve& c : curves) {
    const double have = fold_pi(c.theta_a);
    const double d = std::abs(have - want);
    if (std::min(d, kPi - d) <= 1e-9) return c;
  }
  throw std::invalid_argument("chsh: no curve for the requested filter orientation");
}

/// C(theta_a, theta_b) from the swept curves: curve matched modulo pi,
/// theta_b looked up with circular linear interpolation between the two
/// nearest bin centers (period pi).
inline double curve_lookup(std::span<const BellCurve> curves, double theta_a, double theta_b) {
  const BellCurve& curve = find_curve(curves, theta_a);
  const auto& s = curve.samples;
  if (s.empty()) throw std::invalid_argument("chsh: curve has no samples");
  if (s.size() == 1) return s.front().c;
  const double tb = fold_pi(theta_b);
  // Bin centers are sorted; find the bracketing pair, wrapping across pi.
  std::size_t hi = 0;
  while (hi < s.size() && s[hi].theta_b <= tb) ++hi;
  double t0, t1, c0, c1;
  if (hi == 0) {  // below the first center: wrap the last one down by pi
    t0 = s.back().theta_b - kPi;
    c0 = s.back().c;
    t1 = s.front().theta_b;
    c1 = s.front().c;
  } else if (hi == s.size()) {  // above the last center: wrap the first up
    t0 = s.back().theta_b;
    c0 = s.back().c;
    t1 = s.front().theta_b + kPi;
    c1 = s.front().c;
  } else {
    t0 = s[hi - 1].theta_b;
    c0 = s[hi - 1].c;
    t1 = s[hi].theta_b;
    c1 = s[hi].c;
  }
  const double w = (tb - t0) / (t1 - t0);
  return (1.0 - w) * c0 + w * c1;
}

}  // namespace detail

/// E(theta_a, theta_b) combining the four correlations at the settings and
/// their pi/2-shifted partners. With subtract_background the same expression
/// is evaluated on delta_g2 = C - 1.
inline double chsh_E(std::span<const BellCurve> curves, double theta_a, double theta_b,
                     bool subtract_background = false) {
  double a = detail::curve_lookup(curves, theta_a, theta_b);
  double b = detail::curve_lookup(curves, theta_a + kPi / 2.0, theta_b + kPi / 2.0);
  double c = detail::curve_lookup(curves, theta_a + kPi / 2.0, theta_b);
  double d = detail::curve_lookup(curves, theta_a, theta_b + kPi / 2.0);
  if (subtract_background) {
    a -= 1.0;
    b -= 1.0;
    c -= 1.0;
    d -= 1.0;
  }
  const double num = (a + b) - (c + d);
  const double den = (a + b) + (c + d);
  if (den == 0.0) throw std::runtime_error("chsh_E: zero denominator");
  return num / den;
}

/// CHSH S = E(A,B) - E(A,B') + E(A',B) + E(A',B').
inline BellResult chsh_S(std::span<const BellCurve> curves, const BellSettings& settings = {},
                         bool subtract_background = false) {
  BellResult result;
  result.curves.assign(curves.begin(), curves.end());
  result.settings = settings;
  result.background_subtracted = subtract_background;
  const auto ev = [&](double ta, double tb) {
    return BellEValue{ta, tb, chsh_E(curves, ta, tb, subtract_background)};
  };
  result.e_values = {ev(settings.theta_a, settings.theta_b),
                     ev(settings.theta_a, settings.theta_b_prime),
                     ev(settings.theta_a_prime, settings.theta_b),
                     ev(settings.theta_a_prime, settings.theta_b_prime)};
  result.s = result.e_values[0].e - result.e_values[1].e + result.e_values[2].e +
             result.e_values[3].e;
  return result;
}

}  // namespace tlgi
