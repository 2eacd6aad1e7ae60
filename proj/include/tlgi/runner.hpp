// Experiment orchestration: build the masks for a resolved config, run the
// requested pipeline, and emit all artifacts (CSV, PGM, resolved-config echo)
// with atomic writes. Outputs are a pure function of the resolved config.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tlgi/config.hpp"
#include "tlgi/io.hpp"

namespace tlgi {

struct RunArtifacts {
  std::filesystem::path dir;
  std::vector<std::string> files;
  ExperimentConfig resolved;
};

namespace run_detail {

inline std::string scan_csv(const ScanImage& img) {
  io::CsvBuilder csv({"offset_x", "offset_y", "delta_g2", "stderr"});
  for (int iy = 0; iy < img.values.height(); ++iy)
    for (int ix = 0; ix < img.values.width(); ++ix) {
      const PixelOffset off = img.offsets.at(ix, iy);
      csv.row({std::to_string(off.dx), std::to_string(off.dy),
               io::format_double(img.values(ix, iy)), io::format_double(img.std_errors(ix, iy))});
    }
  return csv.str();
}

inline std::string curve_csv(const BellCurve& curve) {
  // tangent_deg (the local edge orientation at theta_b) rides along as a
  // trailing column so the leading four keep their positions
  io::CsvBuilder csv({"theta_a_deg", "theta_b_deg", "c", "stderr", "tangent_deg"});
  const double theta_a_deg = curve.theta_a * 180.0 / kPi;
  for (const BellSample& s : curve.samples)
    csv.row({io::format_double(theta_a_deg), io::format_double(s.theta_b * 180.0 / kPi),
             io::format_double(s.c), io::format_double(s.std_error),
             io::format_double(rim_tangent(s.theta_b) * 180.0 / kPi)});
  return csv.str();
}

inline std::string e_table_csv(const BellResult& result) {
  io::CsvBuilder csv({"theta_a_deg", "theta_b_deg", "e"});
  for (const BellEValue& ev : result.e_values)
    csv.row({io::format_double(ev.theta_a * 180.0 / kPi),
             io::format_double(ev.theta_b * 180.0 / kPi), io::format_double(ev.e)});
  return csv.str();
}

inline std::string summary_csv(const BellResult& r, EstimateMode mode) {
  io::CsvBuilder csv({"s", "theta_a_deg", "theta_b_deg", "theta_a_prime_deg",
                      "theta_b_prime_deg", "subtract_background", "mode"});
  csv.row({io::format_double(r.s), io::format_double(r.settings.theta_a * 180.0 / kPi),
           io::format_double(r.settings.theta_b * 180.0 / kPi),
           io::format_double(r.settings.theta_a_prime * 180.0 / kPi),
           io::format_double(r.settings.theta_b_prime * 180.0 / kPi),
           r.background_subtracted ? "true" : "false",
           mode == EstimateMode::analytic ? "analytic" : "montecarlo"});
  return csv.str();
}

inline std::string spectrum_csv(const AzimuthalSpectrum& spec) {
  io::CsvBuilder csv({"l", "c_re", "c_im", "power"});
  for (int l = -spec.l_max; l <= spec.l_max; ++l)
    csv.row({std::to_string(l), io::format_double(spec.c(l).real()),
             io::format_double(spec.c(l).imag()), io::format_double(spec.power(l))});
  return csv.str();
}

/// Moment suite over grid.size^2 x realizations samples with exact
/// circular-Gaussian expectations and standard errors.
inline std::string speckle_csv(const ExperimentConfig& cfg) {
  const FieldSampler sampler(cfg.seed, cfg.coherence_px);
  double sum_i = 0.0, sum_i2 = 0.0, sum_re = 0.0, sum_im = 0.0;
  const std::uint64_t reps = cfg.speckle_realizations;
  const int n = cfg.grid_size;
  const double count = static_cast<double>(reps) * n * n;
  for (std::uint64_t k = 0; k < reps; ++k)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const std::complex<double> e = sampler(k, x, y);
        const double i = std::norm(e);
        const std::complex<double> e2 = e * e;
        sum_i += i;
        sum_i2 += i * i;
        sum_re += e2.real();
        sum_im += e2.imag();
      }
  const double mean_i = sum_i / count;
  const double mean_i2 = sum_i2 / count;
  const double pseudo_re = sum_re / count;
  const double pseudo_im = sum_im / count;
  const double rt = std::sqrt(count);
  io::CsvBuilder csv({"statistic", "value", "expected", "stderr"});
  const auto row = [&](const char* name, double value, double expected, double se) {
    csv.row({name, io::format_double(value), io::format_double(expected),
             io::format_double(se)});
  };
  row("mean_intensity", mean_i, 1.0, 1.0 / rt);
  row("pseudo_variance_re", pseudo_re, 0.0, 1.0 / rt);
  row("pseudo_variance_im", pseudo_im, 0.0, 1.0 / rt);
  row("mean_intensity_sq", mean_i2, 2.0, std::sqrt(20.0) / rt);
  row("contrast", std::sqrt(std::max(0.0, mean_i2 - mean_i * mean_i)) / mean_i, 1.0, 1.0 / rt);
  return csv.str();
}

}  // namespace run_detail

/// Runs one experiment and writes its artifacts under cfg.out_dir.
/// Replaying an identical config reproduces every output byte.
inline RunArtifacts run(const ExperimentConfig& parsed) {
  namespace fs = std::filesystem;
  RunArtifacts artifacts;
  artifacts.dir = fs::path(parsed.out_dir);
  fs::create_directories(artifacts.dir);

  const auto emit = [&](const std::string& name, const std::string& payload) {
    io::atomic_write(artifacts.dir / name, payload);
    artifacts.files.push_back(name);
  };

  switch (parsed.kind) {
    case ExperimentKind::scan: {
      const PhaseMask object = build_object(parsed);
      const ExperimentConfig cfg = resolve(parsed, object.width(), object.height());
      ScanConfig sc{object,
                    build_filter(cfg),
                    filter_window(cfg),
                    scan_range(cfg),
                    cfg.mode,
                    cfg.mc_realizations,
                    cfg.seed,
                    cfg.coherence_px,
                    cfg.threads};
      const ScanImage img = run_scan(sc);
      emit("scan.csv", run_detail::scan_csv(img));
      emit("image.pgm", io::pgm16_bytes(normalize_image(img).values));
      emit("config.resolved", render_resolved(cfg));
      artifacts.resolved = cfg;
      break;
    }
    case ExperimentKind::bell: {
      const PhaseMask object = build_object(parsed);
      const ExperimentConfig cfg = resolve(parsed, object.width(), object.height());
      const RimGeometry rim{grid_center(cfg.grid_size), cfg.object.radius};
      const FilterPlane plane{cfg.filter_size, filter_window(cfg)};
      const McParams mc{cfg.mc_realizations, cfg.seed, cfg.coherence_px};
      const auto curves = sweep_curves(object, rim, plane, kDefaultOrientations, cfg.binning,
                                       cfg.mode, mc, cfg.threads);
      const BellSettings settings{
          cfg.settings_deg[0] * kPi / 180.0, cfg.settings_deg[1] * kPi / 180.0,
          cfg.settings_deg[2] * kPi / 180.0, cfg.settings_deg[3] * kPi / 180.0};
      const BellResult result = chsh_S(curves, settings, cfg.subtract_background);
      for (const BellCurve& curve : result.curves) {
        const long deg = std::lround(fold_pi(curve.theta_a) * 180.0 / kPi);
        emit("curve_" + std::to_string(deg) + ".csv", run_detail::curve_csv(curve));
      }
      emit("e_table.csv", run_detail::e_table_csv(result));
      emit("summary.csv", run_detail::summary_csv(result, cfg.mode));
      emit("config.resolved", render_resolved(cfg));
      artifacts.resolved = cfg;
      break;
    }
    case ExperimentKind::spectrum: {
      const PhaseMask object = build_object(parsed);
      const ExperimentConfig cfg = resolve(parsed, object.width(), object.height());
      const Window window = spectrum_window(cfg, object.width(), object.height());
      const AzimuthalSpectrum spec = azimuthal_spectrum(object, window, cfg.l_max);
      emit("spectrum.csv", run_detail::spectrum_csv(spec));
      emit("config.resolved", render_resolved(cfg));
      artifacts.resolved = cfg;
      break;
    }
    case ExperimentKind::speckle_check: {
      emit("speckle.csv", run_detail::speckle_csv(parsed));
      emit("config.resolved", render_resolved(parsed));
      artifacts.resolved = parsed;
      break;
    }
  }
  return artifacts;
}

}  // namespace tlgi
