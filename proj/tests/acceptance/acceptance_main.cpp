// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.
#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support/curves.hpp"
#include "support/oracles.hpp"
#include "tlgi/runner.hpp"

using namespace tlgi;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& info) {
    if (!detail.empty()) detail += "; ";
    detail += info;
  }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return io::format_double(v); }

// --- criterion 1: speckle statistics -------------------------------------
void criterion_speckle(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const FieldSampler sampler(20260809);
  const int w = 500, h = 200;  // 1e5 samples
  double sum_i = 0, sum_i2 = 0, sum_re = 0, sum_im = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::complex<double> e = sampler(0, x, y);
      const double i = std::norm(e);
      sum_i += i;
      sum_i2 += i * i;
      const std::complex<double> e2 = e * e;
      sum_re += e2.real();
      sum_im += e2.imag();
    }
  const double n = static_cast<double>(w) * h;
  const double rt = std::sqrt(n);
  const double mean_i = sum_i / n;
  const double mean_i2 = sum_i2 / n;
  c.expect(std::abs(mean_i - 1.0) <= 5.0 / rt, "<|E|^2> off: " + fmt(mean_i));
  c.expect(std::abs(sum_re / n) <= 5.0 / rt, "<Re E^2> off: " + fmt(sum_re / n));
  c.expect(std::abs(sum_im / n) <= 5.0 / rt, "<Im E^2> off: " + fmt(sum_im / n));
  c.expect(std::abs(mean_i2 - 2.0) <= 5.0 * std::sqrt(20.0) / rt,
           "<|E|^4> off: " + fmt(mean_i2));
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 10.0, "runtime " + fmt(elapsed) + " s >= 10 s");
  c.note("<|E|^2>=" + fmt(mean_i) + " <|E|^4>=" + fmt(mean_i2) + " in " + fmt(elapsed) + " s");
}

// --- criterion 2: Monte Carlo vs analytic oracle equivalence -------------
void criterion_oracle_equivalence(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(20260810);
  std::uniform_int_distribution<int> off(0, 16);
  int hits = 0;
  const int cases = 10;
  for (int rep = 0; rep < cases; ++rep) {
    const PhaseMask object = oracles::random_mask(rng, 32, 0.9);
    const PhaseMask filter = oracles::random_mask(rng, 16, 0.9);
    const Window window = Window::full(16);
    const PixelOffset offset{off(rng), off(rng)};
    const double g2_ref = analytic_g2(overlap(object, filter, offset, window)).g2;
    const auto mc = mc_correlate(object, filter, offset, window, 100000,
                                 rng::derive_seed(7, static_cast<std::uint64_t>(rep)));
    if (std::abs(mc.g2 - g2_ref) <= 5.0 * mc.std_error) ++hits;
  }
  c.expect(hits >= static_cast<int>(std::ceil(0.95 * cases)),
           "only " + std::to_string(hits) + "/10 within 5*stderr");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 120.0, "runtime " + fmt(elapsed) + " s >= 2 min");
  c.note(std::to_string(hits) + "/10 agree in " + fmt(elapsed) + " s");
}

// --- criterion 3: modal decomposition ------------------------------------
void criterion_modal(Check& c) {
  const double c1sq = 4.0 / (kPi * kPi);
  const PhaseMask step = make_step(128, 0.0);
  const auto spec = azimuthal_spectrum(step, Window::disk(grid_center(128), 48.0), 2);
  c.expect(std::abs(spec.power(1) - c1sq) <= 0.02,
           "|c1|^2=" + fmt(spec.power(1)) + " not within 4/pi^2 +- 0.02");
  c.expect(spec.power(0) <= 0.01, "|c0|^2=" + fmt(spec.power(0)));
  c.expect(spec.power(2) <= 0.01, "|c2|^2=" + fmt(spec.power(2)));
  for (const int charge : {1, 2}) {
    const auto sp = azimuthal_spectrum(make_spiral(64, charge),
                                       Window::disk(grid_center(64), 24.0), 3);
    c.expect(sp.power(charge) >= 0.99,
             "spiral l=" + std::to_string(charge) + " power " + fmt(sp.power(charge)));
  }
  c.note("|c1|^2=" + fmt(spec.power(1)));
}

// --- criterion 4: edge-enhancement scans ---------------------------------
void criterion_scans(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 128;
  const double radius = 40.0;
  const PhaseMask disk = make_disk(n, radius);
  const auto scan_with = [&](PhaseMask filter) {
    ScanConfig sc;
    sc.object = disk;
    sc.filter = std::move(filter);
    sc.window = Window::full(10);
    sc.offsets = {0, n - 10, 0, n - 10, 1};
    sc.threads = 2;
    return run_scan(sc);
  };
  const Point center = grid_center(n);

  // (a) matched l=0 filter: bright plateau, dark rim
  {
    const ScanImage img = scan_with(make_uniform(10, 0.0));
    double lo = 1e9;
    for (double v : img.values.cells()) lo = std::min(lo, v);
    c.expect(lo <= 0.1, "l=0 rim minimum " + fmt(lo) + " > 0.1");
    // plateau: window centers deeper than the window half-diagonal inside
    // or outside the rim
    const double margin = 7.5;
    int plateau = 0;
    bool plateau_ok = true;
    for (int iy = 0; iy < img.values.height(); ++iy)
      for (int ix = 0; ix < img.values.width(); ++ix) {
        const double dx = ix + 4.5 - center.x;
        const double dy = iy + 4.5 - center.y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (std::abs(r - radius) >= margin) {
          ++plateau;
          if (std::abs(img.values(ix, iy) - 1.0) > 0.01) plateau_ok = false;
        }
      }
    c.expect(plateau > 0 && plateau_ok, "l=0 plateau deviates from 1.0 +- 0.01");
  }

  // (b) spiral l=1 filter: rim maxima dominate everything away from the rim
  {
    const ScanImage img = scan_with(make_spiral(10, 1));
    double hi = -1e9;
    for (double v : img.values.cells()) hi = std::max(hi, v);
    const double margin = 7.5;
    double off_rim_max = 0.0;
    for (int iy = 0; iy < img.values.height(); ++iy)
      for (int ix = 0; ix < img.values.width(); ++ix) {
        const double dx = ix + 4.5 - center.x;
        const double dy = iy + 4.5 - center.y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (std::abs(r - radius) >= margin)
          off_rim_max = std::max(off_rim_max, img.values(ix, iy));
      }
    c.expect(off_rim_max <= 0.01 * hi,
             "l=1 interior/exterior " + fmt(off_rim_max) + " > 1% of rim max " + fmt(hi));
  }

  // (c) horizontal step filter: tangent-matched rim azimuths dominate
  {
    const ScanImage img = scan_with(make_step(10, 0.0));
    const int cx = 59, cy = 59, r = static_cast<int>(radius);
    const double top = img.values(cx, cy - r);
    const double bottom = img.values(cx, cy + r);
    const double left = img.values(cx - r, cy);
    const double right = img.values(cx + r, cy);
    c.expect(std::min(top, bottom) >= 2.0 * std::max(left, right),
             "horizontal-tangent response " + fmt(std::min(top, bottom)) +
                 " < 2x vertical-tangent " + fmt(std::max(left, right)));
  }

  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "runtime " + fmt(elapsed) + " s >= 30 s");
  c.note("three scans in " + fmt(elapsed) + " s");
}

// --- criterion 5: CHSH pipeline algebra ----------------------------------
void criterion_chsh_algebra(Check& c) {
  const auto ideal = fixtures::ideal_curves();
  const BellSettings s{};
  for (const auto& [a, b] : {std::pair{s.theta_a, s.theta_b},
                             {s.theta_a, s.theta_b_prime},
                             {s.theta_a_prime, s.theta_b},
                             {s.theta_a_prime, s.theta_b_prime}}) {
    const double expected = std::cos(2.0 * (a - b)) / 3.0;
    const double got = chsh_E(ideal, a, b);
    c.expect(std::abs(got - expected) <= 1e-9,
             "E(" + fmt(a) + "," + fmt(b) + ")=" + fmt(got) + " vs " + fmt(expected));
  }
  const double s_ideal = chsh_S(ideal).s;
  c.expect(std::abs(s_ideal - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-6,
           "ideal S=" + fmt(s_ideal));
  const double s_tri = chsh_S(fixtures::triangular_curves()).s;
  c.expect(std::abs(s_tri) <= 1e-9, "triangular S=" + fmt(s_tri));
  c.note("S_ideal=" + fmt(s_ideal) + " S_triangular=" + fmt(s_tri));
}

// --- criterion 6: classicality of simulated Bell results ------------------
void criterion_classicality(Check& c) {
  const PhaseMask disk = make_disk(160, 60.0);
  const RimGeometry rim{grid_center(160), 60.0};
  const FilterPlane plane{10, Window::full(10)};

  const auto analytic = sweep_curves(disk, rim, plane, kDefaultOrientations, BellBinning{},
                                     EstimateMode::analytic, {}, 2);
  const BellResult res = chsh_S(analytic);
  for (const auto& ev : res.e_values)
    c.expect(std::abs(ev.e) <= 1.0 / 3.0 + 1e-12, "analytic |E|=" + fmt(std::abs(ev.e)));
  c.expect(std::abs(res.s) <= 4.0 / 3.0 + 1e-12, "analytic |S|=" + fmt(std::abs(res.s)));

  const auto mc = sweep_curves(disk, rim, plane, kDefaultOrientations, BellBinning{4, 5.0},
                               EstimateMode::montecarlo, McParams{2000, 11, 0.0}, 2);
  const BellResult res_mc = chsh_S(mc);
  for (const auto& ev : res_mc.e_values)
    c.expect(std::abs(ev.e) <= 1.0 / 3.0 + 1e-12, "mc |E|=" + fmt(std::abs(ev.e)));
  c.expect(std::abs(res_mc.s) <= 4.0 / 3.0 + 1e-12, "mc |S|=" + fmt(std::abs(res_mc.s)));

  // the background-subtraction flag flips ideal curves into the full
  // would-be violation
  const double s_sub = chsh_S(fixtures::ideal_curves(), {}, true).s;
  c.expect(std::abs(s_sub - 2.0 * std::sqrt(2.0)) <= 1e-6, "subtracted ideal S=" + fmt(s_sub));
  c.note("S_analytic=" + fmt(res.s) + " S_mc=" + fmt(res_mc.s) +
         " S_subtracted_ideal=" + fmt(s_sub));
}

// --- criterion 7: worker-count determinism --------------------------------
void criterion_determinism(Check& c) {
  const fs::path base = fs::temp_directory_path() / "tlgi_acceptance";
  fs::remove_all(base);

  const auto files_of = [](const RunArtifacts& a) {
    std::vector<std::string> out;
    for (const auto& f : a.files) out.push_back((a.dir / f).string());
    return out;
  };

  // scan, Monte Carlo mode
  ExperimentConfig scan_cfg = parse_config(
      "object.type = disk\nobject.radius = 40\nfilter.type = spiral\nfilter.l = 1\n"
      "mode = montecarlo\nmc.realizations = 1000\nseed = 3\n"
      "scan.x0 = 94\nscan.x1 = 109\nscan.y0 = 54\nscan.y1 = 69\n",
      ExperimentKind::scan);
  // bell, analytic mode
  ExperimentConfig bell_cfg = parse_config("", ExperimentKind::bell);

  int pair_id = 0;
  for (ExperimentConfig* cfg : {&scan_cfg, &bell_cfg}) {
    ExperimentConfig one = *cfg;
    one.threads = 1;
    one.out_dir = (base / ("w1_" + std::to_string(pair_id))).string();
    ExperimentConfig four = *cfg;
    four.threads = 4;
    four.out_dir = (base / ("w4_" + std::to_string(pair_id))).string();
    const RunArtifacts a = run(one);
    const RunArtifacts b = run(four);
    const auto fa = files_of(a);
    const auto fb = files_of(b);
    c.expect(fa.size() == fb.size(), "artifact sets differ");
    for (std::size_t i = 0; i < fa.size() && i < fb.size(); ++i)
      c.expect(io::read_file(fa[i]) == io::read_file(fb[i]),
               a.files[i] + " differs between 1 and 4 workers");
    // replay at the same worker count must be byte-identical everywhere
    const RunArtifacts a2 = run(one);
    const auto fa2 = files_of(a2);
    for (std::size_t i = 0; i < fa.size(); ++i)
      c.expect(io::read_file(fa[i]) == io::read_file(fa2[i]),
               a.files[i] + " differs across replays");
    ++pair_id;
  }
  fs::remove_all(base);
  c.note("scan(mc) and bell(analytic) identical at 1 and 4 workers");
}

// --- criterion 8: exact identities of the E expression ---------------------
void criterion_identities(Check& c) {
  std::mt19937 rng(20260811);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::uniform_real_distribution<double> cval(1.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto curves = fixtures::random_curves(rng);
    const double a = kDefaultOrientations[static_cast<std::size_t>(rep) % 4];
    const double b = angle(rng);
    const double e = chsh_E(curves, a, b);
    const double e_shift = chsh_E(curves, a + kPi / 2.0, b);
    c.expect(e_shift == -e, "antisymmetry violated at (" + fmt(a) + "," + fmt(b) + ")");

    const double ca = cval(rng), cb = cval(rng), cc = cval(rng), cd = cval(rng);
    const double num_raw = (ca + cb) - (cc + cd);
    const double num_sub = ((ca - 1.0) + (cb - 1.0)) - ((cc - 1.0) + (cd - 1.0));
    c.expect(std::abs(num_raw - num_sub) <= 1e-12, "numerator identity violated");
    const double den_raw = (ca + cb) + (cc + cd);
    const double den_sub = ((ca - 1.0) + (cb - 1.0)) + ((cc - 1.0) + (cd - 1.0));
    c.expect(std::abs(den_raw - (den_sub + 4.0)) <= 1e-12, "denominator identity violated");
  }
  c.note("50 random fixtures");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "speckle statistics (1e5 samples, 5 sigma, < 10 s)", criterion_speckle},
      {2, "Monte Carlo vs analytic oracle equivalence (10 pairs, < 2 min)",
       criterion_oracle_equivalence},
      {3, "modal decomposition (pi-step and spiral spectra)", criterion_modal},
      {4, "edge-enhanced ghost image scans (disk object, < 30 s)", criterion_scans},
      {5, "CHSH pipeline algebra (ideal and triangular curves)", criterion_chsh_algebra},
      {6, "classicality of simulated Bell results", criterion_classicality},
      {7, "worker-count determinism and replay", criterion_determinism},
      {8, "E-expression antisymmetry and background-cancellation identities",
       criterion_identities},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.note(std::string("exception: ") + e.what());
    }
    std::printf("%s  criterion %d: %s%s%s\n", check.ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, check.detail.empty() ? "" : " -- ", check.detail.c_str());
    if (!check.ok) ++failures;
  }
  return failures;
}
