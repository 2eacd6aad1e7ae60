// Experiment configuration: flat `key = value` files with per-kind key
// whitelists, strict validation, and a canonical resolved echo that replays
// byte-identically.
#pragma once

#include <array>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tlgi/bell.hpp"
#include "tlgi/correlator.hpp"
#include "tlgi/io.hpp"
#include "tlgi/mask.hpp"
#include "tlgi/scan.hpp"

namespace tlgi {

enum class ExperimentKind { scan, bell, spectrum, speckle_check };

inline std::string_view kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::scan: return "scan";
    case ExperimentKind::bell: return "bell";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::speckle_check: return "speckle_check";
  }
  return "?";
}

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

struct MaskSpec {
  enum class Type { uniform, spiral, step, disk, bitmap };
  Type type = Type::uniform;
  double phase_deg = 0.0;        // uniform
  int charge = 1;                // spiral
  double orientation_deg = 0.0;  // step
  double radius = 0.0;           // disk
  std::string bitmap_path;       // bitmap

  bool operator==(const MaskSpec&) const = default;
};

struct WindowSpec {
  Window::Shape shape = Window::Shape::square;
  std::optional<double> extent;  // halfwidth (square) or radius (disk)

  bool operator==(const WindowSpec&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::scan;
  int grid_size = 128;
  int filter_size = 10;
  MaskSpec object;
  MaskSpec filter;
  WindowSpec window;
  EstimateMode mode = EstimateMode::analytic;
  std::uint64_t mc_realizations = 10000;
  std::uint64_t seed = 0;
  double coherence_px = 0.0;
  int threads = 1;
  std::string out_dir = "out";
  // scan; unset ranges resolve to the full interior of the object grid
  std::optional<int> scan_x0, scan_x1, scan_y0, scan_y1;
  int scan_stride = 1;
  // bell
  BellBinning binning;
  std::array<double, 4> settings_deg{0.0, 22.5, 45.0, 67.5};  // A, B, A', B'
  bool subtract_background = false;
  // spectrum
  int l_max = 8;
  double epsilon_disc = kDiscTolerance;
  // speckle_check
  std::uint64_t speckle_realizations = 8;
  // free-form annotations (instrument pitch and the like); echoed into
  // config.resolved, never interpreted
  std::vector<std::pair<std::string, std::string>> metadata;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace cfg_detail {

struct RawEntry {
  std::string value;
  int line = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline long long parse_int(std::string_view v, std::string_view key) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + std::string(key) + "' expects an integer, got '" +
                      std::string(v) + "'");
  return out;
}

inline std::uint64_t parse_u64(std::string_view v, std::string_view key) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + std::string(key) + "' expects a non-negative integer, got '" +
                      std::string(v) + "'");
  return out;
}

inline double parse_double(std::string_view v, std::string_view key) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + std::string(key) + "' expects a number, got '" + std::string(v) +
                      "'");
  return out;
}

inline bool parse_bool(std::string_view v, std::string_view key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("key '" + std::string(key) + "' expects true or false, got '" +
                    std::string(v) + "'");
}

inline MaskSpec::Type parse_mask_type(std::string_view v, std::string_view key,
                                      bool allow_bitmap) {
  if (v == "uniform") return MaskSpec::Type::uniform;
  if (v == "spiral") return MaskSpec::Type::spiral;
  if (v == "step") return MaskSpec::Type::step;
  if (v == "disk") return MaskSpec::Type::disk;
  if (v == "bitmap" && allow_bitmap) return MaskSpec::Type::bitmap;
  throw ConfigError("key '" + std::string(key) + "' has unsupported value '" + std::string(v) +
                    "'");
}

inline std::string_view mask_type_name(MaskSpec::Type t) {
  switch (t) {
    case MaskSpec::Type::uniform: return "uniform";
    case MaskSpec::Type::spiral: return "spiral";
    case MaskSpec::Type::step: return "step";
    case MaskSpec::Type::disk: return "disk";
    case MaskSpec::Type::bitmap: return "bitmap";
  }
  return "?";
}

/// Key -> raw value map; rejects syntax errors and duplicates.
inline std::map<std::string, RawEntry> tokenize(std::string_view text) {
  std::map<std::string, RawEntry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected 'key = value' (line " + std::to_string(line_no) + ")");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty())
      throw ConfigError("empty key (line " + std::to_string(line_no) + ")");
    if (value.empty())
      throw ConfigError("key '" + key + "' has no value (line " + std::to_string(line_no) + ")");
    if (!entries.emplace(key, RawEntry{value, line_no}).second)
      throw ConfigError("duplicate key '" + key + "' (line " + std::to_string(line_no) + ")");
  }
  return entries;
}

}  // namespace cfg_detail

/// Parses and validates an experiment config for the given kind. Unknown
/// keys, type mismatches, and out-of-range values are all rejected with the
/// offending key named.
inline ExperimentConfig parse_config(std::string_view text, ExperimentKind kind) {
  using namespace cfg_detail;
  auto entries = tokenize(text);

  ExperimentConfig cfg;
  cfg.kind = kind;
  if (kind == ExperimentKind::bell) {
    cfg.grid_size = 160;
    cfg.object.type = MaskSpec::Type::disk;
    cfg.object.radius = 60.0;
  }
  if (kind == ExperimentKind::spectrum) cfg.window.shape = Window::Shape::disk;

  const auto take = [&](const char* key) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string v = it->second.value;
    entries.erase(it);
    return v;
  };

  if (const auto v = take("kind"); v && *v != kind_name(kind))
    throw ConfigError("config kind '" + *v + "' does not match the requested experiment '" +
                      std::string(kind_name(kind)) + "'");

  const bool is_scan = kind == ExperimentKind::scan;
  const bool is_bell = kind == ExperimentKind::bell;
  const bool is_spectrum = kind == ExperimentKind::spectrum;
  const bool is_speckle = kind == ExperimentKind::speckle_check;

  if (const auto v = take("grid.size")) {
    const long long n = parse_int(*v, "grid.size");
    if (n < 1 || n > 4096) throw ConfigError("key 'grid.size' out of range [1, 4096]");
    cfg.grid_size = static_cast<int>(n);
  }
  if (const auto v = take("out")) cfg.out_dir = *v;

  if (!is_spectrum) {
    if (const auto v = take("seed")) cfg.seed = parse_u64(*v, "seed");
    if (const auto v = take("coherence_px")) {
      cfg.coherence_px = parse_double(*v, "coherence_px");
      if (cfg.coherence_px < 0.0 || cfg.coherence_px > 16.0)
        throw ConfigError("key 'coherence_px' out of range [0, 16]");
    }
  }
  if (is_scan || is_bell) {
    if (const auto v = take("mode")) {
      if (*v == "analytic")
        cfg.mode = EstimateMode::analytic;
      else if (*v == "montecarlo")
        cfg.mode = EstimateMode::montecarlo;
      else
        throw ConfigError("key 'mode' must be analytic or montecarlo, got '" + *v + "'");
    }
    if (const auto v = take("mc.realizations")) {
      cfg.mc_realizations = parse_u64(*v, "mc.realizations");
      if (cfg.mc_realizations < 2) throw ConfigError("key 'mc.realizations' must be >= 2");
    }
    if (const auto v = take("threads")) {
      const long long t = parse_int(*v, "threads");
      if (t < 1 || t > 256) throw ConfigError("key 'threads' out of range [1, 256]");
      cfg.threads = static_cast<int>(t);
    }
    if (const auto v = take("filter.size")) {
      const long long n = parse_int(*v, "filter.size");
      if (n < 1 || n > 256) throw ConfigError("key 'filter.size' out of range [1, 256]");
      cfg.filter_size = static_cast<int>(n);
    }
  }

  // Object spec.
  bool object_type_given = false;
  if (is_scan || is_spectrum || is_bell) {
    if (const auto v = take("object.type")) {
      object_type_given = true;
      cfg.object.type = parse_mask_type(*v, "object.type", /*allow_bitmap=*/!is_bell);
      if (is_bell && cfg.object.type != MaskSpec::Type::disk)
        throw ConfigError("key 'object.type' must be disk for bell experiments");
    }
    if ((is_scan || is_spectrum) && !object_type_given)
      throw ConfigError("missing required key 'object.type'");

    const auto need_type = [&](const char* key, MaskSpec::Type t) {
      if (cfg.object.type != t)
        throw ConfigError("key '" + std::string(key) + "' requires object.type=" +
                          std::string(mask_type_name(t)));
    };
    if (const auto v = take("object.phase_deg")) {
      need_type("object.phase_deg", MaskSpec::Type::uniform);
      cfg.object.phase_deg = parse_double(*v, "object.phase_deg");
    }
    bool object_l_given = false;
    if (const auto v = take("object.l")) {
      need_type("object.l", MaskSpec::Type::spiral);
      cfg.object.charge = static_cast<int>(parse_int(*v, "object.l"));
      object_l_given = true;
    }
    if (cfg.object.type == MaskSpec::Type::spiral && !object_l_given)
      throw ConfigError("missing required key 'object.l'");
    if (const auto v = take("object.orientation_deg")) {
      need_type("object.orientation_deg", MaskSpec::Type::step);
      cfg.object.orientation_deg = parse_double(*v, "object.orientation_deg");
    }
    if (const auto v = take("object.radius")) {
      need_type("object.radius", MaskSpec::Type::disk);
      cfg.object.radius = parse_double(*v, "object.radius");
    }
    if (const auto v = take("object.path")) {
      need_type("object.path", MaskSpec::Type::bitmap);
      cfg.object.bitmap_path = *v;
    }
    if (cfg.object.type == MaskSpec::Type::disk) {
      if (!(cfg.object.radius > 0.0) || cfg.object.radius > cfg.grid_size / 2.0)
        throw ConfigError("key 'object.radius' out of range (0 < radius <= grid.size/2)");
    }
    if (cfg.object.type == MaskSpec::Type::bitmap && cfg.object.bitmap_path.empty())
      throw ConfigError("missing required key 'object.path'");
  }

  // Filter spec (scan only; bell filters are the oriented-step family).
  if (is_scan) {
    const auto v = take("filter.type");
    if (!v) throw ConfigError("missing required key 'filter.type'");
    cfg.filter.type = parse_mask_type(*v, "filter.type", /*allow_bitmap=*/false);
    const auto need_type = [&](const char* key, MaskSpec::Type t) {
      if (cfg.filter.type != t)
        throw ConfigError("key '" + std::string(key) + "' requires filter.type=" +
                          std::string(mask_type_name(t)));
    };
    if (const auto w = take("filter.phase_deg")) {
      need_type("filter.phase_deg", MaskSpec::Type::uniform);
      cfg.filter.phase_deg = parse_double(*w, "filter.phase_deg");
    }
    bool charge_given = false;
    if (const auto w = take("filter.l")) {
      need_type("filter.l", MaskSpec::Type::spiral);
      cfg.filter.charge = static_cast<int>(parse_int(*w, "filter.l"));
      charge_given = true;
    }
    if (cfg.filter.type == MaskSpec::Type::spiral && !charge_given)
      throw ConfigError("missing required key 'filter.l'");
    if (const auto w = take("filter.orientation_deg")) {
      need_type("filter.orientation_deg", MaskSpec::Type::step);
      cfg.filter.orientation_deg = parse_double(*w, "filter.orientation_deg");
    }
    if (cfg.filter.type == MaskSpec::Type::disk)
      throw ConfigError("key 'filter.type' has unsupported value 'disk'");
  }

  // Window spec.
  if (!is_speckle) {
    if (const auto v = take("window.shape")) {
      if (*v == "square")
        cfg.window.shape = Window::Shape::square;
      else if (*v == "disk")
        cfg.window.shape = Window::Shape::disk;
      else
        throw ConfigError("key 'window.shape' must be square or disk, got '" + *v + "'");
    }
    const auto hw = take("window.halfwidth");
    const auto rad = take("window.radius");
    if (hw && cfg.window.shape != Window::Shape::square)
      throw ConfigError("key 'window.halfwidth' requires window.shape=square");
    if (rad && cfg.window.shape != Window::Shape::disk)
      throw ConfigError("key 'window.radius' requires window.shape=disk");
    if (hw) cfg.window.extent = parse_double(*hw, "window.halfwidth");
    if (rad) cfg.window.extent = parse_double(*rad, "window.radius");
    if (cfg.window.extent && !(*cfg.window.extent > 0.0))
      throw ConfigError(std::string("key 'window.") +
                        (cfg.window.shape == Window::Shape::square ? "halfwidth" : "radius") +
                        "' must be positive");
  }

  if (is_scan) {
    if (const auto v = take("scan.x0")) cfg.scan_x0 = static_cast<int>(parse_int(*v, "scan.x0"));
    if (const auto v = take("scan.x1")) cfg.scan_x1 = static_cast<int>(parse_int(*v, "scan.x1"));
    if (const auto v = take("scan.y0")) cfg.scan_y0 = static_cast<int>(parse_int(*v, "scan.y0"));
    if (const auto v = take("scan.y1")) cfg.scan_y1 = static_cast<int>(parse_int(*v, "scan.y1"));
    if (const auto v = take("scan.stride")) {
      const long long s = parse_int(*v, "scan.stride");
      if (s < 1) throw ConfigError("key 'scan.stride' must be >= 1");
      cfg.scan_stride = static_cast<int>(s);
    }
  }

  if (is_bell) {
    if (const auto v = take("bell.radial_px")) {
      const long long r = parse_int(*v, "bell.radial_px");
      if (r < 1 || r > 64) throw ConfigError("key 'bell.radial_px' out of range [1, 64]");
      cfg.binning.radial_px = static_cast<int>(r);
    }
    if (const auto v = take("bell.azimuthal_deg")) {
      cfg.binning.azimuthal_deg = parse_double(*v, "bell.azimuthal_deg");
      if (!(cfg.binning.azimuthal_deg > 0.0) || cfg.binning.azimuthal_deg > 180.0)
        throw ConfigError("key 'bell.azimuthal_deg' out of range (0, 180]");
    }
    if (const auto v = take("bell.theta_a_deg"))
      cfg.settings_deg[0] = parse_double(*v, "bell.theta_a_deg");
    if (const auto v = take("bell.theta_b_deg"))
      cfg.settings_deg[1] = parse_double(*v, "bell.theta_b_deg");
    if (const auto v = take("bell.theta_a_prime_deg"))
      cfg.settings_deg[2] = parse_double(*v, "bell.theta_a_prime_deg");
    if (const auto v = take("bell.theta_b_prime_deg"))
      cfg.settings_deg[3] = parse_double(*v, "bell.theta_b_prime_deg");
    if (const auto v = take("bell.subtract_background"))
      cfg.subtract_background = parse_bool(*v, "bell.subtract_background");
  }

  if (is_spectrum) {
    if (const auto v = take("spectrum.l_max")) {
      const long long l = parse_int(*v, "spectrum.l_max");
      if (l < 1 || l > 64) throw ConfigError("key 'spectrum.l_max' out of range [1, 64]");
      cfg.l_max = static_cast<int>(l);
    }
    if (const auto v = take("spectrum.epsilon_disc")) {
      cfg.epsilon_disc = parse_double(*v, "spectrum.epsilon_disc");
      if (!(cfg.epsilon_disc > 0.0)) throw ConfigError("key 'spectrum.epsilon_disc' must be > 0");
    }
  }

  if (is_speckle) {
    if (const auto v = take("speckle.realizations")) {
      cfg.speckle_realizations = parse_u64(*v, "speckle.realizations");
      if (cfg.speckle_realizations < 1)
        throw ConfigError("key 'speckle.realizations' must be >= 1");
    }
  }

  // meta.* keys pass through untouched (instrument annotations)
  for (auto it = entries.begin(); it != entries.end();) {
    if (it->first.starts_with("meta.") && it->first.size() > 5) {
      cfg.metadata.emplace_back(it->first, it->second.value);
      it = entries.erase(it);
    } else {
      ++it;
    }
  }

  if (!entries.empty()) {
    const auto worst = std::min_element(entries.begin(), entries.end(),
                                        [](const auto& a, const auto& b) {
                                          return a.second.line < b.second.line;
                                        });
    throw ConfigError("unknown key '" + worst->first + "' (line " +
                      std::to_string(worst->second.line) + ")");
  }

  if ((is_scan || is_bell) && cfg.filter_size > cfg.grid_size)
    throw ConfigError("key 'filter.size' exceeds grid.size");
  return cfg;
}

/// Builds the object hologram; bitmap objects take their dimensions from the
/// file rather than grid.size.
inline PhaseMask build_object(const ExperimentConfig& cfg) {
  const int n = cfg.grid_size;
  switch (cfg.object.type) {
    case MaskSpec::Type::uniform: return make_uniform(n, cfg.object.phase_deg * kPi / 180.0);
    case MaskSpec::Type::spiral: return make_spiral(n, cfg.object.charge);
    case MaskSpec::Type::step: return make_step(n, cfg.object.orientation_deg * kPi / 180.0);
    case MaskSpec::Type::disk: return make_disk(n, cfg.object.radius);
    case MaskSpec::Type::bitmap: return from_bitmap(io::load_pbm(cfg.object.bitmap_path));
  }
  throw ConfigError("unreachable object type");
}

inline PhaseMask build_filter(const ExperimentConfig& cfg) {
  const int n = cfg.filter_size;
  switch (cfg.filter.type) {
    case MaskSpec::Type::uniform: return make_uniform(n, cfg.filter.phase_deg * kPi / 180.0);
    case MaskSpec::Type::spiral: return make_spiral(n, cfg.filter.charge);
    case MaskSpec::Type::step: return make_step(n, cfg.filter.orientation_deg * kPi / 180.0);
    default: throw ConfigError("unreachable filter type");
  }
}

/// Detection window in filter-grid coordinates (scan and bell kinds).
inline Window filter_window(const ExperimentConfig& cfg) {
  const double extent = cfg.window.extent.value_or(cfg.filter_size / 2.0);
  return cfg.window.shape == Window::Shape::square
             ? Window::square(grid_center(cfg.filter_size), extent)
             : Window::disk(grid_center(cfg.filter_size), extent);
}

/// Analysis window about the object-grid center (spectrum kind).
inline Window spectrum_window(const ExperimentConfig& cfg, int obj_w, int obj_h) {
  const double extent = cfg.window.extent.value_or(std::min(obj_w, obj_h) / 4.0);
  const Point c{(obj_w - 1) / 2.0, (obj_h - 1) / 2.0};
  return cfg.window.shape == Window::Shape::square ? Window::square(c, extent)
                                                   : Window::disk(c, extent);
}

/// Fills every object-dimension-dependent default so the config is a complete
/// record of the run. Scan ranges default to the full interior.
inline ExperimentConfig resolve(const ExperimentConfig& cfg, int obj_w, int obj_h) {
  ExperimentConfig out = cfg;
  if (cfg.kind == ExperimentKind::scan) {
    if (obj_w < cfg.filter_size || obj_h < cfg.filter_size)
      throw ConfigError("object grid is smaller than the filter hologram");
    if (!out.scan_x0) out.scan_x0 = 0;
    if (!out.scan_x1) out.scan_x1 = obj_w - cfg.filter_size;
    if (!out.scan_y0) out.scan_y0 = 0;
    if (!out.scan_y1) out.scan_y1 = obj_h - cfg.filter_size;
    if (*out.scan_x1 < *out.scan_x0 || *out.scan_y1 < *out.scan_y0)
      throw ConfigError("scan ranges are empty (x1 < x0 or y1 < y0)");
  }
  if (cfg.kind == ExperimentKind::spectrum || cfg.kind == ExperimentKind::scan ||
      cfg.kind == ExperimentKind::bell) {
    if (!out.window.extent) {
      out.window.extent = cfg.kind == ExperimentKind::spectrum
                              ? std::min(obj_w, obj_h) / 4.0
                              : cfg.filter_size / 2.0;
    }
  }
  return out;
}

inline OffsetRange scan_range(const ExperimentConfig& cfg) {
  if (!cfg.scan_x0 || !cfg.scan_x1 || !cfg.scan_y0 || !cfg.scan_y1)
    throw ConfigError("scan ranges are unresolved");
  return OffsetRange{*cfg.scan_x0, *cfg.scan_x1, *cfg.scan_y0, *cfg.scan_y1, cfg.scan_stride};
}

/// Canonical `key = value` rendering of a fully resolved config; every
/// default that affects the run appears.
inline std::string render_resolved(const ExperimentConfig& cfg) {
  std::string out;
  const auto put = [&](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  const auto put_d = [&](std::string_view key, double v) { put(key, io::format_double(v)); };
  const auto put_i = [&](std::string_view key, long long v) { put(key, std::to_string(v)); };

  put("kind", std::string(kind_name(cfg.kind)));
  if (cfg.object.type != MaskSpec::Type::bitmap || cfg.kind == ExperimentKind::speckle_check)
    put_i("grid.size", cfg.grid_size);

  const bool has_object = cfg.kind != ExperimentKind::speckle_check;
  if (has_object) {
    put("object.type", std::string(cfg_detail::mask_type_name(cfg.object.type)));
    switch (cfg.object.type) {
      case MaskSpec::Type::uniform: put_d("object.phase_deg", cfg.object.phase_deg); break;
      case MaskSpec::Type::spiral: put_i("object.l", cfg.object.charge); break;
      case MaskSpec::Type::step: put_d("object.orientation_deg", cfg.object.orientation_deg); break;
      case MaskSpec::Type::disk: put_d("object.radius", cfg.object.radius); break;
      case MaskSpec::Type::bitmap: put("object.path", cfg.object.bitmap_path); break;
    }
  }

  if (cfg.kind == ExperimentKind::scan) {
    put("filter.type", std::string(cfg_detail::mask_type_name(cfg.filter.type)));
    switch (cfg.filter.type) {
      case MaskSpec::Type::uniform: put_d("filter.phase_deg", cfg.filter.phase_deg); break;
      case MaskSpec::Type::spiral: put_i("filter.l", cfg.filter.charge); break;
      case MaskSpec::Type::step: put_d("filter.orientation_deg", cfg.filter.orientation_deg); break;
      default: break;
    }
  }
  if (cfg.kind == ExperimentKind::scan || cfg.kind == ExperimentKind::bell)
    put_i("filter.size", cfg.filter_size);

  if (has_object) {
    put("window.shape", cfg.window.shape == Window::Shape::square ? "square" : "disk");
    if (cfg.window.extent)
      put_d(cfg.window.shape == Window::Shape::square ? "window.halfwidth" : "window.radius",
            *cfg.window.extent);
  }

  if (cfg.kind == ExperimentKind::scan || cfg.kind == ExperimentKind::bell) {
    put("mode", cfg.mode == EstimateMode::analytic ? "analytic" : "montecarlo");
    put_i("mc.realizations", static_cast<long long>(cfg.mc_realizations));
  }
  if (cfg.kind != ExperimentKind::spectrum) {
    put_i("seed", static_cast<long long>(cfg.seed));
    put_d("coherence_px", cfg.coherence_px);
  }

  if (cfg.kind == ExperimentKind::scan) {
    if (cfg.scan_x0) put_i("scan.x0", *cfg.scan_x0);
    if (cfg.scan_x1) put_i("scan.x1", *cfg.scan_x1);
    if (cfg.scan_y0) put_i("scan.y0", *cfg.scan_y0);
    if (cfg.scan_y1) put_i("scan.y1", *cfg.scan_y1);
    put_i("scan.stride", cfg.scan_stride);
  }

  if (cfg.kind == ExperimentKind::bell) {
    put_i("bell.radial_px", cfg.binning.radial_px);
    put_d("bell.azimuthal_deg", cfg.binning.azimuthal_deg);
    put_d("bell.theta_a_deg", cfg.settings_deg[0]);
    put_d("bell.theta_b_deg", cfg.settings_deg[1]);
    put_d("bell.theta_a_prime_deg", cfg.settings_deg[2]);
    put_d("bell.theta_b_prime_deg", cfg.settings_deg[3]);
    put("bell.subtract_background", cfg.subtract_background ? "true" : "false");
  }

  if (cfg.kind == ExperimentKind::spectrum) {
    put_i("spectrum.l_max", cfg.l_max);
    put_d("spectrum.epsilon_disc", cfg.epsilon_disc);
  }

  if (cfg.kind == ExperimentKind::speckle_check)
    put_i("speckle.realizations", static_cast<long long>(cfg.speckle_realizations));

  for (const auto& [key, value] : cfg.metadata) put(key, value);
  // `threads` and `out` never appear: they are execution details with no
  // effect on any output byte, and the echo identifies the experiment.
  return out;
}

/// Optional command-line overrides applied after parsing; each corresponds
/// 1:1 to a config key.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> mc_realizations;
  std::optional<bool> subtract_background;
};

inline void apply_overrides(ExperimentConfig& cfg, const CliOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.mode) {
    if (*ov.mode == "analytic")
      cfg.mode = EstimateMode::analytic;
    else if (*ov.mode == "montecarlo")
      cfg.mode = EstimateMode::montecarlo;
    else
      throw ConfigError("key 'mode' must be analytic or montecarlo, got '" + *ov.mode + "'");
  }
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.threads) {
    if (*ov.threads < 1 || *ov.threads > 256)
      throw ConfigError("key 'threads' out of range [1, 256]");
    cfg.threads = *ov.threads;
  }
  if (ov.mc_realizations) {
    if (*ov.mc_realizations < 2) throw ConfigError("key 'mc.realizations' must be >= 2");
    cfg.mc_realizations = *ov.mc_realizations;
  }
  if (ov.subtract_background) cfg.subtract_background = *ov.subtract_background;
}

}  // namespace tlgi
