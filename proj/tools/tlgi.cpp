// Command-line entry point: scan / bell / spectrum / speckle-check runs from
// a config file, with flag overrides and reproducible outputs.
#include <cstdio>
#include <filesystem>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "tlgi/runner.hpp"

namespace {

struct SubcommandState {
  std::string config_path;
  tlgi::CliOverrides overrides;
  bool subtract_background = false;
  bool subtract_given = false;
};

// Flags mirror config keys 1:1, so each subcommand only carries the flags
// its config schema accepts.
void add_common_options(CLI::App* sub, SubcommandState& state) {
  sub->add_option("--config", state.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", state.overrides.out_dir, "override the output directory");
}

void add_seed_option(CLI::App* sub, SubcommandState& state) {
  sub->add_option("--seed", state.overrides.seed, "override the config seed");
}

void add_mc_options(CLI::App* sub, SubcommandState& state) {
  add_seed_option(sub, state);
  sub->add_option("--mode", state.overrides.mode, "override mode (analytic|montecarlo)");
  sub->add_option("--threads", state.overrides.threads, "override the worker count");
  sub->add_option("--mc-realizations", state.overrides.mc_realizations,
                  "override the Monte Carlo realization count");
}

int run_kind(tlgi::ExperimentKind kind, SubcommandState& state) {
  try {
    const std::string text = tlgi::io::read_file(state.config_path);
    tlgi::ExperimentConfig cfg = tlgi::parse_config(text, kind);
    // relative bitmap paths count from the config file, not the process cwd
    if (cfg.object.type == tlgi::MaskSpec::Type::bitmap) {
      const std::filesystem::path p = cfg.object.bitmap_path;
      if (p.is_relative())
        cfg.object.bitmap_path =
            (std::filesystem::path(state.config_path).parent_path() / p)
                .lexically_normal()
                .string();
    }
    if (state.subtract_given) state.overrides.subtract_background = state.subtract_background;
    tlgi::apply_overrides(cfg, state.overrides);
    const tlgi::RunArtifacts artifacts = tlgi::run(cfg);
    for (const std::string& f : artifacts.files)
      std::printf("wrote %s\n", (artifacts.dir / f).string().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tlgi: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tlgi - thermal-light edge-enhancement ghost imaging simulator"};
  app.require_subcommand(1);

  SubcommandState scan_state, bell_state, spectrum_state, speckle_state;

  CLI::App* scan = app.add_subcommand("scan", "edge-enhanced ghost image scan");
  add_common_options(scan, scan_state);
  add_mc_options(scan, scan_state);

  CLI::App* bell = app.add_subcommand("bell", "CHSH Bell-type correlation analysis");
  add_common_options(bell, bell_state);
  add_mc_options(bell, bell_state);
  bell->add_flag("--subtract-background", bell_state.subtract_background,
                 "evaluate E on delta_g2 = C - 1 instead of raw C");

  CLI::App* spectrum = app.add_subcommand("spectrum", "azimuthal mode decomposition of a mask");
  add_common_options(spectrum, spectrum_state);

  CLI::App* speckle = app.add_subcommand("speckle-check", "speckle-statistics self test");
  add_common_options(speckle, speckle_state);
  add_seed_option(speckle, speckle_state);

  CLI11_PARSE(app, argc, argv);

  if (scan->parsed()) return run_kind(tlgi::ExperimentKind::scan, scan_state);
  if (bell->parsed()) {
    bell_state.subtract_given = bell->count("--subtract-background") > 0;
    return run_kind(tlgi::ExperimentKind::bell, bell_state);
  }
  if (spectrum->parsed()) return run_kind(tlgi::ExperimentKind::spectrum, spectrum_state);
  if (speckle->parsed()) return run_kind(tlgi::ExperimentKind::speckle_check, speckle_state);
  return 1;
}
