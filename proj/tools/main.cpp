// Command-line front end for the riscim simulator. Everything goes through
// the C API in riscim/riscim.h; this file only parses arguments and maps
// statuses to exit codes (0 ok, 1 usage, 2 config error, 3 runtime/io).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "riscim/riscim.h"

namespace {

int exit_code_for(riscim_status st) {
  switch (st) {
    case RISCIM_OK:
      return 0;
    case RISCIM_ERR_CONFIG:
    case RISCIM_ERR_INVALID_ARGUMENT:
      return 2;
    case RISCIM_ERR_IO:
    case RISCIM_ERR_RUNTIME:
    default:
      return 3;
  }
}

int report_failure(riscim_status st) {
  std::fprintf(stderr, "riscim: error: %s\n", riscim_last_error());
  return exit_code_for(st);
}

bool read_file(const std::string& path, std::string& out, std::string& err) {
  std::ifstream is(path);
  if (!is) {
    err = "cannot open config file " + path;
    return false;
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  out = ss.str();
  return true;
}

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 0;
};

void add_global_flags(CLI::App* cmd, GlobalArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the config RNG seed")
      ->each([&args](const std::string&) { args.has_seed = true; });
  cmd->add_option("--threads", args.threads,
                  "OpenMP thread count (0 = default)");
}

int run_kind(const char* kind, const GlobalArgs& args) {
  std::string config_text;
  if (!args.config_path.empty()) {
    std::string err;
    if (!read_file(args.config_path, config_text, err)) {
      std::fprintf(stderr, "riscim: error: %s\n", err.c_str());
      return 3;
    }
  }
  riscim_run_options opt{};
  opt.out_dir = args.out_dir.c_str();
  opt.seed = args.seed;
  opt.override_seed = args.has_seed ? 1 : 0;
  opt.threads = args.threads;
  const riscim_status st = riscim_run(
      kind, config_text.empty() ? nullptr : config_text.c_str(), &opt);
  if (st != RISCIM_OK) return report_failure(st);
  std::printf("riscim %s: wrote results to %s\n", kind, args.out_dir.c_str());
  return 0;
}

// The masks subcommand drives the handle-based C API directly (scene ->
// generate -> container) instead of the batch runner, so the replay path
// stays exercised end to end.
int run_masks_cmd(const GlobalArgs& args, const std::string& strategy,
                  int count, double c_max) {
  std::string config_text;
  if (!args.config_path.empty()) {
    std::string err;
    if (!read_file(args.config_path, config_text, err)) {
      std::fprintf(stderr, "riscim: error: %s\n", err.c_str());
      return 3;
    }
  }
  riscim_scene* scene = nullptr;
  riscim_status st = riscim_scene_create(
      config_text.empty() ? nullptr : config_text.c_str(), &scene);
  if (st != RISCIM_OK) return report_failure(st);

  riscim_mask_params params{};
  params.strategy = RISCIM_STRATEGY_FOCUSED_SPECKLE;
  if (strategy == "raster_scan") params.strategy = RISCIM_STRATEGY_RASTER_SCAN;
  if (strategy == "random_pattern")
    params.strategy = RISCIM_STRATEGY_RANDOM_PATTERN;
  params.count = count;
  params.c_max = c_max;
  params.randomize_angles = 1;
  params.randomize_offsets = 1;
  params.seed = args.has_seed ? args.seed : 1;

  riscim_masks* masks = nullptr;
  st = riscim_masks_generate(scene, &params, &masks);
  if (st != RISCIM_OK) {
    riscim_scene_destroy(scene);
    return report_failure(st);
  }
  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  const std::string path = args.out_dir + "/masks.bin";
  st = riscim_masks_save(masks, path.c_str());
  size_t n = 0;
  riscim_masks_count(masks, &n);
  riscim_masks_destroy(masks);
  riscim_scene_destroy(scene);
  if (st != RISCIM_OK) return report_failure(st);
  std::printf("riscim masks: wrote %zu %s masks to %s\n", n, strategy.c_str(),
              path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-enabled radar coincidence imaging simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(riscim_version()));

  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd runner_cmds[] = {
      {"fields", "render speckle/beam pattern galleries"},
      {"svd", "singular-value diversity study"},
      {"image", "single-strategy imaging run"},
      {"compare", "proposed vs raster vs random comparison"},
      {"clutter", "clutter robustness study"},
      {"roi-sweep", "pattern confinement across ROIs"},
  };

  GlobalArgs args;
  std::string picked;
  for (const Cmd& c : runner_cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_global_flags(sub, args);
    sub->callback([&picked, name = std::string(c.name)] { picked = name; });
  }

  std::string mask_strategy = "focused_speckle";
  int mask_count = 20;
  double mask_c_max = 0.25;
  {
    CLI::App* sub = app.add_subcommand("masks", "generate + export masks");
    add_global_flags(sub, args);
    sub->add_option("--strategy", mask_strategy,
                    "focused_speckle|raster_scan|random_pattern");
    sub->add_option("--count", mask_count, "number of masks");
    sub->add_option("--c-max", mask_c_max, "redirection scale bound");
    sub->callback([&picked] { picked = "masks"; });
  }

  CLI11_PARSE(app, argc, argv);

  if (picked == "masks")
    return run_masks_cmd(args, mask_strategy, mask_count, mask_c_max);
  return run_kind(picked.c_str(), args);
}
