// Command-line front end for the uavpipe shared library. Talks to the core
// exclusively through the C API in uavpipe.h.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "uavpipe.h"

namespace {

/// Scripting contract: 0 ok, 2 bad spec, 3 missing calibration, 4 disjoint
/// eval ranges, 5 no co-occurrence window, 1 anything else.
int exit_code_for(uvt_status status) {
  switch (status) {
    case UVT_OK:
      return 0;
    case UVT_ERR_INVALID_SPEC:
    case UVT_ERR_MISSING_CALIBRATION:
    case UVT_ERR_NO_OVERLAP:
    case UVT_ERR_NO_COOCCURRENCE:
      return static_cast<int>(status);
    default:
      return 1;
  }
}

int finish(uvt_status status) {
  if (status != UVT_OK) {
    std::fprintf(stderr, "uavpipe: %s: %s\n", uvt_status_name(status), uvt_last_error());
  }
  return exit_code_for(status);
}

struct ConfigHandle {
  uvt_config* ptr = nullptr;
  ~ConfigHandle() { uvt_config_free(ptr); }
};

uvt_status load_config(const std::string& config_path, const std::string& angle_convention,
                       const std::string& calibration, ConfigHandle& handle) {
  uvt_status status = config_path.empty() ? uvt_config_create_default(&handle.ptr)
                                          : uvt_config_load(config_path.c_str(), &handle.ptr);
  if (status != UVT_OK) return status;
  if (!angle_convention.empty()) {
    status = uvt_config_set_angle_convention(handle.ptr, angle_convention.c_str());
    if (status != UVT_OK) return status;
  }
  if (!calibration.empty()) {
    status = uvt_config_set_calibration_path(handle.ptr, calibration.c_str());
    if (status != UVT_OK) return status;
  }
  return UVT_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavpipe: multi-sensor UAV tracking, localization and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand arguments

  std::string config_path;
  std::string angle_convention;
  bool plot = false;
  bool bypass_kf = false;
  uint64_t seed = 0;
  bool has_seed = false;
  app.add_option("--config", config_path, "pipeline config JSON")->expected(1);
  app.add_option("--angle-convention", angle_convention,
                 "chord angle convention: as-printed | half-angle");
  app.add_flag("--plot", plot, "write per-axis SVG curves next to the eval report");
  app.add_flag("--bypass-kf", bypass_kf, "pass box centers through unfiltered");
  app.add_option("--seed", seed, "override the scenario seed")->each([&](const std::string&) {
    has_seed = true;
  });

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic session");
  std::string spec_path;
  std::string out_dir;
  synth->add_option("spec", spec_path, "scenario spec JSON")->required();
  synth->add_option("out_dir", out_dir, "output session directory")->required();

  // track
  auto* track = app.add_subcommand("track", "run the tracking pipeline over a session");
  std::string manifest_path;
  std::string out_csv;
  track->add_option("manifest", manifest_path, "session manifest JSON")->required();
  track->add_option("-o,--out", out_csv, "output trajectory CSV")->required();
  std::string calibration_path;
  track->add_option("--calibration", calibration_path,
                    "calibration JSON (default: config key, then calibration.json beside the "
                    "manifest)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a trajectory against ground truth");
  std::string trajectory_csv;
  std::string gt_csv;
  std::string report_json;
  eval->add_option("trajectory", trajectory_csv, "trajectory CSV")->required();
  eval->add_option("groundtruth", gt_csv, "ground-truth CSV")->required();
  eval->add_option("-o,--out", report_json, "output report JSON")->required();

  // calibrate
  auto* calibrate =
      app.add_subcommand("calibrate", "capture a calibration record from a session");
  std::string calib_manifest;
  std::string calib_out;
  calibrate->add_option("manifest", calib_manifest, "session manifest JSON")->required();
  calibrate->add_option("-o,--out", calib_out, "output calibration JSON")->required();

  // config
  auto* config_cmd = app.add_subcommand("config", "configuration utilities");
  bool dump_defaults = false;
  config_cmd->add_flag("--dump-defaults", dump_defaults, "print the default config JSON");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    uvt_synth_options options{};
    options.has_seed = has_seed ? 1 : 0;
    options.seed = seed;
    options.angle_convention = angle_convention.empty() ? nullptr : angle_convention.c_str();
    return finish(uvt_synth(spec_path.c_str(), out_dir.c_str(), &options));
  }

  if (track->parsed()) {
    ConfigHandle config;
    uvt_status status = load_config(config_path, angle_convention, calibration_path, config);
    if (status != UVT_OK) return finish(status);
    uvt_track_stats stats{};
    status = uvt_track(manifest_path.c_str(), config.ptr, out_csv.c_str(), bypass_kf ? 1 : 0,
                       &stats);
    if (status == UVT_OK) {
      std::fprintf(stderr,
                   "uavpipe: processed %llu frames (%llu mono, %llu thermal), emitted %llu "
                   "states, %llu recalibrations\n",
                   stats.frames_processed, stats.mono_frames, stats.thermal_frames,
                   stats.rows_emitted, stats.recalibrations);
    }
    return finish(status);
  }

  if (eval->parsed()) {
    std::string plot_dir;
    if (plot) {
      const auto slash = report_json.find_last_of('/');
      plot_dir = slash == std::string::npos ? std::string(".") : report_json.substr(0, slash);
    }
    char* table = nullptr;
    const uvt_status status = uvt_evaluate(trajectory_csv.c_str(), gt_csv.c_str(),
                                           report_json.c_str(),
                                           plot ? plot_dir.c_str() : nullptr, &table);
    if (status == UVT_OK && table != nullptr) {
      std::fputs(table, stdout);
      uvt_string_free(table);
    }
    return finish(status);
  }

  if (calibrate->parsed()) {
    ConfigHandle config;
    uvt_status status = load_config(config_path, angle_convention, calibration_path, config);
    if (status != UVT_OK) return finish(status);
    return finish(uvt_calibrate(calib_manifest.c_str(), config.ptr, calib_out.c_str()));
  }

  if (config_cmd->parsed()) {
    ConfigHandle config;
    uvt_status status = load_config(config_path, angle_convention, "", config);
    if (status != UVT_OK) return finish(status);
    if (dump_defaults && !config_path.empty()) {
      std::fprintf(stderr, "uavpipe: --dump-defaults ignores --config\n");
    }
    if (dump_defaults) {
      uvt_config_free(config.ptr);
      config.ptr = nullptr;
      status = uvt_config_create_default(&config.ptr);
      if (status != UVT_OK) return finish(status);
    }
    char* text = nullptr;
    status = uvt_config_dump(config.ptr, &text);
    if (status == UVT_OK) {
      std::fputs(text, stdout);
      uvt_string_free(text);
    }
    return finish(status);
  }

  return 1;
}
