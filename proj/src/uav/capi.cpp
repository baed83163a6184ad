#include "uavpipe.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "uav/config.hpp"
#include "uav/eval/metrics.hpp"
#include "uav/io/session.hpp"
#include "uav/state/pipeline.hpp"
#include "uav/synth/scenario.hpp"

namespace {

thread_local std::string g_last_error;

uvt_status status_for(uav::ErrorCode code) {
  using uav::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_spec:
      return UVT_ERR_INVALID_SPEC;
    case ErrorCode::missing_calibration:
    case ErrorCode::missing_stream:
      return UVT_ERR_MISSING_CALIBRATION;
    case ErrorCode::no_overlap:
      return UVT_ERR_NO_OVERLAP;
    case ErrorCode::no_cooccurrence:
      return UVT_ERR_NO_COOCCURRENCE;
    case ErrorCode::io_error:
    case ErrorCode::missing_file:
      return UVT_ERR_IO;
    case ErrorCode::malformed_record:
    case ErrorCode::invalid_config:
      return UVT_ERR_PARSE;
    case ErrorCode::invalid_argument:
    case ErrorCode::non_positive_dt:
    case ErrorCode::zero_pixel_length:
    case ErrorCode::out_of_range:
      return UVT_ERR_INVALID_ARGUMENT;
    default:
      return UVT_ERR_RUNTIME;
  }
}

template <class Fn>
uvt_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return UVT_OK;
  } catch (const uav::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UVT_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return UVT_ERR_RUNTIME;
  }
}

uvt_status fail_argument(const char* message) {
  g_last_error = message;
  return UVT_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) {
    std::memcpy(out, s.c_str(), s.size() + 1);
  }
  return out;
}

/// Calibration path from the config, falling back to the session directory.
std::filesystem::path resolve_calibration_path(const uav::PipelineConfig& config,
                                               const std::filesystem::path& manifest_path) {
  if (!config.calibration_path.empty()) {
    return config.calibration_path;
  }
  return manifest_path.parent_path() / "calibration.json";
}

}  // namespace

struct uvt_config {
  uav::PipelineConfig value;
};

struct uvt_session {
  uav::io::Session value;
};

extern "C" {

const char* uvt_version(void) { return "1.0.0"; }

const char* uvt_status_name(uvt_status status) {
  switch (status) {
    case UVT_OK: return "UVT_OK";
    case UVT_ERR_RUNTIME: return "UVT_ERR_RUNTIME";
    case UVT_ERR_INVALID_SPEC: return "UVT_ERR_INVALID_SPEC";
    case UVT_ERR_MISSING_CALIBRATION: return "UVT_ERR_MISSING_CALIBRATION";
    case UVT_ERR_NO_OVERLAP: return "UVT_ERR_NO_OVERLAP";
    case UVT_ERR_NO_COOCCURRENCE: return "UVT_ERR_NO_COOCCURRENCE";
    case UVT_ERR_IO: return "UVT_ERR_IO";
    case UVT_ERR_PARSE: return "UVT_ERR_PARSE";
    case UVT_ERR_INVALID_ARGUMENT: return "UVT_ERR_INVALID_ARGUMENT";
  }
  return "UVT_ERR_UNKNOWN";
}

const char* uvt_last_error(void) { return g_last_error.c_str(); }

void uvt_string_free(char* s) { std::free(s); }

uvt_status uvt_config_create_default(uvt_config** out) {
  if (out == nullptr) return fail_argument("out must not be NULL");
  return guarded([&] { *out = new uvt_config{uav::PipelineConfig::defaults()}; });
}

uvt_status uvt_config_load(const char* json_path, uvt_config** out) {
  if (json_path == nullptr || out == nullptr) return fail_argument("NULL argument");
  return guarded([&] { *out = new uvt_config{uav::PipelineConfig::load(json_path)}; });
}

uvt_status uvt_config_parse(const char* json_text, uvt_config** out) {
  if (json_text == nullptr || out == nullptr) return fail_argument("NULL argument");
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      uav::raise(uav::ErrorCode::invalid_config, std::string("invalid JSON: ") + e.what());
    }
    *out = new uvt_config{uav::PipelineConfig::from_json(j)};
  });
}

uvt_status uvt_config_dump(const uvt_config* config, char** json_out) {
  if (config == nullptr || json_out == nullptr) return fail_argument("NULL argument");
  return guarded([&] { *json_out = dup_string(config->value.to_json().dump(2) + "\n"); });
}

uvt_status uvt_config_set_angle_convention(uvt_config* config, const char* convention) {
  if (config == nullptr || convention == nullptr) return fail_argument("NULL argument");
  return guarded([&] {
    config->value.lidar.angle_convention =
        uav::lidar::angle_convention_from_string(convention);
  });
}

uvt_status uvt_config_set_calibration_path(uvt_config* config, const char* path) {
  if (config == nullptr || path == nullptr) return fail_argument("NULL argument");
  config->value.calibration_path = path;
  g_last_error.clear();
  return UVT_OK;
}

void uvt_config_free(uvt_config* config) { delete config; }

uvt_status uvt_session_open(const char* manifest_path, uvt_session** out) {
  if (manifest_path == nullptr || out == nullptr) return fail_argument("NULL argument");
  return guarded([&] { *out = new uvt_session{uav::io::load_session(manifest_path)}; });
}

void uvt_session_free(uvt_session* session) { delete session; }

size_t uvt_session_detection_count(const uvt_session* s) {
  return s == nullptr ? 0 : s->value.detections.size();
}
size_t uvt_session_thermal_count(const uvt_session* s) {
  return s == nullptr ? 0 : s->value.thermal.size();
}
size_t uvt_session_lidar_count(const uvt_session* s) {
  return s == nullptr ? 0 : s->value.lidar.size();
}
size_t uvt_session_groundtruth_count(const uvt_session* s) {
  return s == nullptr ? 0 : s->value.groundtruth.size();
}

uvt_status uvt_synth(const char* spec_json_path, const char* out_dir,
                     const uvt_synth_options* options) {
  if (spec_json_path == nullptr || out_dir == nullptr) return fail_argument("NULL argument");
  return guarded([&] {
    uav::synth::ScenarioSpec spec = uav::synth::ScenarioSpec::load(spec_json_path);
    if (options != nullptr) {
      if (options->has_seed) {
        spec.seed = options->seed;
      }
      if (options->angle_convention != nullptr) {
        spec.angle_convention =
            uav::lidar::angle_convention_from_string(options->angle_convention);
      }
    }
    uav::synth::gen_session(spec, out_dir);
  });
}

uvt_status uvt_track(const char* manifest_path, const uvt_config* config, const char* out_csv,
                     int bypass_kalman, uvt_track_stats* stats_out) {
  if (manifest_path == nullptr || config == nullptr || out_csv == nullptr) {
    return fail_argument("NULL argument");
  }
  return guarded([&] {
    const uav::io::Session session = uav::io::load_session(manifest_path);
    const auto calib_path = resolve_calibration_path(config->value, manifest_path);
    if (!std::filesystem::exists(calib_path)) {
      uav::raise(uav::ErrorCode::missing_calibration,
                 "calibration file not found: " + calib_path.string());
    }
    const uav::state::CalibrationSet calibration = uav::state::load_calibration(calib_path);
    uav::state::PipelineOptions options;
    options.bypass_kalman = bypass_kalman != 0;
    const auto result =
        uav::state::run_pipeline(session, calibration, config->value, options);
    uav::state::write_trajectory_csv(out_csv, result.states);
    if (stats_out != nullptr) {
      stats_out->frames_processed = result.stats.frames_processed;
      stats_out->mono_frames = result.stats.mono_frames;
      stats_out->thermal_frames = result.stats.thermal_frames;
      stats_out->rows_emitted = result.stats.emitted;
      stats_out->recalibrations = result.stats.recalibrations;
    }
  });
}

uvt_status uvt_evaluate(const char* trajectory_csv, const char* groundtruth_csv,
                        const char* out_json, const char* plot_dir, char** table_out) {
  if (trajectory_csv == nullptr || groundtruth_csv == nullptr || out_json == nullptr) {
    return fail_argument("NULL argument");
  }
  return guarded([&] {
    const auto estimates = uav::state::read_trajectory_csv(trajectory_csv);
    const auto gt = uav::io::read_groundtruth_csv(groundtruth_csv);
    const auto report = uav::eval::evaluate(estimates, gt.samples, gt.has_visibility);
    std::ofstream out(out_json);
    if (!out) {
      uav::raise(uav::ErrorCode::io_error,
                 std::string("cannot open for writing: ") + out_json);
    }
    out << uav::eval::report_to_json(report).dump(2) << '\n';
    if (plot_dir != nullptr) {
      uav::eval::write_svg_plots(plot_dir, estimates, gt.samples);
    }
    if (table_out != nullptr) {
      *table_out = dup_string(uav::eval::report_table(report));
    }
  });
}

uvt_status uvt_calibrate(const char* manifest_path, const uvt_config* config,
                         const char* out_json) {
  if (manifest_path == nullptr || config == nullptr || out_json == nullptr) {
    return fail_argument("NULL argument");
  }
  return guarded([&] {
    const uav::io::Session session = uav::io::load_session(manifest_path);
    const auto record = uav::state::find_calibration(session, config->value);
    if (!record) {
      uav::raise(uav::ErrorCode::no_cooccurrence,
                 "no window where a lidar target segment co-occurs with a tracked box");
    }
    uav::state::write_calibration(out_json, std::span(&*record, 1));
  });
}

}  // extern "C"
