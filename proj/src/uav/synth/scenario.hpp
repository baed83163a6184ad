#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "uav/io/types.hpp"
#include "uav/lidar/segmentation.hpp"
#include "uav/state/estimator.hpp"
#include "uav/synth/splitmix.hpp"
#include "uav/thermal/detect.hpp"

namespace uav::synth {

enum class TrajectoryKind { hover, line, circle, lissajous };

struct CameraSpec {
  uint32_t width = 1920;
  uint32_t height = 1080;
  double focal_px = 1500.0;
  state::Mount mount{0.0, 0.0, 1500.0, 0.0};
};

struct ThermalCameraSpec {
  uint32_t width = 640;
  uint32_t height = 512;
  double focal_px = 700.0;
  uint8_t hot_level = 230;
  state::Mount mount{0.0, 0.0, 1500.0, 0.0};
};

struct LidarSensorSpec {
  int points_per_degree = 4;
  double fov_deg = 180.0;
  double angular_start_deg = 0.0;
  double plane_z_mm = 1200.0;   // height of the horizontal scan plane
  double plane_tol_mm = 100.0;  // vertical half-extent that counts as crossing
  double wall_y_mm = 6000.0;    // flat back wall; 0 disables it
  double max_range_mm = 30000.0;
};

struct NoiseSpec {
  double detection_jitter_px = 0.0;
  double detection_miss_prob = 0.0;
  uint8_t thermal_background = 30;
  double thermal_noise_std = 0.0;
  double lidar_range_noise_mm = 0.0;
};

struct IsoStep {
  double t = 0.0;
  uint32_t iso = 100;
};

struct StreamToggles {
  bool detections = true;
  bool thermal = true;
  bool lidar = true;
  bool groundtruth = true;
};

struct RatesHz {
  double detections = 60.0;
  double thermal = 30.0;
  double lidar = 40.0;
  double groundtruth = 100.0;
};

/// Fully parameterized synthetic session. Rendering inverts the same
/// projection and chord relations the pipeline estimates with, so a
/// noiseless session is an exact oracle up to pixel/beam quantization.
struct ScenarioSpec {
  TrajectoryKind kind = TrajectoryKind::hover;
  Vec3 center_mm{0.0, 3000.0, 1500.0};
  double radius_mm = 1000.0;   // circle
  double speed_mm_s = 400.0;   // circle: tangential speed
  double tilt_deg = 0.0;       // circle: rotation of the orbit plane about x
  double phase_deg = 0.0;      // circle: start angle
  Vec3 line_end_mm{0.0, 3000.0, 1500.0};
  Vec3 amp_mm{500.0, 300.0, 200.0};        // lissajous
  Vec3 freq_hz{0.10, 0.13, 0.17};          // lissajous
  Vec3 phase_rad{0.0, 1.0, 2.0};           // lissajous
  double duration_s = 10.0;
  uint64_t seed = 1;
  double uav_length_mm = 350.0;
  double uav_height_mm = 210.0;
  RatesHz rates;
  StreamToggles streams;
  NoiseSpec noise;
  std::vector<IsoStep> iso_steps{{0.0, 100}};
  CameraSpec camera;
  ThermalCameraSpec thermal_camera;
  LidarSensorSpec lidar_sensor;
  lidar::AngleConvention angle_convention = lidar::AngleConvention::as_printed;
  io::StreamOffsets offsets;

  static ScenarioSpec from_json(const nlohmann::json& j);
  static ScenarioSpec load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
  void validate() const;  // raises invalid_spec
};

/// Analytic trajectory position at time t.
Vec3 trajectory_point(const ScenarioSpec& spec, double t);

/// ISO value active at time t per the spec's schedule.
uint32_t iso_at(const ScenarioSpec& spec, double t);

/// Projects the target into the monocular camera. Returns nothing when the
/// target is behind the camera or its center leaves the frame.
std::optional<io::DetectionRecord> render_detection(const ScenarioSpec& spec, double t,
                                                    uint64_t frame_id, SplitMix64& rng);

/// Background plus an anti-aliased hot disc whose diameter encodes the
/// target's apparent size.
io::ThermalFrame render_thermal_frame(const ScenarioSpec& spec, double t, SplitMix64& rng);

/// Wall returns plus a target segment when the trajectory crosses the scan
/// plane. Beam count inverts the active chord convention.
io::LidarScan render_lidar_scan(const ScenarioSpec& spec, double t, SplitMix64& rng);

/// Paths of everything one generated session writes.
struct SessionPaths {
  std::filesystem::path manifest;
  std::filesystem::path scenario;
  std::filesystem::path calibration;
  std::filesystem::path thermal_dir;
  std::filesystem::path lidar_csv;
  std::filesystem::path detections_jsonl;
  std::filesystem::path groundtruth_csv;
};

/// Writes the complete on-disk session (manifest, streams, ground truth,
/// exact calibration, spec echo). Byte-identical for identical specs.
SessionPaths gen_session(const ScenarioSpec& spec, const std::filesystem::path& out_dir);

/// Deterministic histogram cases for threshold testing.
struct HistogramCase {
  enum class Kind { unimodal, bimodal, spread, degenerate };
  thermal::GrayHistogram histogram;
  Kind kind = Kind::spread;
  int mode_gap = 0;  // bimodal only: distance between the two modes
};
std::vector<HistogramCase> gen_histogram_cases(uint64_t seed, size_t n,
                                               bool include_degenerate = true);

}  // namespace uav::synth
