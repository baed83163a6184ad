#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "uav/lidar/segmentation.hpp"
#include "uav/state/estimator.hpp"
#include "uav/thermal/detect.hpp"
#include "uav/track/kalman.hpp"

namespace uav {

/// Everything the tracking pipeline needs beyond the session itself.
/// Loaded from JSON; every field is validated against its module's
/// invariants up front, naming the offending key.
struct PipelineConfig {
  uint32_t iso_threshold = 6400;

  struct DetectionConfig {
    double min_score = 0.8;  // boxes below this confidence are ignored
  } detection;

  track::KalmanConfig tracker;
  thermal::ThermalDetectConfig thermal;
  // Constant world-frame offset added to thermal-branch outputs. The hot
  // motors sit above the airframe center, so the thermal box center rides
  // high; left at zero, matching the uncorrected reference behavior.
  Vec3 thermal_bias_mm;

  struct LidarConfig {
    std::vector<lidar::ExclusionZone> zones;
    double gap_mm = 150.0;
    int min_points = 10;
    int points_per_degree = 4;
    lidar::AngleConvention angle_convention = lidar::AngleConvention::as_printed;
    double max_range_mm = 30000.0;
    double expected_length_mm = 350.0;  // target prior for segment selection; 0 = nearest
    bool recalibrate = true;            // refresh calibration on scan-plane crossings
    // Reject a selected segment whose cut length deviates from the expected
    // length by more than this fraction (walls, clutter). 0 disables.
    double length_tolerance = 0.5;
  } lidar;

  std::string calibration_path;  // empty = look for calibration.json beside the manifest

  struct Mounts {
    state::Mount mono;
    state::Mount thermal;
  } mounts;  // written into calibration records produced by the calibrate command

  struct Output {
    std::string tracks_jsonl;    // per-frame track debug rows, empty = off
    std::string segments_jsonl;  // accepted lidar segments, empty = off
  } output;

  static PipelineConfig defaults() { return {}; }
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

}  // namespace uav
