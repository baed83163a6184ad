#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uav/common.hpp"

namespace uav::io {

/// Timestamped 8-bit grayscale frame from the thermal camera.
/// Pixels are row-major, length == width * height.
struct ThermalFrame {
  double timestamp = 0.0;
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<uint8_t> pixels;
};

/// One planar sweep. Beam b points at angular_start_deg + b / points_per_degree
/// degrees; ranges are millimeters, values <= 0 mean no return.
struct LidarScan {
  double timestamp = 0.0;
  double angular_start_deg = 0.0;
  int points_per_degree = 4;
  std::vector<double> ranges_mm;
};

/// Scored pixel-space bounding box from an external detector.
/// Box center (cx, cy) uses the shared image convention: origin at the frame
/// center, x right, y up, units pixels.
struct DetectionRecord {
  double timestamp = 0.0;
  uint64_t frame_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double score = 0.0;
  uint32_t iso = 0;
  uint32_t frame_width = 0;
  uint32_t frame_height = 0;
};

struct GroundTruthSample {
  double timestamp = 0.0;
  Vec3 position_mm;
  bool visible = true;
};

/// Reference to one on-disk thermal frame; pixel data is read on demand.
struct ThermalFrameEntry {
  uint64_t frame_id = 0;
  double timestamp = 0.0;
  std::filesystem::path path;
};

struct StreamOffsets {
  double thermal = 0.0;
  double lidar = 0.0;
  double detections = 0.0;
  double groundtruth = 0.0;
};

struct SessionManifest {
  std::filesystem::path thermal_dir;
  std::filesystem::path lidar_csv;
  std::filesystem::path detections_jsonl;
  std::filesystem::path groundtruth_csv;
  StreamOffsets offsets;
  double duration = 0.0;  // <= 0 disables cropping
};

/// All streams of a recording on a shared session clock. Immutable after
/// load; safe to read from any number of threads.
struct Session {
  SessionManifest manifest;
  std::vector<ThermalFrameEntry> thermal;
  std::vector<LidarScan> lidar;
  std::vector<DetectionRecord> detections;
  std::vector<GroundTruthSample> groundtruth;
  bool groundtruth_has_visibility = false;
};

}  // namespace uav::io
