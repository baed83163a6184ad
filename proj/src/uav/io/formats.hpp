#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "uav/io/types.hpp"

namespace uav::io {

// Thermal frames: binary PGM (P5, maxval 255), one file per frame named
// frame_%06u.pgm, plus a JSON-lines index {frame_id, timestamp}.
ThermalFrame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const ThermalFrame& frame);
std::string thermal_frame_filename(uint64_t frame_id);
std::vector<ThermalFrameEntry> read_thermal_index(const std::filesystem::path& dir);
void write_thermal_sequence(const std::filesystem::path& dir,
                            std::span<const ThermalFrame> frames,
                            uint64_t first_frame_id = 0);

// LIDAR log: CSV, one scan per line: timestamp,r0,...,rN (mm, integers).
std::vector<LidarScan> read_lidar_csv(const std::filesystem::path& path,
                                      int points_per_degree = 4,
                                      double angular_start_deg = 0.0);
void write_lidar_csv(const std::filesystem::path& path, std::span<const LidarScan> scans);

// Detections: JSON-lines, one object per line.
std::vector<DetectionRecord> read_detections_jsonl(const std::filesystem::path& path);
void write_detections_jsonl(const std::filesystem::path& path,
                            std::span<const DetectionRecord> records);

// Ground truth: CSV timestamp,x,y,z[,visible] in mm.
struct GroundTruthFile {
  std::vector<GroundTruthSample> samples;
  bool has_visibility = false;
};
GroundTruthFile read_groundtruth_csv(const std::filesystem::path& path);
void write_groundtruth_csv(const std::filesystem::path& path,
                           std::span<const GroundTruthSample> samples,
                           bool with_visibility);

// Manifest: JSON with keys thermal_dir, lidar_csv, detections_jsonl,
// groundtruth_csv, offsets{...}, duration. Paths are relative to the
// manifest's directory.
SessionManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const SessionManifest& manifest);

}  // namespace uav::io
