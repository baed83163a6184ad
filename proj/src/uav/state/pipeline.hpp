#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uav/config.hpp"
#include "uav/io/session.hpp"
#include "uav/state/estimator.hpp"

namespace uav::state {

/// Per-mode calibration records for a session.
struct CalibrationSet {
  std::optional<CalibrationRecord> mono;
  std::optional<CalibrationRecord> thermal;

  const std::optional<CalibrationRecord>& for_mode(SensorMode mode) const {
    return mode == SensorMode::monocular ? mono : thermal;
  }
};

/// Calibration file: a JSON array of records (a single object is accepted).
CalibrationSet load_calibration(const std::filesystem::path& path);
void write_calibration(const std::filesystem::path& path,
                       std::span<const CalibrationRecord> records);

struct PipelineStats {
  uint64_t frames_processed = 0;
  uint64_t mono_frames = 0;
  uint64_t thermal_frames = 0;
  uint64_t emitted = 0;
  uint64_t recalibrations = 0;
};

struct PipelineOptions {
  bool bypass_kalman = false;  // emit raw box centers, skipping the filter
};

struct PipelineResult {
  std::vector<WorldState> states;
  PipelineStats stats;
};

/// Streams the session through the full chain: per frame, the ISO gate picks
/// the branch, the active branch produces a box, the tracker advances, and
/// the box center is lifted to a world-frame position and velocity. LIDAR
/// target segments refresh the active mode's calibration when they co-occur
/// with a live track. Sequential fold; one call per session.
PipelineResult run_pipeline(const io::Session& session, const CalibrationSet& calibration,
                            const PipelineConfig& config, const PipelineOptions& options = {});

/// Scans the session for the first window where a LIDAR target segment and a
/// tracked box co-occur and returns the calibration captured there; nothing
/// if the target never crosses the scan plane while tracked.
std::optional<CalibrationRecord> find_calibration(const io::Session& session,
                                                  const PipelineConfig& config);

// Trajectory CSV: timestamp,x,y,z,vx,vy,vz,mode (mm, mm/s).
void write_trajectory_csv(const std::filesystem::path& path, std::span<const WorldState> states);
std::vector<WorldState> read_trajectory_csv(const std::filesystem::path& path);

}  // namespace uav::state
