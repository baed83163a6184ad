#pragma once

#include <span>
#include <vector>

#include "uav/io/types.hpp"
#include "uav/track/kalman.hpp"

namespace uav::track {

/// Greedy nearest-neighbor assignment between predicted track centers and
/// detection centers. Pairs farther apart than gate_px stay unmatched; each
/// side is assigned at most once. Deterministic: candidate pairs are taken
/// in order of (distance asc, track id asc, detection index asc).
struct Assignment {
  std::vector<std::pair<size_t, size_t>> matches;  // (track index, detection index)
  std::vector<size_t> unmatched_tracks;
  std::vector<size_t> unmatched_detections;
};
Assignment associate(std::span<const TrackState> tracks,
                     std::span<const io::DetectionRecord> detections, double gate_px);

/// Single-owner track manager: predict all tracks to t, associate, update
/// matched tracks, age and drop starved ones, spawn tracks on unmatched
/// detections. step() calls must be serialized in time order; distinct
/// Tracker instances are independent.
class Tracker {
public:
  explicit Tracker(KalmanConfig config = {}) : config_(config) {}

  /// Advances to time t and returns the confirmed tracks (hits >= min_hits).
  /// Raises time_regression when t goes backwards.
  std::vector<TrackState> step(double t, std::span<const io::DetectionRecord> detections);

  const std::vector<TrackState>& tracks() const { return tracks_; }
  const KalmanConfig& config() const { return config_; }
  bool stepped() const { return stepped_; }
  double last_step_time() const { return last_time_; }

private:
  KalmanConfig config_;
  std::vector<TrackState> tracks_;
  uint64_t next_id_ = 1;
  double last_time_ = 0.0;
  bool stepped_ = false;
};

}  // namespace uav::track
